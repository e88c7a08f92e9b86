use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Failures raised by the dynamics, propagation, orbit and guess routines.
#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum TransferError {
    #[error("gravity singularity at the origin")]
    Singularity,
    #[error("velocity costate is zero, thrust direction undefined")]
    DegenerateControl,
    #[error("tangential shadow crossing (|dpsi/dt| = {rate:.3e} m/s)")]
    TangentialCrossing { rate: f64 },
    #[error("orbit is not bound (specific energy {energy:.6e} m^2/s^2)")]
    Unbound { energy: f64 },
    #[error("vehicle hit the Earth at t = {t:.1} s")]
    EarthImpact { t: f64 },
    #[error("mass depleted at t = {t:.1} s")]
    MassDepleted { t: f64 },
    #[error("pitch angle {theta_v:.6} rad gives an imaginary costate rate")]
    InvalidAngle { theta_v: f64 },
    #[error("no sign change of the pitch equation in the admissible interval")]
    NoRoot,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no feasible transfer found after {evaluations} evaluations")]
    NoFeasibleTransfer { evaluations: usize },
}

pub type Result<T, E = TransferError> = std::result::Result<T, E>;
