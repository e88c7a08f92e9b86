//! The two-angle transfer search.
//!
//! Each candidate `(theta_v, theta_n)` fixes the whole control history
//! through the initial costate. The run stops when the perigee reaches its
//! target, and the squared apogee miss at that moment is the cost DIRECT
//! minimizes.

use serde::{Deserialize, Serialize};

use crate::direct::{direct_minimize, OptimizerReport, SearchBox, PENALTY};
use crate::dynamics::{Environment, VehicleSpec};
use crate::error::{Result, TransferError};
use crate::orbital::{delta_v, elements_of, local_time_to_alpha0, OrbitSpec};
use crate::propagation::{propagate, IntegratorSettings, StopCondition, StopKind, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferProblem {
    pub env: Environment,
    pub vehicle: VehicleSpec,
    pub initial_orbit: OrbitSpec,
    pub target: OrbitSpec,
    pub integrator: IntegratorSettings,
    /// Half width of the square search box on both angles, rad.
    pub box_half_width: f64,
    pub max_evals: usize,
    pub epsilon: f64,
}

impl TransferProblem {
    /// GTO 36000 x 500 km to a circular 36000 km orbit with a 1 t vehicle
    /// at Isp 1500 s.
    pub fn gto_to_geo(thrust: f64, perigee_local_time: f64, eclipses: bool) -> Self {
        let vehicle = VehicleSpec { m0: 1000.0, thrust, ve: 14710.0 };
        Self {
            env: Environment::earth(local_time_to_alpha0(perigee_local_time), eclipses),
            vehicle,
            initial_orbit: OrbitSpec { apogee_alt: 36_000e3, perigee_alt: 500e3 },
            target: OrbitSpec { apogee_alt: 36_000e3, perigee_alt: 36_000e3 },
            integrator: IntegratorSettings::for_vehicle(&vehicle),
            box_half_width: 10f64.to_radians(),
            max_evals: 3000,
            epsilon: 1e-4,
        }
    }

    /// Circular 500 km orbit to a circular 36000 km orbit.
    pub fn leo_to_geo(thrust: f64, perigee_local_time: f64, eclipses: bool) -> Self {
        Self {
            initial_orbit: OrbitSpec { apogee_alt: 500e3, perigee_alt: 500e3 },
            ..Self::gto_to_geo(thrust, perigee_local_time, eclipses)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.vehicle.validate()?;
        self.initial_orbit.validate()?;
        self.target.validate()?;
        self.integrator.validate()?;
        if !(self.target.perigee_alt > self.initial_orbit.perigee_alt) {
            return Err(TransferError::InvalidInput(
                "target perigee must be above the initial perigee".into(),
            ));
        }
        if !(self.box_half_width > 0.0 && self.box_half_width < crate::guess::max_pitch()) {
            return Err(TransferError::InvalidInput(format!(
                "box half width must be in (0, {:.4}) rad, got {}",
                crate::guess::max_pitch(),
                self.box_half_width
            )));
        }
        if self.max_evals == 0 {
            return Err(TransferError::InvalidInput("max_evals must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub theta_v: f64,
    pub theta_n: f64,
    pub t_f: f64,
    pub m_f: f64,
    pub delta_v: f64,
    pub revolutions: u32,
    pub eclipse_time: f64,
    /// Squared apogee miss, m^2.
    pub objective: f64,
    pub evaluations: usize,
    pub stop: StopCondition,
}

/// Squared apogee miss at the perigee-reached stop, or [`PENALTY`] when the
/// run ends any other way.
pub fn objective(problem: &TransferProblem, theta_v: f64, theta_n: f64) -> f64 {
    match propagate(problem, theta_v, theta_n) {
        Ok((traj, stop)) => cost_of(problem, &traj, &stop),
        Err(_) => PENALTY,
    }
}

fn cost_of(problem: &TransferProblem, traj: &Trajectory, stop: &StopCondition) -> f64 {
    if stop.kind != StopKind::PerigeeReached {
        return PENALTY;
    }
    match elements_of(&problem.env, traj.final_state()) {
        Ok(el) => {
            let miss = el.apogee_alt - problem.target.apogee_alt;
            miss * miss
        }
        Err(_) => PENALTY,
    }
}

/// Packages a propagation at fixed angles.
pub fn summarize(
    problem: &TransferProblem,
    theta_v: f64,
    theta_n: f64,
    traj: &Trajectory,
    stop: &StopCondition,
    evaluations: usize,
) -> SolveResult {
    let last = traj.final_state();
    SolveResult {
        theta_v,
        theta_n,
        t_f: last.t,
        m_f: last.m,
        delta_v: delta_v(&problem.vehicle, last.m),
        revolutions: traj.revolutions,
        eclipse_time: traj.eclipse_time,
        objective: cost_of(problem, traj, stop),
        evaluations,
        stop: stop.clone(),
    }
}

/// Runs DIRECT over the angle box and re-propagates at the best point.
pub fn solve(problem: &TransferProblem) -> Result<SolveResult> {
    solve_with_report(problem).map(|(r, _, _)| r)
}

/// [`solve`] that also returns the optimizer report and the trajectory at
/// the optimum.
pub fn solve_with_report(problem: &TransferProblem) -> Result<(SolveResult, OptimizerReport, Trajectory)> {
    problem.validate()?;
    let bounds = SearchBox::symmetric(problem.box_half_width, 2)?;
    let report = direct_minimize(|x: &[f64]| objective(problem, x[0], x[1]), bounds, problem.max_evals, problem.epsilon)?;
    if report.best_value >= PENALTY {
        return Err(TransferError::NoFeasibleTransfer { evaluations: report.evaluations });
    }
    let (theta_v, theta_n) = (report.best_point[0], report.best_point[1]);
    let (traj, stop) = propagate(problem, theta_v, theta_n)?;
    let result = summarize(problem, theta_v, theta_n, &traj, &stop, report.evaluations);
    Ok((result, report, traj))
}
