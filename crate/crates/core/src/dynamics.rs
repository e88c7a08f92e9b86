//! Equations of motion, adjoint equations and Earth-shadow geometry.
//!
//! Everything here is a pure function of its arguments. The integrated
//! vector is laid out as
//! `[x, y, vx, vy, m, px, py, pvx, pvy, pm]`; time and the thrust flag
//! travel alongside it in [`AugmentedState`].

use serde::{Deserialize, Serialize};

use crate::error::{Result, TransferError};

/// Earth gravitational parameter, m^3/s^2.
pub const EARTH_GM: f64 = 3.986005e14;
/// Earth equatorial radius, m.
pub const EARTH_RADIUS: f64 = 6_378_137.0;
/// Standard gravity used to convert specific impulse to exhaust velocity.
pub const STANDARD_GRAVITY: f64 = 9.80665;
/// Seconds per day.
pub const DAY: f64 = 86_400.0;
/// Apparent Sun rate of 0.986 deg/day, in rad/s.
pub const SUN_RATE: f64 = 0.986 * std::f64::consts::PI / 180.0 / DAY;

/// Below this shadow-function rate a boundary crossing is treated as grazing.
pub const MIN_CROSSING_RATE: f64 = 1e-6;

/// Number of integrated components.
pub const STATE_LEN: usize = 10;

pub type StateVector = [f64; STATE_LEN];

/// Central body and Sun motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub gm: f64,
    pub earth_radius: f64,
    /// Sun polar angle at t = 0, rad.
    pub alpha0: f64,
    /// Sun angular rate, rad/s.
    pub omega_sun: f64,
    pub eclipses_enabled: bool,
}

impl Environment {
    pub fn new(
        gm: f64,
        earth_radius: f64,
        alpha0: f64,
        omega_sun: f64,
        eclipses_enabled: bool,
    ) -> Result<Self> {
        let env = Self { gm, earth_radius, alpha0, omega_sun, eclipses_enabled };
        env.validate()?;
        Ok(env)
    }

    /// Earth with the Sun starting at `alpha0` and moving at 0.986 deg/day.
    pub fn earth(alpha0: f64, eclipses_enabled: bool) -> Self {
        Self {
            gm: EARTH_GM,
            earth_radius: EARTH_RADIUS,
            alpha0,
            omega_sun: SUN_RATE,
            eclipses_enabled,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gm > 0.0 && self.gm.is_finite()) {
            return Err(TransferError::InvalidInput(format!("gm must be > 0, got {}", self.gm)));
        }
        if !(self.earth_radius > 0.0 && self.earth_radius.is_finite()) {
            return Err(TransferError::InvalidInput(format!(
                "earth_radius must be > 0, got {}",
                self.earth_radius
            )));
        }
        if !(self.omega_sun >= 0.0 && self.omega_sun.is_finite()) || !self.alpha0.is_finite() {
            return Err(TransferError::InvalidInput("invalid Sun motion".into()));
        }
        Ok(())
    }
}

/// Engine and initial mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    /// Initial mass, kg.
    pub m0: f64,
    /// Thrust, N.
    pub thrust: f64,
    /// Exhaust velocity, m/s.
    pub ve: f64,
}

impl VehicleSpec {
    pub fn new(m0: f64, thrust: f64, ve: f64) -> Result<Self> {
        let v = Self { m0, thrust, ve };
        v.validate()?;
        Ok(v)
    }

    pub fn from_isp(m0: f64, thrust: f64, isp: f64) -> Result<Self> {
        Self::new(m0, thrust, STANDARD_GRAVITY * isp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m0 > 0.0 && self.m0.is_finite()) {
            return Err(TransferError::InvalidInput(format!("m0 must be > 0, got {}", self.m0)));
        }
        if !(self.thrust >= 0.0 && self.thrust.is_finite()) {
            return Err(TransferError::InvalidInput(format!(
                "thrust must be >= 0, got {}",
                self.thrust
            )));
        }
        if !(self.ve > 0.0 && self.ve.is_finite()) {
            return Err(TransferError::InvalidInput(format!("ve must be > 0, got {}", self.ve)));
        }
        Ok(())
    }

    /// Propellant mass flow while thrusting, kg/s.
    pub fn mass_flow(&self) -> f64 {
        self.thrust / self.ve
    }
}

/// State, costate, time and thrust flag at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentedState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub m: f64,
    pub px: f64,
    pub py: f64,
    pub pvx: f64,
    pub pvy: f64,
    pub pm: f64,
    /// Engine on (sunlit) when true.
    pub thrust_on: bool,
}

impl AugmentedState {
    pub fn from_vector(t: f64, v: &StateVector, thrust_on: bool) -> Self {
        Self {
            t,
            x: v[0],
            y: v[1],
            vx: v[2],
            vy: v[3],
            m: v[4],
            px: v[5],
            py: v[6],
            pvx: v[7],
            pvy: v[8],
            pm: v[9],
            thrust_on,
        }
    }

    pub fn to_vector(&self) -> StateVector {
        [
            self.x, self.y, self.vx, self.vy, self.m, self.px, self.py, self.pvx, self.pvy,
            self.pm,
        ]
    }

    /// The thrust flag as 0.0 or 1.0.
    pub fn eps(&self) -> f64 {
        if self.thrust_on {
            1.0
        } else {
            0.0
        }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn velocity_costate_norm(&self) -> f64 {
        self.pvx.hypot(self.pvy)
    }

    /// Specific orbital energy v^2/2 - gm/r.
    pub fn specific_energy(&self, gm: f64) -> f64 {
        0.5 * (self.vx * self.vx + self.vy * self.vy) - gm / self.radius()
    }

    /// Specific angular momentum x*vy - y*vx.
    pub fn angular_momentum(&self) -> f64 {
        self.x * self.vy - self.y * self.vx
    }
}

/// Record of one costate discontinuity at a shadow boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub t_d: f64,
    /// -1 at shadow entry, +1 at exit.
    pub delta_eps: i8,
    pub mu_mult: f64,
    pub dpx: f64,
    pub dpy: f64,
}

impl JumpEvent {
    pub fn is_entry(&self) -> bool {
        self.delta_eps < 0
    }
}

/// Sun polar angle alpha0 + omega_sun * t (not wrapped).
pub fn sun_angle(env: &Environment, t: f64) -> f64 {
    env.alpha0 + env.omega_sun * t
}

/// Raw cylindrical shadow test, ignoring `eclipses_enabled`.
pub fn in_eclipse(env: &Environment, x: f64, y: f64, t: f64) -> bool {
    let (s, c) = sun_angle(env, t).sin_cos();
    let psi = x * s - y * c;
    psi * psi - env.earth_radius * env.earth_radius < 0.0 && x * c + y * s < 0.0
}

/// Signed distance of (x, y) from the shadow axis; the boundaries sit at +/- R_E.
pub fn shadow_constraint(env: &Environment, x: f64, y: f64, t: f64) -> f64 {
    let (s, c) = sun_angle(env, t).sin_cos();
    x * s - y * c
}

/// Total time derivative of [`shadow_constraint`] along the motion.
pub fn shadow_constraint_rate(env: &Environment, state: &AugmentedState) -> f64 {
    let (s, c) = sun_angle(env, state.t).sin_cos();
    env.omega_sun * (state.x * c + state.y * s) + state.vx * s - state.vy * c
}

/// Point-mass gravity acceleration.
pub fn gravity(env: &Environment, x: f64, y: f64) -> Result<[f64; 2]> {
    let r2 = x * x + y * y;
    if r2 == 0.0 {
        return Err(TransferError::Singularity);
    }
    Ok(gravity_unchecked(env.gm, x, y, r2))
}

#[inline]
fn gravity_unchecked(gm: f64, x: f64, y: f64, r2: f64) -> [f64; 2] {
    let k = -gm / (r2 * r2.sqrt());
    [k * x, k * y]
}

/// Jacobian of the gravity acceleration with respect to position,
/// `(gm/r^5) (3 r r^T - r^2 I)`.
pub fn gravity_gradient(env: &Environment, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
    let r2 = x * x + y * y;
    if r2 == 0.0 {
        return Err(TransferError::Singularity);
    }
    Ok(gravity_gradient_unchecked(env.gm, x, y, r2))
}

#[inline]
fn gravity_gradient_unchecked(gm: f64, x: f64, y: f64, r2: f64) -> [[f64; 2]; 2] {
    let k = gm / (r2 * r2 * r2.sqrt());
    let xy = 3.0 * k * x * y;
    [[k * (3.0 * x * x - r2), xy], [xy, k * (3.0 * y * y - r2)]]
}

/// Unit thrust direction along the velocity costate.
pub fn optimal_thrust_direction(state: &AugmentedState) -> Result<[f64; 2]> {
    let n = state.velocity_costate_norm();
    if n == 0.0 || !n.is_finite() {
        return Err(TransferError::DegenerateControl);
    }
    Ok([state.pvx / n, state.pvy / n])
}

/// `|p_v|/m - p_m/v_e`.
pub fn switching_function(state: &AugmentedState, vehicle: &VehicleSpec) -> f64 {
    state.velocity_costate_norm() / state.m - state.pm / vehicle.ve
}

/// Time derivative of the ten integrated components.
pub fn rhs(env: &Environment, vehicle: &VehicleSpec, state: &AugmentedState) -> Result<StateVector> {
    rhs_vector(env, vehicle, &state.to_vector(), state.thrust_on)
}

/// [`rhs`] on the raw vector, used by the integrator stages.
pub fn rhs_vector(
    env: &Environment,
    vehicle: &VehicleSpec,
    y: &StateVector,
    thrust_on: bool,
) -> Result<StateVector> {
    let [x, yy, vx, vy, m, px, py, pvx, pvy, _pm] = *y;
    let r2 = x * x + yy * yy;
    if r2 == 0.0 {
        return Err(TransferError::Singularity);
    }
    let g = gravity_unchecked(env.gm, x, yy, r2);
    let grad = gravity_gradient_unchecked(env.gm, x, yy, r2);

    let mut out = [0.0; STATE_LEN];
    out[0] = vx;
    out[1] = vy;
    out[2] = g[0];
    out[3] = g[1];
    out[5] = -(grad[0][0] * pvx + grad[0][1] * pvy);
    out[6] = -(grad[1][0] * pvx + grad[1][1] * pvy);
    out[7] = -px;
    out[8] = -py;

    if thrust_on && vehicle.thrust > 0.0 {
        let pv = pvx.hypot(pvy);
        if pv == 0.0 || !pv.is_finite() {
            return Err(TransferError::DegenerateControl);
        }
        let acc = vehicle.thrust / m;
        out[2] += acc * pvx / pv;
        out[3] += acc * pvy / pv;
        out[4] = -vehicle.thrust / vehicle.ve;
        out[9] = vehicle.thrust * pv / (m * m);
    }
    Ok(out)
}

/// Hamiltonian evaluated with an arbitrary unit thrust direction `u`.
pub fn hamiltonian_with_control(
    env: &Environment,
    vehicle: &VehicleSpec,
    state: &AugmentedState,
    u: [f64; 2],
) -> f64 {
    let r2 = state.x * state.x + state.y * state.y;
    let g = gravity_unchecked(env.gm, state.x, state.y, r2);
    state.px * state.vx
        + state.py * state.vy
        + state.pvx * g[0]
        + state.pvy * g[1]
        + state.eps()
            * vehicle.thrust
            * ((state.pvx * u[0] + state.pvy * u[1]) / state.m - state.pm / vehicle.ve)
}

/// Hamiltonian maximized over the thrust direction:
/// `p_r.v + p_v.g + eps T Phi`.
pub fn hamiltonian(env: &Environment, vehicle: &VehicleSpec, state: &AugmentedState) -> f64 {
    let r2 = state.x * state.x + state.y * state.y;
    let g = gravity_unchecked(env.gm, state.x, state.y, r2);
    state.px * state.vx
        + state.py * state.vy
        + state.pvx * g[0]
        + state.pvy * g[1]
        + state.eps() * vehicle.thrust * switching_function(state, vehicle)
}

/// Applies the position-costate discontinuity at a shadow boundary and
/// flips the thrust flag.
///
/// `delta_eps` is -1 at shadow entry and +1 at exit. The multiplier is
/// `mu = T Phi delta_eps / psi_dot`, and `p_r` jumps by
/// `-mu * dpsi/dr = mu (-sin a, cos a)`. Velocity and mass costates,
/// state and time are untouched.
pub fn apply_costate_jump(
    env: &Environment,
    vehicle: &VehicleSpec,
    state: &AugmentedState,
    delta_eps: i8,
) -> Result<(AugmentedState, JumpEvent)> {
    let thrust_after = match (delta_eps, state.thrust_on) {
        (-1, true) => false,
        (1, false) => true,
        _ => {
            return Err(TransferError::InvalidInput(format!(
                "jump delta_eps = {delta_eps} inconsistent with thrust flag {}",
                state.thrust_on
            )))
        }
    };
    let rate = shadow_constraint_rate(env, state);
    if !(rate.abs() > MIN_CROSSING_RATE) {
        return Err(TransferError::TangentialCrossing { rate });
    }
    let phi = switching_function(state, vehicle);
    let mu_mult = vehicle.thrust * phi * f64::from(delta_eps) / rate;
    let (s, c) = sun_angle(env, state.t).sin_cos();
    let dpx = -mu_mult * s;
    let dpy = mu_mult * c;

    let mut out = *state;
    out.px += dpx;
    out.py += dpy;
    out.thrust_on = thrust_after;
    Ok((out, JumpEvent { t_d: state.t, delta_eps, mu_mult, dpx, dpy }))
}
