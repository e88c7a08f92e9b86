//! Integration of the state/costate system with shadow-boundary events.
//!
//! The trajectory is advanced one macro step at a time. Inside a macro
//! step the integrator either takes a single eighth-order step or, in the
//! default adaptive mode, subdivides using the embedded error estimate.
//! Every macro step is checked for a change of lighting; crossings are
//! bracketed by bisection down to `event_tol`, refined by one secant step
//! on the shadow boundary function, and the costate jump is applied there.
//! The run stops once the osculating perigee reaches the target.

mod rk8;

use serde::{Deserialize, Serialize};

pub use rk8::rk8_step;

use crate::dynamics::{
    apply_costate_jump, in_eclipse, shadow_constraint, AugmentedState, Environment, JumpEvent, VehicleSpec,
    STATE_LEN,
};
use crate::error::{Result, TransferError};
use crate::guess::build_guess;
use crate::orbital::{elements_of, initial_state};
use crate::solver::TransferProblem;

/// Interior points sampled per integration interval by the missed-eclipse guard.
const GUARD_SAMPLES: usize = 4;
const MAX_SUBSTEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepMode {
    /// One eighth-order step per macro step.
    Fixed,
    /// Error-controlled substeps inside each macro step.
    Adaptive { rtol: f64 },
}

impl Default for StepMode {
    fn default() -> Self {
        StepMode::Adaptive { rtol: 1e-11 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    /// Macro step, s.
    pub macro_step: f64,
    /// Event localization accuracy, s.
    pub event_tol: f64,
    /// Hard stop, s.
    pub max_time: f64,
    /// Track energy and angular momentum drift over coast arcs.
    pub energy_check: bool,
    pub mode: StepMode,
}

impl IntegratorSettings {
    pub fn for_vehicle(vehicle: &VehicleSpec) -> Self {
        Self {
            macro_step: 1000.0,
            event_tol: 10.0,
            max_time: default_max_time(vehicle),
            energy_check: false,
            mode: StepMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.event_tol > 0.0 && self.event_tol < self.macro_step && self.macro_step.is_finite()) {
            return Err(TransferError::InvalidInput(format!(
                "need 0 < event_tol < macro_step, got {} / {}",
                self.event_tol, self.macro_step
            )));
        }
        if !(self.max_time > 0.0) {
            return Err(TransferError::InvalidInput(format!("max_time must be > 0, got {}", self.max_time)));
        }
        if let StepMode::Adaptive { rtol } = self.mode {
            if !(rtol > 0.0 && rtol < 1.0) {
                return Err(TransferError::InvalidInput(format!("rtol must be in (0, 1), got {rtol}")));
            }
        }
        Ok(())
    }
}

/// Three times the burn time needed for 3000 m/s at full thrust.
pub fn default_max_time(vehicle: &VehicleSpec) -> f64 {
    const DV_GUESS: f64 = 3000.0;
    if vehicle.thrust <= 0.0 {
        return 30.0 * crate::dynamics::DAY;
    }
    3.0 * vehicle.m0 * vehicle.ve * (1.0 - (-DV_GUESS / vehicle.ve).exp()) / vehicle.thrust
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StopKind {
    PerigeeReached,
    MaxTime,
    Error(TransferError),
}

impl StopKind {
    pub fn label(&self) -> &'static str {
        match self {
            StopKind::PerigeeReached => "perigee_reached",
            StopKind::MaxTime => "max_time",
            StopKind::Error(_) => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopCondition {
    pub kind: StopKind,
    pub t_stop: f64,
}

/// Largest relative drift seen between consecutive samples of coast arcs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CoastDrift {
    pub energy: f64,
    pub angular_momentum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// One sample per accepted macro step or event, strictly increasing in
    /// time. Event samples hold the post-jump state.
    pub samples: Vec<AugmentedState>,
    pub events: Vec<JumpEvent>,
    /// State just before each jump, parallel to `events`.
    pub pre_jump: Vec<AugmentedState>,
    pub revolutions: u32,
    pub eclipse_time: f64,
    pub thrust_time: f64,
    pub coast_drift: Option<CoastDrift>,
}

impl Trajectory {
    pub fn final_state(&self) -> &AugmentedState {
        self.samples.last().expect("trajectory always holds the initial state")
    }
}

/// Integration context shared by all routines of one propagation.
#[derive(Debug, Clone, Copy)]
pub struct Propagator<'a> {
    pub env: &'a Environment,
    pub vehicle: &'a VehicleSpec,
    pub settings: &'a IntegratorSettings,
}

struct Segment {
    end: AugmentedState,
    /// Accepted substep end points, excluding the start, including `end`.
    nodes: Vec<AugmentedState>,
}

fn atol() -> [f64; STATE_LEN] {
    [1e-3, 1e-3, 1e-6, 1e-6, 1e-9, 1e-15, 1e-15, 1e-12, 1e-12, 1e-10]
}

impl<'a> Propagator<'a> {
    pub fn new(env: &'a Environment, vehicle: &'a VehicleSpec, settings: &'a IntegratorSettings) -> Self {
        Self { env, vehicle, settings }
    }

    /// Integrates from `state` over `dt` seconds with the thrust flag held.
    pub fn advance(&self, state: &AugmentedState, dt: f64) -> Result<AugmentedState> {
        Ok(self.advance_segment(state, dt)?.end)
    }

    fn advance_segment(&self, state: &AugmentedState, dt: f64) -> Result<Segment> {
        if dt == 0.0 {
            return Ok(Segment { end: *state, nodes: vec![] });
        }
        let t_end = state.t + dt;
        match self.settings.mode {
            StepMode::Fixed => {
                let mut end = rk8_step(self.env, self.vehicle, state, dt)?;
                end.t = t_end;
                Ok(Segment { end, nodes: vec![end] })
            }
            StepMode::Adaptive { rtol } => {
                let atol = atol();
                let mut y = state.to_vector();
                let mut t = state.t;
                let mut h = dt;
                let mut nodes = Vec::new();
                for _ in 0..MAX_SUBSTEPS {
                    let remaining = t_end - t;
                    let last = h >= remaining;
                    if last {
                        h = remaining;
                    }
                    let step = rk8::dop853_stages(self.env, self.vehicle, &y, state.thrust_on, h)?;
                    let err = rk8::error_norm(&y, &step, h, rtol, &atol);
                    if err <= 1.0 {
                        y = step.y;
                        t = if last { t_end } else { t + h };
                        nodes.push(AugmentedState::from_vector(t, &y, state.thrust_on));
                        if last {
                            let end = *nodes.last().unwrap();
                            return Ok(Segment { end, nodes });
                        }
                        let fac = if err == 0.0 { 6.0 } else { (0.9 * err.powf(-0.125)).clamp(0.2, 6.0) };
                        h *= fac;
                    } else {
                        h *= (0.9 * err.powf(-0.125)).clamp(0.1, 0.9);
                    }
                    if !(h > 1e-9 * dt.abs().max(1.0)) || !h.is_finite() {
                        return Err(TransferError::InvalidInput(format!("step size underflow at t = {t}")));
                    }
                }
                Err(TransferError::InvalidInput(format!("too many substeps at t = {t}")))
            }
        }
    }

    /// Lighting disagrees with the carried thrust flag.
    fn lighting_flipped(&self, s: &AugmentedState) -> bool {
        in_eclipse(self.env, s.x, s.y, s.t) == s.thrust_on
    }

    fn boundary_distance(&self, s: &AugmentedState) -> f64 {
        shadow_constraint(self.env, s.x, s.y, s.t).abs() - self.env.earth_radius
    }

    /// If the lighting at `state_b` differs from the thrust flag carried by
    /// `state_a`, locates the crossing and returns the (pre-jump) state
    /// there. `state_b` must come from integrating `state_a`.
    pub fn detect_boundary_crossing(
        &self,
        state_a: &AugmentedState,
        state_b: &AugmentedState,
    ) -> Result<Option<AugmentedState>> {
        if !self.lighting_flipped(&AugmentedState { thrust_on: state_a.thrust_on, ..*state_b }) {
            return Ok(None);
        }
        self.locate_crossing(state_a, state_b.t).map(Some)
    }

    /// Bisection on the shadow predicate over `[a.t, t_hi]`, then one secant
    /// step on `|psi| - R_E` inside the final bracket.
    fn locate_crossing(&self, a: &AugmentedState, t_hi: f64) -> Result<AugmentedState> {
        let mut lo = *a;
        let mut hi = self.advance(a, t_hi - a.t)?;
        while hi.t - lo.t > self.settings.event_tol {
            let mid = self.advance(a, 0.5 * (lo.t + hi.t) - a.t)?;
            if self.lighting_flipped(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (dlo, dhi) = (self.boundary_distance(&lo), self.boundary_distance(&hi));
        if dlo * dhi < 0.0 {
            let t_star = lo.t + (hi.t - lo.t) * dlo / (dlo - dhi);
            if t_star > lo.t && t_star < hi.t {
                return self.advance(a, t_star - a.t);
            }
        }
        Ok(hi)
    }

    fn perigee_gap(&self, s: &AugmentedState, target: f64) -> Result<f64> {
        Ok(elements_of(self.env, s)?.perigee_alt - target)
    }

    /// Bisection on the perigee altitude over `[a.t, b.t]` followed by a
    /// secant step.
    fn locate_perigee(&self, a: &AugmentedState, b: &AugmentedState, target: f64) -> Result<AugmentedState> {
        let mut lo = *a;
        let mut hi = *b;
        while hi.t - lo.t > self.settings.event_tol {
            let mid = self.advance(a, 0.5 * (lo.t + hi.t) - a.t)?;
            if self.perigee_gap(&mid, target)? >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (glo, ghi) = (self.perigee_gap(&lo, target)?, self.perigee_gap(&hi, target)?);
        if glo < 0.0 && ghi > 0.0 {
            let t_star = lo.t + (hi.t - lo.t) * glo / (glo - ghi);
            if t_star > lo.t && t_star < hi.t {
                let s = self.advance(a, t_star - a.t)?;
                if self.perigee_gap(&s, target)? >= 0.0 {
                    return Ok(s);
                }
            }
        }
        Ok(hi)
    }

    /// First time inside the segment where the guard sees a lighting change,
    /// using the accepted substep nodes and cubic Hermite samples between them.
    fn guard_first_flip(&self, start: &AugmentedState, seg: &Segment) -> Option<f64> {
        let mut prev = *start;
        for node in &seg.nodes {
            let dt = node.t - prev.t;
            for k in 1..=GUARD_SAMPLES {
                let s = k as f64 / (GUARD_SAMPLES + 1) as f64;
                let (x, y) = hermite_position(&prev, node, s);
                let t = prev.t + s * dt;
                if in_eclipse(self.env, x, y, t) == start.thrust_on {
                    return Some(t);
                }
            }
            if self.lighting_flipped(&AugmentedState { thrust_on: start.thrust_on, ..*node }) {
                return Some(node.t);
            }
            prev = *node;
        }
        None
    }

    /// Propagates until the osculating perigee altitude reaches
    /// `perigee_target` or `max_time` elapses.
    pub fn run(&self, initial: &AugmentedState, perigee_target: f64) -> Result<(Trajectory, StopCondition)> {
        self.settings.validate()?;
        let mut state = *initial;
        state.thrust_on = !(self.env.eclipses_enabled && in_eclipse(self.env, state.x, state.y, state.t));
        let t_initial = state.t;

        let mut traj = Trajectory {
            samples: vec![state],
            events: vec![],
            pre_jump: vec![],
            revolutions: 0,
            eclipse_time: 0.0,
            thrust_time: 0.0,
            coast_drift: self.settings.energy_check.then(CoastDrift::default),
        };
        let mut angle = state.y.atan2(state.x);
        let mut swept = 0.0;

        let stop = |kind: StopKind, t: f64| StopCondition { kind, t_stop: t };

        match self.perigee_gap(&state, perigee_target) {
            Ok(g) if g >= 0.0 => return Ok((traj, stop(StopKind::PerigeeReached, state.t))),
            Ok(_) => {}
            Err(e) => return Ok((traj, stop(StopKind::Error(e), state.t))),
        }

        loop {
            let t_max = t_initial + self.settings.max_time;
            if state.t >= t_max {
                return Ok((traj, stop(StopKind::MaxTime, state.t)));
            }
            let h = self.settings.macro_step.min(t_max - state.t);
            let outcome = self.macro_step(&state, h, perigee_target);
            let (mut end, crossing, perigee) = match outcome {
                Ok(v) => v,
                Err(e) => return Ok((traj, stop(StopKind::Error(e), state.t))),
            };

            if end.x.hypot(end.y) <= self.env.earth_radius {
                return Ok((traj, stop(StopKind::Error(TransferError::EarthImpact { t: end.t }), end.t)));
            }
            if !(end.m > 0.0) {
                return Ok((traj, stop(StopKind::Error(TransferError::MassDepleted { t: end.t }), end.t)));
            }

            let dt = end.t - state.t;
            if state.thrust_on {
                traj.thrust_time += dt;
            } else {
                traj.eclipse_time += dt;
                if let Some(drift) = traj.coast_drift.as_mut() {
                    let e0 = state.specific_energy(self.env.gm);
                    let e1 = end.specific_energy(self.env.gm);
                    let h0 = state.angular_momentum();
                    let h1 = end.angular_momentum();
                    drift.energy = drift.energy.max(((e1 - e0) / e0).abs());
                    drift.angular_momentum = drift.angular_momentum.max(((h1 - h0) / h0).abs());
                }
            }
            let new_angle = end.y.atan2(end.x);
            swept += wrap_angle(new_angle - angle);
            angle = new_angle;
            traj.revolutions = (swept.abs() / std::f64::consts::TAU).floor() as u32;

            if perigee {
                traj.samples.push(end);
                return Ok((traj, stop(StopKind::PerigeeReached, end.t)));
            }
            if crossing {
                let delta_eps = if end.thrust_on { -1 } else { 1 };
                match apply_costate_jump(self.env, self.vehicle, &end, delta_eps) {
                    Ok((after, event)) => {
                        traj.pre_jump.push(end);
                        traj.events.push(event);
                        end = after;
                    }
                    Err(e) => {
                        traj.samples.push(end);
                        return Ok((traj, stop(StopKind::Error(e), end.t)));
                    }
                }
            }
            traj.samples.push(end);
            state = end;
        }
    }

    /// One macro step: returns the end state, whether it sits on a shadow
    /// boundary, and whether the perigee target was reached.
    fn macro_step(&self, state: &AugmentedState, h: f64, target: f64) -> Result<(AugmentedState, bool, bool)> {
        let seg = self.advance_segment(state, h)?;
        let mut end = seg.end;
        let mut crossing = false;
        if self.env.eclipses_enabled {
            if let Some(t_flip) = self.guard_first_flip(state, &seg) {
                let at = self.locate_crossing(state, t_flip)?;
                if self.crossing_confirmed(state, &at)? {
                    end = at;
                    crossing = true;
                } else {
                    // the guard fired on an interpolation artifact; stop the
                    // segment there without a jump
                    end = at;
                }
            }
        }
        if self.perigee_gap(&end, target)? >= 0.0 {
            let at = self.locate_perigee(state, &end, target)?;
            return Ok((at, false, true));
        }
        Ok((end, crossing, false))
    }

    /// The located point is a genuine boundary: either the lighting already
    /// flipped, or it flips within one event tolerance after it.
    fn crossing_confirmed(&self, start: &AugmentedState, at: &AugmentedState) -> Result<bool> {
        if self.lighting_flipped(at) {
            return Ok(true);
        }
        let probe = self.advance(start, at.t + self.settings.event_tol - start.t)?;
        Ok(self.lighting_flipped(&AugmentedState { thrust_on: start.thrust_on, ..probe }))
    }
}

fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a % TAU;
    if w > PI {
        w -= TAU;
    } else if w <= -PI {
        w += TAU;
    }
    w
}

fn hermite_position(a: &AugmentedState, b: &AugmentedState, s: f64) -> (f64, f64) {
    let dt = b.t - a.t;
    let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
    let h10 = s * s * s - 2.0 * s * s + s;
    let h01 = -2.0 * s * s * s + 3.0 * s * s;
    let h11 = s * s * s - s * s;
    (
        h00 * a.x + h10 * dt * a.vx + h01 * b.x + h11 * dt * b.vx,
        h00 * a.y + h10 * dt * a.vy + h01 * b.y + h11 * dt * b.vy,
    )
}

/// Builds the initial augmented state for the given costate angles and
/// propagates it until the target perigee is reached.
pub fn propagate(problem: &TransferProblem, theta_v: f64, theta_n: f64) -> Result<(Trajectory, StopCondition)> {
    let initial = initial_augmented_state(problem, theta_v, theta_n)?;
    Propagator::new(&problem.env, &problem.vehicle, &problem.integrator).run(&initial, problem.target.perigee_alt)
}

pub fn initial_augmented_state(problem: &TransferProblem, theta_v: f64, theta_n: f64) -> Result<AugmentedState> {
    let base = initial_state(&problem.env, &problem.initial_orbit, problem.vehicle.m0)?;
    let guess = build_guess(&problem.env, &problem.vehicle, base.radius(), theta_v, theta_n)?;
    Ok(guess.apply(&base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{EARTH_GM, EARTH_RADIUS};

    fn settings() -> IntegratorSettings {
        IntegratorSettings {
            macro_step: 1000.0,
            event_tol: 10.0,
            max_time: 1e6,
            energy_check: true,
            mode: StepMode::default(),
        }
    }

    #[test]
    fn settings_validation() {
        let mut s = settings();
        assert!(s.validate().is_ok());
        s.event_tol = 2000.0;
        assert!(s.validate().is_err());
        s = settings();
        s.max_time = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn wrap() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI / 2.0) + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(wrap_angle(0.5), 0.5);
    }

    #[test]
    fn default_max_time_gto() {
        let v = VehicleSpec { m0: 1000.0, thrust: 1.0, ve: 14710.0 };
        let t = default_max_time(&v);
        let expected = 3.0 * 1000.0 * 14710.0 * (1.0 - (-3000.0f64 / 14710.0).exp());
        assert!((t - expected).abs() < 1e-6);
    }

    #[test]
    fn adaptive_lands_exactly_on_requested_time() {
        let env = Environment::earth(0.0, false);
        let veh = VehicleSpec { m0: 1000.0, thrust: 0.0, ve: 14710.0 };
        let s = settings();
        let p = Propagator::new(&env, &veh, &s);
        let r = EARTH_RADIUS + 500e3;
        let st = AugmentedState {
            t: 17.0,
            x: r,
            y: 0.0,
            vx: 0.0,
            vy: (EARTH_GM / r).sqrt() * 1.3,
            m: 1.0,
            px: 0.0,
            py: 0.0,
            pvx: 0.0,
            pvy: 1.0,
            pm: 0.0,
            thrust_on: true,
        };
        let end = p.advance(&st, 1000.0).unwrap();
        assert_eq!(end.t, 1017.0);
    }
}
