//! Two-angle initial costate.
//!
//! The velocity costate is a unit vector at pitch `theta_v` from the local
//! horizontal, the position costate has magnitude `omega_v` and direction
//! set by `theta_n`, and the mass costate is `ve / m0` so that the
//! switching function starts at zero. Components are inertial; at the
//! initial perigee on +x the local horizontal is +y.
//!
//! The position costate points radially outward at `theta_n = 0`, so that
//! `dp_v/dt = -p_r` turns the thrust toward the Earth at the rate
//! `omega_v` and keeps it close to the local horizontal.

use serde::{Deserialize, Serialize};

use crate::dynamics::{AugmentedState, Environment, VehicleSpec};
use crate::error::{Result, TransferError};

/// `asin(1/sqrt(3))`: beyond this pitch the costate rate is imaginary.
pub fn max_pitch() -> f64 {
    (1.0 / 3f64.sqrt()).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostateGuess {
    pub theta_v: f64,
    pub theta_n: f64,
    pub omega_v: f64,
    pub pr0: [f64; 2],
    pub pv0: [f64; 2],
    pub pm0: f64,
}

impl CostateGuess {
    /// Copies the costates into `state`.
    pub fn apply(&self, state: &AugmentedState) -> AugmentedState {
        AugmentedState {
            px: self.pr0[0],
            py: self.pr0[1],
            pvx: self.pv0[0],
            pvy: self.pv0[1],
            pm: self.pm0,
            ..*state
        }
    }
}

pub fn build_guess(
    env: &Environment,
    vehicle: &VehicleSpec,
    r0: f64,
    theta_v: f64,
    theta_n: f64,
) -> Result<CostateGuess> {
    let s = theta_v.sin();
    let shape = 1.0 - 3.0 * s * s;
    if !(shape > 0.0) || !theta_n.is_finite() {
        return Err(TransferError::InvalidAngle { theta_v });
    }
    if !(r0 > 0.0) {
        return Err(TransferError::InvalidInput(format!("r0 must be > 0, got {r0}")));
    }
    let omega_v = (env.gm / (r0 * r0 * r0) * shape).sqrt();
    let (sn, cn) = theta_n.sin_cos();
    Ok(CostateGuess {
        theta_v,
        theta_n,
        omega_v,
        pr0: [omega_v * cn, -omega_v * sn],
        pv0: [s, theta_v.cos()],
        pm0: vehicle.ve / vehicle.m0,
    })
}

/// Sign choice in the high-thrust pitch equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Residual of `sin(theta - gamma0) = +/- (vc0/v0) sin(theta) / sqrt(1 - 3 sin^2 theta)`.
pub fn theta0_residual(env: &Environment, r0: f64, v0: f64, gamma0: f64, branch: Branch, theta: f64) -> f64 {
    let vc0 = (env.gm / r0).sqrt();
    let s = theta.sin();
    (theta - gamma0).sin() - branch.sign() * (vc0 / v0) * s / (1.0 - 3.0 * s * s).sqrt()
}

/// Root of the high-thrust initial pitch equation closest to zero.
///
/// Scans the open admissible interval for sign changes and bisects the
/// bracket nearest to zero.
pub fn solve_theta0(env: &Environment, r0: f64, v0: f64, gamma0: f64, branch: Branch) -> Result<f64> {
    if !(v0 > 0.0) || !(r0 > 0.0) {
        return Err(TransferError::InvalidInput("r0 and v0 must be > 0".into()));
    }
    let f = |t: f64| theta0_residual(env, r0, v0, gamma0, branch, t);
    const HALF: i32 = 2000;
    let edge = max_pitch() * (1.0 - 1e-9);
    let grid = |i: i32| edge * f64::from(i) / f64::from(HALF);

    let mut best: Option<(f64, f64)> = None;
    for i in -HALF..HALF {
        let (a, b) = (grid(i), grid(i + 1));
        let (fa, fb) = (f(a), f(b));
        let bracket = if fa == 0.0 {
            Some((a, a))
        } else if fa * fb < 0.0 {
            Some((a, b))
        } else {
            None
        };
        if let Some((lo, hi)) = bracket {
            let closer = match best {
                None => true,
                Some((blo, bhi)) => (lo + hi).abs() < (blo + bhi).abs(),
            };
            if closer {
                best = Some((lo, hi));
            }
        }
    }
    if f(edge) == 0.0 && best.is_none() {
        return Ok(edge);
    }
    let (mut lo, mut hi) = best.ok_or(TransferError::NoRoot)?;
    if lo == hi {
        return Ok(lo);
    }
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let root = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{EARTH_GM, EARTH_RADIUS};

    fn vehicle() -> VehicleSpec {
        VehicleSpec { m0: 1000.0, thrust: 1.0, ve: 14710.0 }
    }

    #[test]
    fn zero_angles() {
        let env = Environment::earth(0.0, true);
        let r0 = 6.878137e6;
        let g = build_guess(&env, &vehicle(), r0, 0.0, 0.0).unwrap();
        let w = (EARTH_GM / (r0 * r0 * r0)).sqrt();
        assert_eq!(g.omega_v, w);
        assert_eq!(g.pv0, [0.0, 1.0]);
        assert_eq!(g.pr0, [w, -0.0]);
        assert!(w > 1.0e-3 && w < 1.2e-3);
        assert!((g.pm0 - 14.71).abs() < 1e-12);
    }

    #[test]
    fn imaginary_rate_rejected() {
        let env = Environment::earth(0.0, true);
        let err = build_guess(&env, &vehicle(), 7e6, 40f64.to_radians(), 0.0).unwrap_err();
        assert!(matches!(err, TransferError::InvalidAngle { .. }));
        assert!(build_guess(&env, &vehicle(), 7e6, max_pitch() + 1e-6, 0.0).is_err());
    }

    #[test]
    fn orthogonal_when_angles_match() {
        let env = Environment::earth(0.0, true);
        for k in -10..=10 {
            let th = (k as f64).to_radians();
            let g = build_guess(&env, &vehicle(), 7e6, th, th).unwrap();
            let dot = g.pr0[0] * g.pv0[0] + g.pr0[1] * g.pv0[1];
            assert!(dot.abs() < 1e-12);
            assert!((g.pv0[0].hypot(g.pv0[1]) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn omega_even_and_peaked_at_zero() {
        let env = Environment::earth(0.0, true);
        let w = |t: f64| build_guess(&env, &vehicle(), 7e6, t, 0.0).unwrap().omega_v;
        let mut prev = w(0.0);
        for k in 1..30 {
            let t = k as f64 * 0.01;
            assert_eq!(w(t), w(-t));
            assert!(w(t) < prev);
            prev = w(t);
        }
    }

    #[test]
    fn theta0_fast_limit_is_zero() {
        let env = Environment::earth(0.0, true);
        let root = solve_theta0(&env, 7e6, 1e12, 0.0, Branch::Plus).unwrap();
        assert_eq!(root, 0.0);
    }

    #[test]
    fn theta0_residual_small_with_flight_path_angle() {
        let env = Environment::earth(0.0, true);
        let r0 = EARTH_RADIUS + 500e3;
        for (v0, gamma0, branch) in [(9990.0, 0.05, Branch::Plus), (7500.0, -0.1, Branch::Minus), (9000.0, 0.2, Branch::Plus)] {
            let root = solve_theta0(&env, r0, v0, gamma0, branch).unwrap();
            assert!(root.abs() < max_pitch());
            assert!(theta0_residual(&env, r0, v0, gamma0, branch, root).abs() < 1e-12);
        }
    }

    #[test]
    fn theta0_gto_root_near_zero_matches_dense_scan() {
        let env = Environment::earth(0.0, true);
        let r0 = EARTH_RADIUS + 500e3;
        let v0 = 9990.0;
        let root = solve_theta0(&env, r0, v0, 0.0, Branch::Plus).unwrap();
        // dense scan over +/-20 deg: the sign change closest to zero sits at zero
        let f = |t: f64| theta0_residual(&env, r0, v0, 0.0, Branch::Plus, t);
        let mut nearest = f64::INFINITY;
        let n = 40_001;
        for i in 0..n - 1 {
            let a = (-20.0 + 40.0 * i as f64 / (n - 1) as f64).to_radians();
            let b = (-20.0 + 40.0 * (i + 1) as f64 / (n - 1) as f64).to_radians();
            if f(a) == 0.0 || f(a) * f(b) < 0.0 {
                nearest = nearest.min(a.abs().min(b.abs()));
            }
        }
        assert!(nearest < 1e-3);
        assert!(root.abs() < 1e-3);
    }

    #[test]
    fn theta0_no_root() {
        let env = Environment::earth(0.0, true);
        // a large flight-path angle with a tiny right-hand side has no root
        // inside the admissible pitch range
        assert_eq!(solve_theta0(&env, 7e6, 1e9, 1.2, Branch::Plus), Err(TransferError::NoRoot));
    }
}
