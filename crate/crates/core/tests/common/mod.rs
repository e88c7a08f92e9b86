//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use lowthrust::dynamics::{hamiltonian, AugmentedState, Environment, VehicleSpec};
use rand::{Rng, SeedableRng};

/// Central finite-difference gradient of the maximized Hamiltonian with
/// respect to `(x, y, vx, vy, m)`.
pub fn hamiltonian_state_gradient(env: &Environment, veh: &VehicleSpec, s: &AugmentedState) -> [f64; 5] {
    let r = s.x.hypot(s.y);
    let v = s.vx.hypot(s.vy);
    let steps = [1e-4 * r, 1e-4 * r, 1e-4 * v, 1e-4 * v, 1e-4 * s.m];
    let mut out = [0.0; 5];
    for (k, h) in steps.into_iter().enumerate() {
        let shifted = |d: f64| {
            let mut p = *s;
            match k {
                0 => p.x += d,
                1 => p.y += d,
                2 => p.vx += d,
                3 => p.vy += d,
                _ => p.m += d,
            }
            hamiltonian(env, veh, &p)
        };
        out[k] = (shifted(h) - shifted(-h)) / (2.0 * h);
    }
    out
}

/// Central finite-difference gradient with respect to the costates
/// `(px, py, pvx, pvy, pm)`.
pub fn hamiltonian_costate_gradient(env: &Environment, veh: &VehicleSpec, s: &AugmentedState) -> [f64; 5] {
    let pr = s.px.hypot(s.py);
    let pv = s.pvx.hypot(s.pvy);
    let steps = [1e-4 * pr, 1e-4 * pr, 1e-4 * pv, 1e-4 * pv, 1e-4 * s.pm.abs().max(1e-3)];
    let mut out = [0.0; 5];
    for (k, h) in steps.into_iter().enumerate() {
        let shifted = |d: f64| {
            let mut p = *s;
            match k {
                0 => p.px += d,
                1 => p.py += d,
                2 => p.pvx += d,
                3 => p.pvy += d,
                _ => p.pm += d,
            }
            hamiltonian(env, veh, &p)
        };
        out[k] = (shifted(h) - shifted(-h)) / (2.0 * h);
    }
    out
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(f64::MIN_POSITIVE)
}

/// A thrusting state somewhere between LEO and beyond GEO with costates of
/// the magnitudes seen in transfers.
pub fn random_state(rng: &mut impl Rng) -> AugmentedState {
    let r = rng.gen_range(6.8e6..5.0e7);
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    let vc = (lowthrust::dynamics::EARTH_GM / r).sqrt();
    let speed = vc * rng.gen_range(0.7..1.3);
    let gamma = rng.gen_range(-0.3..0.3);
    let dir = th + std::f64::consts::FRAC_PI_2 + gamma;
    AugmentedState {
        t: rng.gen_range(0.0..1e6),
        x: r * th.cos(),
        y: r * th.sin(),
        vx: speed * dir.cos(),
        vy: speed * dir.sin(),
        m: rng.gen_range(700.0..1000.0),
        px: rng.gen_range(-2e-3..2e-3),
        py: rng.gen_range(-2e-3..2e-3),
        pvx: rng.gen_range(-1.0..1.0),
        pvy: rng.gen_range(0.2..1.0),
        pm: rng.gen_range(5.0..20.0),
        thrust_on: true,
    }
}

pub fn seeded_states(seed: u64, n: usize) -> Vec<AugmentedState> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..n).map(|_| random_state(&mut rng)).collect()
}

/// Two-body position and velocity after `dt`, from the classical elements
/// and Kepler's equation solved by Newton iteration (prograde elliptic
/// orbits only).
pub fn kepler_propagate(gm: f64, r0: [f64; 2], v0: [f64; 2], dt: f64) -> ([f64; 2], [f64; 2]) {
    let r = r0[0].hypot(r0[1]);
    let v2 = v0[0] * v0[0] + v0[1] * v0[1];
    let a = 1.0 / (2.0 / r - v2 / gm);
    let h = r0[0] * v0[1] - r0[1] * v0[0];
    assert!(h > 0.0 && a > 0.0, "prograde elliptic orbits only");
    let rv = r0[0] * v0[0] + r0[1] * v0[1];
    // eccentricity vector
    let ex = (v2 - gm / r) * r0[0] / gm - rv * v0[0] / gm;
    let ey = (v2 - gm / r) * r0[1] / gm - rv * v0[1] / gm;
    let e = ex.hypot(ey);
    let omega = ey.atan2(ex);
    let nu0 = r0[1].atan2(r0[0]) - omega;
    let e_anom0 = 2.0 * (((1.0 - e) / (1.0 + e)).sqrt() * (nu0 / 2.0).tan()).atan();
    let m0 = e_anom0 - e * e_anom0.sin();
    let n = (gm / (a * a * a)).sqrt();
    let m = m0 + n * dt;
    let mut big_e = m;
    for _ in 0..50 {
        let f = big_e - e * big_e.sin() - m;
        let step = f / (1.0 - e * big_e.cos());
        big_e -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    let b = a * (1.0 - e * e).sqrt();
    // perifocal frame
    let xp = a * (big_e.cos() - e);
    let yp = b * big_e.sin();
    let rr = a * (1.0 - e * big_e.cos());
    let vxp = -a * n * big_e.sin() * a / rr;
    let vyp = b * n * big_e.cos() * a / rr;
    let (so, co) = omega.sin_cos();
    let rot = |px: f64, py: f64| [co * px - so * py, so * px + co * py];
    (rot(xp, yp), rot(vxp, vyp))
}

/// Coasting state with zero costates, which the integrator treats as pure
/// two-body motion.
pub fn ballistic(t: f64, r: [f64; 2], v: [f64; 2]) -> AugmentedState {
    AugmentedState {
        t,
        x: r[0],
        y: r[1],
        vx: v[0],
        vy: v[1],
        m: 1000.0,
        px: 0.0,
        py: 0.0,
        pvx: 0.0,
        pvy: 0.0,
        pm: 0.0,
        thrust_on: false,
    }
}
