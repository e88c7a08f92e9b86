//! Two-body bookkeeping: osculating apses, the initial perigee state and
//! the rocket equation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{AugmentedState, Environment, VehicleSpec};
use crate::error::{Result, TransferError};

/// Apogee and perigee altitudes above the equatorial radius, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub apogee_alt: f64,
    pub perigee_alt: f64,
}

impl OrbitSpec {
    pub fn new(apogee_alt: f64, perigee_alt: f64) -> Result<Self> {
        let o = Self { apogee_alt, perigee_alt };
        o.validate()?;
        Ok(o)
    }

    pub fn circular(alt: f64) -> Result<Self> {
        Self::new(alt, alt)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.perigee_alt >= 0.0 && self.apogee_alt >= self.perigee_alt && self.apogee_alt.is_finite()) {
            return Err(TransferError::InvalidInput(format!(
                "orbit needs apogee >= perigee >= 0, got {} / {} m",
                self.apogee_alt, self.perigee_alt
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OsculatingElements {
    pub sma: f64,
    pub ecc: f64,
    pub apogee_alt: f64,
    pub perigee_alt: f64,
    pub energy: f64,
}

/// Osculating semi-major axis, eccentricity and apse altitudes.
///
/// The eccentricity comes from the angular momentum,
/// `h^2 = gm a (1 - e^2)`.
pub fn elements_from_state(env: &Environment, x: f64, y: f64, vx: f64, vy: f64) -> Result<OsculatingElements> {
    let r = x.hypot(y);
    if r == 0.0 {
        return Err(TransferError::Singularity);
    }
    let energy = 0.5 * (vx * vx + vy * vy) - env.gm / r;
    if !(energy < 0.0) {
        return Err(TransferError::Unbound { energy });
    }
    let sma = -env.gm / (2.0 * energy);
    let h = x * vy - y * vx;
    let ecc = (1.0 - h * h / (env.gm * sma)).max(0.0).sqrt();
    Ok(OsculatingElements {
        sma,
        ecc,
        apogee_alt: sma * (1.0 + ecc) - env.earth_radius,
        perigee_alt: sma * (1.0 - ecc) - env.earth_radius,
        energy,
    })
}

pub fn elements_of(env: &Environment, s: &AugmentedState) -> Result<OsculatingElements> {
    elements_from_state(env, s.x, s.y, s.vx, s.vy)
}

/// State at the perigee of `orbit`: position on +x, prograde velocity on +y,
/// mass `m0`, zero costates, engine on.
pub fn initial_state(env: &Environment, orbit: &OrbitSpec, m0: f64) -> Result<AugmentedState> {
    orbit.validate()?;
    let rp = env.earth_radius + orbit.perigee_alt;
    let ra = env.earth_radius + orbit.apogee_alt;
    let a = 0.5 * (rp + ra);
    let vp = (env.gm * (2.0 / rp - 1.0 / a)).sqrt();
    Ok(AugmentedState {
        t: 0.0,
        x: rp,
        y: 0.0,
        vx: 0.0,
        vy: vp,
        m: m0,
        px: 0.0,
        py: 0.0,
        pvx: 0.0,
        pvy: 0.0,
        pm: 0.0,
        thrust_on: true,
    })
}

/// Rocket equation `ve ln(m0 / m_final)`.
pub fn delta_v(vehicle: &VehicleSpec, m_final: f64) -> f64 {
    vehicle.ve * (vehicle.m0 / m_final).ln()
}

/// Initial Sun angle for a perigee local time in hours: midnight puts the
/// Sun on -x (above the apogee), noon on +x.
pub fn local_time_to_alpha0(perigee_local_time: f64) -> f64 {
    PI - perigee_local_time * (PI / 12.0)
}

/// Inverse of [`local_time_to_alpha0`].
pub fn alpha0_to_local_time(alpha0: f64) -> f64 {
    (PI - alpha0) * (12.0 / PI)
}
