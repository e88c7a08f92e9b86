//! Scenario files.
//!
//! A scenario is a TOML document in user units, with the unit in every key
//! name:
//!
//! ```toml
//! name = "gto-geo 1 N, LT 0 h"
//!
//! [vehicle]
//! m0_kg = 1000.0
//! thrust_n = 1.0
//! isp_s = 1500.0          # or ve_ms = 14710.0, not both
//!
//! [orbit]
//! initial_apogee_km = 36000.0
//! initial_perigee_km = 500.0
//! target_apogee_km = 36000.0
//! target_perigee_km = 36000.0
//!
//! [environment]
//! perigee_local_time_h = 0.0
//! eclipses = true
//!
//! [integrator]            # optional, every key optional
//! macro_step_s = 1000.0
//! event_tol_s = 10.0
//! max_time_days = 60.0
//! step_mode = "adaptive"  # or "fixed"
//! rtol = 1e-11
//!
//! [search]                # optional, every key optional
//! box_half_width_deg = 10.0
//! max_evals = 3000
//! epsilon = 1e-4
//!
//! [reference]             # optional values for the deviation columns of a table
//! t_f_days = 23.63
//! m_f_kg = 866.4
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{Environment, VehicleSpec, DAY, STANDARD_GRAVITY};
use crate::orbital::{alpha0_to_local_time, local_time_to_alpha0, OrbitSpec};
use crate::propagation::{IntegratorSettings, StepMode};
use crate::solver::TransferProblem;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vehicle: VehicleSection,
    pub orbit: OrbitSection,
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceValues>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSection {
    pub m0_kg: f64,
    pub thrust_n: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isp_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ve_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub initial_apogee_km: f64,
    pub initial_perigee_km: f64,
    pub target_apogee_km: f64,
    pub target_perigee_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub perigee_local_time_h: f64,
    pub eclipses: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepModeName {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub macro_step_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_tol_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_time_days: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_mode: Option<StepModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_half_width_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

/// Published values a solution is compared against.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValues {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_f_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_f_days: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_v_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revolutions: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eclipse_hours: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            ConfigError::Parse(msg) => ConfigError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config is always representable in TOML")
    }

    fn exhaust_velocity(&self) -> Result<f64, ConfigError> {
        match (self.vehicle.isp_s, self.vehicle.ve_ms) {
            (Some(isp), None) => Ok(STANDARD_GRAVITY * isp),
            (None, Some(ve)) => Ok(ve),
            (Some(_), Some(_)) => Err(ConfigError::Invalid("give either vehicle.isp_s or vehicle.ve_ms, not both".into())),
            (None, None) => Err(ConfigError::Invalid("missing key `isp_s` (or `ve_ms`) in [vehicle]".into())),
        }
    }

    /// Converts to SI and validates.
    pub fn to_problem(&self) -> Result<TransferProblem, ConfigError> {
        let vehicle = VehicleSpec { m0: self.vehicle.m0_kg, thrust: self.vehicle.thrust_n, ve: self.exhaust_velocity()? };
        let env = Environment::earth(local_time_to_alpha0(self.environment.perigee_local_time_h), self.environment.eclipses);
        let o = &self.orbit;

        let mut integrator = IntegratorSettings::for_vehicle(&vehicle);
        let i = &self.integrator;
        if let Some(v) = i.macro_step_s {
            integrator.macro_step = v;
        }
        if let Some(v) = i.event_tol_s {
            integrator.event_tol = v;
        }
        if let Some(v) = i.max_time_days {
            integrator.max_time = v * DAY;
        }
        integrator.mode = match (i.step_mode, i.rtol) {
            (Some(StepModeName::Fixed), None) => StepMode::Fixed,
            (Some(StepModeName::Fixed), Some(_)) => {
                return Err(ConfigError::Invalid("integrator.rtol only applies to step_mode = \"adaptive\"".into()))
            }
            (_, Some(rtol)) => StepMode::Adaptive { rtol },
            (_, None) => StepMode::default(),
        };

        let s = &self.search;
        let defaults = TransferProblem::gto_to_geo(vehicle.thrust, 0.0, true);
        let problem = TransferProblem {
            env,
            vehicle,
            initial_orbit: OrbitSpec { apogee_alt: o.initial_apogee_km * 1e3, perigee_alt: o.initial_perigee_km * 1e3 },
            target: OrbitSpec { apogee_alt: o.target_apogee_km * 1e3, perigee_alt: o.target_perigee_km * 1e3 },
            integrator,
            box_half_width: s.box_half_width_deg.map_or(defaults.box_half_width, f64::to_radians),
            max_evals: s.max_evals.unwrap_or(defaults.max_evals),
            epsilon: s.epsilon.unwrap_or(defaults.epsilon),
        };
        problem.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(problem)
    }

    /// Writes `problem` back in user units, keeping the layout of `self`:
    /// the same optional keys are present and the exhaust speed is given the
    /// same way.
    pub fn reemit(&self, problem: &TransferProblem) -> ScenarioConfig {
        let mut out = self.clone();
        let ve = problem.vehicle.ve;
        out.vehicle = VehicleSection {
            m0_kg: problem.vehicle.m0,
            thrust_n: problem.vehicle.thrust,
            isp_s: self.vehicle.isp_s.map(|_| ve / STANDARD_GRAVITY),
            ve_ms: self.vehicle.ve_ms.map(|_| ve),
        };
        out.orbit = OrbitSection {
            initial_apogee_km: problem.initial_orbit.apogee_alt / 1e3,
            initial_perigee_km: problem.initial_orbit.perigee_alt / 1e3,
            target_apogee_km: problem.target.apogee_alt / 1e3,
            target_perigee_km: problem.target.perigee_alt / 1e3,
        };
        out.environment = EnvironmentSection {
            perigee_local_time_h: alpha0_to_local_time(problem.env.alpha0),
            eclipses: problem.env.eclipses_enabled,
        };
        let i = &problem.integrator;
        out.integrator = IntegratorSection {
            macro_step_s: self.integrator.macro_step_s.map(|_| i.macro_step),
            event_tol_s: self.integrator.event_tol_s.map(|_| i.event_tol),
            max_time_days: self.integrator.max_time_days.map(|_| i.max_time / DAY),
            step_mode: self.integrator.step_mode,
            rtol: match (self.integrator.rtol, i.mode) {
                (Some(_), StepMode::Adaptive { rtol }) => Some(rtol),
                _ => None,
            },
        };
        out.search = SearchSection {
            box_half_width_deg: self.search.box_half_width_deg.map(|_| problem.box_half_width.to_degrees()),
            max_evals: self.search.max_evals.map(|_| problem.max_evals),
            epsilon: self.search.epsilon.map(|_| problem.epsilon),
        };
        out
    }

    /// Label used in tables: the `name` key, else the file stem.
    pub fn label(&self, path: &Path) -> String {
        self.name.clone().unwrap_or_else(|| {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        })
    }
}
