//! File-level commands behind the `lowthrust` binary.
//!
//! Every command reads a scenario file (see [`crate::config`]) and writes
//! plain CSV/JSON into an output directory. Floats are written in Rust's
//! shortest round-trip decimal form, so repeated runs produce identical
//! bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, ReferenceValues, ScenarioConfig};
use crate::dynamics::{optimal_thrust_direction, sun_angle, Environment, DAY};
use crate::error::TransferError;
use crate::orbital::elements_from_state;
use crate::propagation::{propagate, StopCondition, Trajectory};
use crate::solver::{solve_with_report, summarize, SolveResult, TransferProblem};

pub const TRAJECTORY_COLUMNS: [&str; 16] = [
    "t_s",
    "x_m",
    "y_m",
    "vx_ms",
    "vy_ms",
    "m_kg",
    "px",
    "py",
    "pvx",
    "pvy",
    "pm",
    "eps",
    "alpha_sun_rad",
    "apogee_alt_m",
    "perigee_alt_m",
    "thrust_angle_to_velocity_rad",
];

pub const EVENT_COLUMNS: [&str; 5] = ["t_s", "kind", "mu_mult", "dpx", "dpy"];

pub const TABLE_COLUMNS: [&str; 17] = [
    "scenario",
    "thrust_n",
    "perigee_local_time_h",
    "eclipses",
    "status",
    "m_f_kg",
    "t_f_days",
    "delta_v_ms",
    "revolutions",
    "eclipse_hours",
    "apogee_miss_km",
    "evaluations",
    "m_f_dev_pct",
    "t_f_dev_pct",
    "delta_v_dev_pct",
    "revolutions_dev_pct",
    "eclipse_hours_dev_pct",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failure: {0}")]
    Solver(#[from] TransferError),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    /// 1 for solver failures, 2 for bad input or unusable paths.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) => 1,
            CliError::Config(_) | CliError::Output { .. } => 2,
        }
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub theta_v_deg: f64,
    pub theta_n_deg: f64,
    pub t_f_days: f64,
    pub m_f_kg: f64,
    pub delta_v_ms: f64,
    pub revolutions: u32,
    pub eclipse_hours: f64,
    pub objective_m2: f64,
    pub evaluations: usize,
    pub stop_kind: String,
}

impl From<&SolveResult> for Summary {
    fn from(r: &SolveResult) -> Self {
        Summary {
            theta_v_deg: r.theta_v.to_degrees(),
            theta_n_deg: r.theta_n.to_degrees(),
            t_f_days: r.t_f / DAY,
            m_f_kg: r.m_f,
            delta_v_ms: r.delta_v,
            revolutions: r.revolutions,
            eclipse_hours: r.eclipse_time / 3600.0,
            objective_m2: r.objective,
            evaluations: r.evaluations,
            stop_kind: r.stop.kind.label().to_string(),
        }
    }
}

fn output_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output { path: path.display().to_string(), message: e.to_string() }
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| output_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| output_err(path, e))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| output_err(dir, e))
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Signed angle from the velocity to the thrust direction, rad.
fn thrust_angle(s: &crate::dynamics::AugmentedState) -> f64 {
    match optimal_thrust_direction(s) {
        Ok([ux, uy]) => (s.vx * uy - s.vy * ux).atan2(s.vx * ux + s.vy * uy),
        Err(_) => f64::NAN,
    }
}

pub fn trajectory_csv(env: &Environment, traj: &Trajectory) -> Vec<u8> {
    let rows = traj.samples.iter().map(|s| {
        let (apo, peri) = match elements_from_state(env, s.x, s.y, s.vx, s.vy) {
            Ok(el) => (el.apogee_alt, el.perigee_alt),
            Err(_) => (f64::NAN, f64::NAN),
        };
        [
            s.t,
            s.x,
            s.y,
            s.vx,
            s.vy,
            s.m,
            s.px,
            s.py,
            s.pvx,
            s.pvy,
            s.pm,
            s.eps(),
            sun_angle(env, s.t),
            apo,
            peri,
            thrust_angle(s),
        ]
        .into_iter()
        .map(num)
        .collect()
    });
    csv_bytes(&TRAJECTORY_COLUMNS, rows)
}

pub fn events_csv(traj: &Trajectory) -> Vec<u8> {
    let rows = traj.events.iter().map(|e| {
        let kind = if e.is_entry() { "entry" } else { "exit" };
        vec![num(e.t_d), kind.to_string(), num(e.mu_mult), num(e.dpx), num(e.dpy)]
    });
    csv_bytes(&EVENT_COLUMNS, rows)
}

pub fn summary_json(summary: &Summary) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(summary).expect("summary is plain data");
    text.push('\n');
    text.into_bytes()
}

fn write_run(dir: &Path, env: &Environment, traj: &Trajectory, summary: &Summary) -> Result<(), CliError> {
    ensure_dir(dir)?;
    write_atomic(&dir.join("trajectory.csv"), &trajectory_csv(env, traj))?;
    write_atomic(&dir.join("events.csv"), &events_csv(traj))?;
    write_atomic(&dir.join("summary.json"), &summary_json(summary))
}

/// Solves the scenario and writes `summary.json`, `trajectory.csv` and
/// `events.csv` into `out_dir`.
pub fn run_solve(config_path: &Path, out_dir: &Path) -> Result<SolveResult, CliError> {
    let problem = ScenarioConfig::load(config_path)?.to_problem()?;
    let (result, _, traj) = solve_with_report(&problem)?;
    write_run(out_dir, &problem.env, &traj, &Summary::from(&result))?;
    Ok(result)
}

/// Propagates once at the given angles and writes the same three files;
/// the summary records one evaluation.
pub fn run_propagate(
    config_path: &Path,
    theta_v_deg: f64,
    theta_n_deg: f64,
    out_dir: &Path,
) -> Result<(SolveResult, Trajectory), CliError> {
    let problem = ScenarioConfig::load(config_path)?.to_problem()?;
    let (tv, tn) = (theta_v_deg.to_radians(), theta_n_deg.to_radians());
    let (traj, stop) = propagate(&problem, tv, tn)?;
    let result = summarize(&problem, tv, tn, &traj, &stop, 1);
    write_run(out_dir, &problem.env, &traj, &Summary::from(&result))?;
    Ok((result, traj))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub scenario: String,
    pub thrust_n: Option<f64>,
    pub perigee_local_time_h: Option<f64>,
    pub eclipses: Option<bool>,
    pub outcome: Result<SolveResult, String>,
    pub apogee_miss_km: Option<f64>,
    pub reference: Option<ReferenceValues>,
}

/// Relative deviation in percent, when a reference exists.
pub fn percent_deviation(value: f64, reference: Option<f64>) -> Option<f64> {
    reference.filter(|r| *r != 0.0).map(|r| 100.0 * (value - r) / r)
}

impl TableRow {
    fn cells(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        let mut cells = vec![
            self.scenario.clone(),
            opt(self.thrust_n),
            opt(self.perigee_local_time_h),
            self.eclipses.map(|e| e.to_string()).unwrap_or_default(),
        ];
        match &self.outcome {
            Ok(r) => {
                let s = Summary::from(r);
                let rf = self.reference.clone().unwrap_or_default();
                let revs = f64::from(s.revolutions);
                cells.extend([
                    "ok".to_string(),
                    num(s.m_f_kg),
                    num(s.t_f_days),
                    num(s.delta_v_ms),
                    s.revolutions.to_string(),
                    num(s.eclipse_hours),
                    opt(self.apogee_miss_km),
                    s.evaluations.to_string(),
                    opt(percent_deviation(s.m_f_kg, rf.m_f_kg)),
                    opt(percent_deviation(s.t_f_days, rf.t_f_days)),
                    opt(percent_deviation(s.delta_v_ms, rf.delta_v_ms)),
                    opt(percent_deviation(revs, rf.revolutions)),
                    opt(percent_deviation(s.eclipse_hours, rf.eclipse_hours)),
                ]);
            }
            Err(msg) => {
                cells.push(msg.clone());
                cells.resize(TABLE_COLUMNS.len(), String::new());
            }
        }
        cells
    }
}

pub fn table_csv(rows: &[TableRow]) -> Vec<u8> {
    csv_bytes(&TABLE_COLUMNS, rows.iter().map(TableRow::cells))
}

/// Largest minus smallest final mass over the solved rows.
pub fn mass_spread(rows: &[TableRow]) -> Option<f64> {
    let masses: Vec<f64> = rows.iter().filter_map(|r| r.outcome.as_ref().ok().map(|s| s.m_f)).collect();
    let max = masses.iter().copied().reduce(f64::max)?;
    let min = masses.iter().copied().reduce(f64::min)?;
    Some(max - min)
}

fn solve_row(path: &Path) -> TableRow {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let config = match ScenarioConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            return TableRow {
                scenario: stem,
                thrust_n: None,
                perigee_local_time_h: None,
                eclipses: None,
                outcome: Err(format!("config error: {e}")),
                apogee_miss_km: None,
                reference: None,
            }
        }
    };
    let mut row = TableRow {
        scenario: config.label(path),
        thrust_n: Some(config.vehicle.thrust_n),
        perigee_local_time_h: Some(config.environment.perigee_local_time_h),
        eclipses: Some(config.environment.eclipses),
        outcome: Err(String::new()),
        apogee_miss_km: None,
        reference: config.reference.clone(),
    };
    row.outcome = match config.to_problem() {
        Err(e) => Err(format!("config error: {e}")),
        Ok(problem) => match crate::solver::solve(&problem) {
            Ok(r) => {
                row.apogee_miss_km = Some(r.objective.sqrt() / 1e3);
                Ok(r)
            }
            Err(e) => Err(format!("solver failure: {e}")),
        },
    };
    row
}

/// Scenario files of a table directory, sorted by file name.
pub fn scenario_files(config_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(config_dir).map_err(|e| {
        CliError::Config(ConfigError::Io { path: config_dir.display().to_string(), message: e.to_string() })
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    pub scenarios: usize,
    pub solved: usize,
    pub mass_spread_kg: Option<f64>,
}

/// Solves every `*.toml` scenario in `config_dir` in file-name order and
/// writes `table.csv` and `table_summary.json`. A failing scenario becomes a
/// row with its error in the `status` column; the batch goes on.
pub fn run_table(config_dir: &Path, out_dir: &Path) -> Result<Vec<TableRow>, CliError> {
    let files = scenario_files(config_dir)?;
    let rows: Vec<TableRow> = files.iter().map(|p| solve_row(p)).collect();
    ensure_dir(out_dir)?;
    write_atomic(&out_dir.join("table.csv"), &table_csv(&rows))?;
    let summary = TableSummary {
        scenarios: rows.len(),
        solved: rows.iter().filter(|r| r.outcome.is_ok()).count(),
        mass_spread_kg: mass_spread(&rows),
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("plain data");
    text.push('\n');
    write_atomic(&out_dir.join("table_summary.json"), text.as_bytes())?;
    Ok(rows)
}

/// Exit status of a finished table: 0 when every row solved, 2 when some
/// scenario file was unusable, 1 otherwise.
pub fn table_exit_code(rows: &[TableRow]) -> i32 {
    let config_failure = rows.iter().any(|r| matches!(&r.outcome, Err(m) if m.starts_with("config error")));
    let solver_failure = rows.iter().any(|r| r.outcome.is_err());
    if config_failure {
        2
    } else if solver_failure {
        1
    } else {
        0
    }
}

/// Convenience for callers that already hold a problem, e.g. examples.
pub fn write_solution(out_dir: &Path, problem: &TransferProblem, result: &SolveResult, traj: &Trajectory) -> Result<(), CliError> {
    write_run(out_dir, &problem.env, traj, &Summary::from(result))
}

/// Stop label plus time in days, for one-line reports.
pub fn describe_stop(stop: &StopCondition) -> String {
    format!("{} at {:.4} d", stop.kind.label(), stop.t_stop / DAY)
}
