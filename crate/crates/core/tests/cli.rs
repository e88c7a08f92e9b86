use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lowthrust::cli::{Summary, EVENT_COLUMNS, TABLE_COLUMNS, TRAJECTORY_COLUMNS};
use lowthrust::config::ScenarioConfig;
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lowthrust"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn read_summary(dir: &Path) -> Summary {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

const BASE: &str = r#"
[vehicle]
m0_kg = 1000.0
thrust_n = 1.0
ve_ms = 14710.0

[orbit]
initial_apogee_km = 36000.0
initial_perigee_km = 500.0
target_apogee_km = 36000.0
target_perigee_km = 36000.0

[environment]
perigee_local_time_h = 0.0
eclipses = true
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn missing_key_exits_2_naming_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", &BASE.replace("thrust_n = 1.0\n", ""));
    let out = run(&["solve", "--config", s(&cfg), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("thrust_n"), "{err}");
    assert!(err.contains("line"), "{err}");
}

#[test]
fn unreadable_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", s(&tmp.path().join("nope.toml")), "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flag_exits_2() {
    let out = run(&["solve", "--config"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn imaginary_costate_rate_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", BASE);
    let out = run(&[
        "propagate", "--config", s(&cfg), "--out", s(&tmp.path().join("o")), "--theta-v-deg", "40", "--theta-n-deg", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("imaginary"));
}

#[test]
fn zero_thrust_propagation_is_a_closed_ellipse() {
    let tmp = tempfile::tempdir().unwrap();
    let text = BASE.replace("thrust_n = 1.0", "thrust_n = 0.0") + "\n[integrator]\nmax_time_days = 3.0\n";
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let out_dir = tmp.path().join("o");
    let out = run(&["propagate", "--config", s(&cfg), "--out", s(&out_dir), "--theta-v-deg", "0", "--theta-n-deg", "-0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_summary(&out_dir).stop_kind, "max_time");
    let (header, rows) = read_csv(&out_dir.join("trajectory.csv"));
    assert_eq!(header, TRAJECTORY_COLUMNS);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let apo: Vec<f64> = rows.iter().map(|r| r[col("apogee_alt_m")].parse().unwrap()).collect();
    let peri: Vec<f64> = rows.iter().map(|r| r[col("perigee_alt_m")].parse().unwrap()).collect();
    for (a, p) in apo.iter().zip(&peri) {
        assert!((a - apo[0]).abs() < 1.0 && (p - peri[0]).abs() < 1.0);
    }
    let m: Vec<f64> = rows.iter().map(|r| r[col("m_kg")].parse().unwrap()).collect();
    assert!(m.iter().all(|&x| x == 1000.0));
    let last_t: f64 = rows.last().unwrap()[col("t_s")].parse().unwrap();
    assert_eq!(last_t, 3.0 * 86400.0);
}

#[test]
fn solve_outputs_are_stable_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("gto_10n/lt00.toml");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = run(&["solve", "--config", s(&cfg), "--out", s(dir)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["summary.json", "trajectory.csv", "events.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }

    let text = fs::read_to_string(a.join("summary.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
    let mut expected = vec![
        "theta_v_deg", "theta_n_deg", "t_f_days", "m_f_kg", "delta_v_ms", "revolutions", "eclipse_hours",
        "objective_m2", "evaluations", "stop_kind",
    ];
    expected.sort_unstable();
    assert_eq!(keys, expected);
    let order: Vec<usize> = ["theta_v_deg", "t_f_days", "evaluations", "stop_kind"].iter().map(|k| text.find(k).unwrap()).collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));

    let summary = read_summary(&a);
    assert_eq!(summary.stop_kind, "perigee_reached");
    assert!((summary.t_f_days - 2.42).abs() < 0.03 * 2.42);

    let (header, rows) = read_csv(&a.join("events.csv"));
    assert_eq!(header, EVENT_COLUMNS);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[1] == "entry" || r[1] == "exit"));

    let (header, rows) = read_csv(&a.join("trajectory.csv"));
    assert_eq!(header, TRAJECTORY_COLUMNS);
    let last_t: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert_eq!(last_t / 86400.0, summary.t_f_days);

    // propagating at the reported angles gives the same final time
    let c = tmp.path().join("c");
    let out = run(&[
        "propagate",
        "--config",
        s(&cfg),
        "--out",
        s(&c),
        "--theta-v-deg",
        &summary.theta_v_deg.to_string(),
        "--theta-n-deg",
        &summary.theta_n_deg.to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let again = read_summary(&c);
    assert!((again.t_f_days - summary.t_f_days).abs() * 86400.0 < 1e-3);
    assert!((again.m_f_kg - summary.m_f_kg).abs() < 1e-6);
}

#[test]
fn gto_1n_solve_matches_published_duration() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", s(&configs().join("gto_1n/lt00.toml")), "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(0));
    let summary = read_summary(tmp.path());
    assert!((summary.t_f_days - 23.63).abs() < 0.02 * 23.63, "{}", summary.t_f_days);
}

#[test]
fn empty_table_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let (cfg, out_dir) = (tmp.path().join("cfg"), tmp.path().join("out"));
    fs::create_dir(&cfg).unwrap();
    let out = run(&["table", "--config", s(&cfg), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&out_dir.join("table.csv"));
    assert_eq!(header, TABLE_COLUMNS);
    assert!(rows.is_empty());
}

#[test]
fn table_rows_deviations_and_mass_spread() {
    let tmp = tempfile::tempdir().unwrap();
    let (cfg, out_dir) = (tmp.path().join("cfg"), tmp.path().join("out"));
    fs::create_dir(&cfg).unwrap();
    fs::copy(configs().join("gto_10n/lt00.toml"), cfg.join("a_10n.toml")).unwrap();
    fs::copy(configs().join("gto_1n/lt00.toml"), cfg.join("b_1n.toml")).unwrap();
    write_config(&cfg, "c_broken.toml", "this is = = not toml");
    let out = run(&["table", "--config", s(&cfg), "--out", s(&out_dir)]);
    // the batch finishes and records the broken file
    assert_eq!(out.status.code(), Some(2));
    let (header, rows) = read_csv(&out_dir.join("table.csv"));
    assert_eq!(header, TABLE_COLUMNS);
    assert_eq!(rows.len(), 3);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows[0][col("status")], "ok");
    assert_eq!(rows[1][col("status")], "ok");
    assert!(rows[2][col("status")].starts_with("config error"));
    for row in &rows[..2] {
        let t: f64 = row[col("t_f_days")].parse().unwrap();
        let dev: f64 = row[col("t_f_dev_pct")].parse().unwrap();
        let reference = t / (1.0 + dev / 100.0);
        assert!([2.42, 23.63].iter().any(|r| (reference - r).abs() < 1e-9));
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("table_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["solved"], 2);
    assert!(summary["mass_spread_kg"].as_f64().unwrap() < 15.0);
}

#[test]
fn shipped_configs_parse() {
    for dir in ["gto_10n", "gto_1n", "gto_0p1n", "leo_1n"] {
        let files = lowthrust::cli::scenario_files(&configs().join(dir)).unwrap();
        assert!(!files.is_empty());
        for f in files {
            let c = ScenarioConfig::load(&f).unwrap();
            c.to_problem().unwrap();
            if f.file_stem().unwrap().to_str().unwrap().starts_with("lt") {
                assert!(c.reference.is_some(), "{}", f.display());
            }
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn user_units_round_trip(
        m0 in 100.0..5000.0f64,
        thrust in 0.01..50.0f64,
        isp in 300.0..5000.0f64,
        use_isp in any::<bool>(),
        apo in 1000.0..80000.0f64,
        peri_frac in 0.01..1.0f64,
        lt in 0.0..24.0f64,
        step in 100.0..3000.0f64,
        max_days in 1.0..400.0f64,
        half_width in 1.0..30.0f64,
    ) {
        let peri = 200.0 + peri_frac * (apo - 200.0);
        let (isp_line, ve) = if use_isp { (format!("isp_s = {isp}"), None) } else { (format!("ve_ms = {}", isp * 9.80665), Some(isp * 9.80665)) };
        let text = format!(
            "[vehicle]\nm0_kg = {m0}\nthrust_n = {thrust}\n{isp_line}\n\
             [orbit]\ninitial_apogee_km = {apo}\ninitial_perigee_km = {peri}\ntarget_apogee_km = 90000.0\ntarget_perigee_km = 90000.0\n\
             [environment]\nperigee_local_time_h = {lt}\neclipses = false\n\
             [integrator]\nmacro_step_s = {step}\nevent_tol_s = 10.0\nmax_time_days = {max_days}\n\
             [search]\nbox_half_width_deg = {half_width}\nmax_evals = 77\n"
        );
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        let p = c.to_problem().unwrap();
        if let Some(ve) = ve {
            prop_assert_eq!(p.vehicle.ve, ve);
        }
        let back = c.reemit(&p);
        prop_assert!(rel(back.vehicle.m0_kg, m0) < 1e-12);
        prop_assert!(rel(back.vehicle.thrust_n, thrust) < 1e-12);
        if use_isp {
            prop_assert!(rel(back.vehicle.isp_s.unwrap(), isp) < 1e-12);
        } else {
            prop_assert!(rel(back.vehicle.ve_ms.unwrap(), isp * 9.80665) < 1e-12);
        }
        prop_assert!(rel(back.orbit.initial_apogee_km, apo) < 1e-12);
        prop_assert!(rel(back.orbit.initial_perigee_km, peri) < 1e-12);
        // local time is periodic; compare through the Sun angle
        prop_assert!((back.environment.perigee_local_time_h - lt).abs() < 1e-12 * 24.0);
        prop_assert!(rel(back.integrator.macro_step_s.unwrap(), step) < 1e-12);
        prop_assert!(rel(back.integrator.max_time_days.unwrap(), max_days) < 1e-12);
        prop_assert!(rel(back.search.box_half_width_deg.unwrap(), half_width) < 1e-12);
        prop_assert_eq!(back.search.max_evals, Some(77));
        // and the re-emitted file parses to the same problem
        let again = ScenarioConfig::from_toml_str(&back.to_toml_string()).unwrap().to_problem().unwrap();
        prop_assert!(rel(again.vehicle.ve, p.vehicle.ve) < 1e-12);
        prop_assert!(rel(again.initial_orbit.perigee_alt, p.initial_orbit.perigee_alt) < 1e-12);
    }
}
