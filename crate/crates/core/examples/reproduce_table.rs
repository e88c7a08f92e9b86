//! Solves every scenario file in a directory and writes table.csv with
//! percent deviations from the reference values in each file.
//!
//! cargo run --release --example reproduce_table -- [config_dir] [out_dir]

use std::path::PathBuf;

use lowthrust::cli::{mass_spread, percent_deviation, run_table, table_exit_code};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/gto_10n");
    let dir = args.first().map_or(root, PathBuf::from);
    let out = PathBuf::from(args.get(1).map_or("out/table", String::as_str));

    let rows = match run_table(&dir, &out) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    };
    println!("{:<28} {:>10} {:>9} {:>6} {:>10} {:>12}", "scenario", "t_f_days", "m_f_kg", "revs", "eclipse_h", "t_f_dev_pct");
    for row in &rows {
        match &row.outcome {
            Ok(r) => {
                let reference = row.reference.as_ref().and_then(|v| v.t_f_days);
                let dev = percent_deviation(r.t_f / 86_400.0, reference);
                println!(
                    "{:<28} {:>10.3} {:>9.2} {:>6} {:>10.2} {:>12}",
                    row.scenario,
                    r.t_f / 86_400.0,
                    r.m_f,
                    r.revolutions,
                    r.eclipse_time / 3600.0,
                    dev.map_or("-".into(), |d| format!("{d:+.2}"))
                );
            }
            Err(e) => println!("{:<28} {e}", row.scenario),
        }
    }
    if let Some(spread) = mass_spread(&rows) {
        println!("final-mass spread {spread:.2} kg");
    }
    println!("wrote {}", out.join("table.csv").display());
    std::process::exit(table_exit_code(&rows));
}
