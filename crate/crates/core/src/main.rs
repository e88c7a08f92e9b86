use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lowthrust::cli::{describe_stop, run_propagate, run_solve, run_table, table_exit_code, CliError};

#[derive(Parser)]
#[command(name = "lowthrust", version, about = "Minimum-time low-thrust transfers with eclipses")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the two costate angles and write the best transfer.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Propagate once at fixed costate angles.
    Propagate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta_v_deg: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta_n_deg: f64,
    },
    /// Solve every scenario file of a directory into table.csv.
    Table {
        /// Directory of scenario files.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    match Args::parse().command {
        Command::Solve { config, out } => match run_solve(&config, &out) {
            Ok(r) => {
                println!(
                    "t_f = {:.4} d, m_f = {:.3} kg, {} revolutions, eclipse {:.2} h, {}",
                    r.t_f / 86400.0,
                    r.m_f,
                    r.revolutions,
                    r.eclipse_time / 3600.0,
                    describe_stop(&r.stop)
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Propagate { config, out, theta_v_deg, theta_n_deg } => {
            match run_propagate(&config, theta_v_deg, theta_n_deg, &out) {
                Ok((r, traj)) => {
                    println!("{}, {} samples, {} shadow events", describe_stop(&r.stop), traj.samples.len(), traj.events.len());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Table { config, out } => match run_table(&config, &out) {
            Ok(rows) => {
                for row in &rows {
                    match &row.outcome {
                        Ok(r) => println!("{}: t_f = {:.3} d, m_f = {:.2} kg", row.scenario, r.t_f / 86400.0, r.m_f),
                        Err(msg) => println!("{}: {msg}", row.scenario),
                    }
                }
                ExitCode::from(table_exit_code(&rows) as u8)
            }
            Err(e) => fail(e),
        },
    }
}
