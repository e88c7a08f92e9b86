//! Propagates one transfer at fixed costate angles and writes the
//! trajectory and event files.
//!
//! cargo run --example propagate_transfer -- [thrust_n] [theta_v_deg] [theta_n_deg] [out_dir]

use std::path::PathBuf;

use lowthrust::cli::{events_csv, trajectory_csv};
use lowthrust::dynamics::DAY;
use lowthrust::orbital::elements_of;
use lowthrust::propagation::propagate;
use lowthrust::solver::TransferProblem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, default: f64| args.get(i).map_or(Ok(default), |s| s.parse::<f64>());
    let thrust = num(0, 10.0)?;
    let (tv, tn) = (num(1, 1.495)?, num(2, -1.2415)?);
    let out = PathBuf::from(args.get(3).map_or("out/propagate_transfer", String::as_str));

    let problem = TransferProblem::gto_to_geo(thrust, 0.0, true);
    let (traj, stop) = propagate(&problem, tv.to_radians(), tn.to_radians())?;
    let last = traj.final_state();
    let el = elements_of(&problem.env, last)?;
    println!("stop: {:?} at {:.3} d", stop.kind, stop.t_stop / DAY);
    println!("final mass {:.2} kg, {} revolutions, {} shadow crossings", last.m, traj.revolutions, traj.events.len());
    println!("apogee {:.0} km, perigee {:.0} km", el.apogee_alt / 1e3, el.perigee_alt / 1e3);
    println!("thrusting {:.2} h, in shadow {:.2} h", traj.thrust_time / 3600.0, traj.eclipse_time / 3600.0);

    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("trajectory.csv"), trajectory_csv(&problem.env, &traj))?;
    std::fs::write(out.join("events.csv"), events_csv(&traj))?;
    println!("wrote {} samples to {}", traj.samples.len(), out.display());
    Ok(())
}
