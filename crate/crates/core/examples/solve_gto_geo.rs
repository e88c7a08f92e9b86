//! Searches the two costate angles for a GTO to GEO transfer and reports
//! the best solution.
//!
//! cargo run --release --example solve_gto_geo -- [thrust_n] [perigee_local_time_h] [max_evals]

use std::time::Instant;

use lowthrust::dynamics::DAY;
use lowthrust::solver::{solve_with_report, TransferProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let thrust: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(10.0);
    let lt: f64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(0.0);
    let mut problem = TransferProblem::gto_to_geo(thrust, lt, true);
    if let Some(n) = args.get(2) {
        problem.max_evals = n.parse()?;
    }

    let start = Instant::now();
    let (r, report, traj) = solve_with_report(&problem)?;
    println!("{thrust} N, perigee local time {lt} h, {} evaluations in {:.1} s", r.evaluations, start.elapsed().as_secs_f64());
    println!("theta_v {:.4} deg, theta_n {:.4} deg", r.theta_v.to_degrees(), r.theta_n.to_degrees());
    println!("final time    {:.3} d", r.t_f / DAY);
    println!("final mass    {:.2} kg", r.m_f);
    println!("delta-v       {:.1} m/s", r.delta_v);
    println!("revolutions   {}", r.revolutions);
    println!("eclipse       {:.2} h over {} crossings", r.eclipse_time / 3600.0, traj.events.len());
    println!("apogee miss   {:.0} km", r.objective.sqrt() / 1e3);
    println!("search improved {} times", report.history.len());
    Ok(())
}
