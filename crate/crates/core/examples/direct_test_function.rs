//! DIRECT on the Branin function, a standard global-optimization test with
//! three global minima of value 0.397887.
//!
//! cargo run --example direct_test_function -- [max_evals]

use std::f64::consts::PI;

use lowthrust::direct::{direct_minimize, SearchBox};

fn branin(x: &[f64]) -> f64 {
    let (a, b, c) = (1.0, 5.1 / (4.0 * PI * PI), 5.0 / PI);
    let (r, s, t) = (6.0, 10.0, 1.0 / (8.0 * PI));
    a * (x[1] - b * x[0] * x[0] + c * x[0] - r).powi(2) + s * (1.0 - t) * x[0].cos() + s
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(500);
    let bounds = SearchBox::new(vec![-5.0, 0.0], vec![10.0, 15.0])?;
    let report = direct_minimize(branin, bounds, budget, 1e-4)?;
    println!("best f = {:.6} at ({:.4}, {:.4})", report.best_value, report.best_point[0], report.best_point[1]);
    println!("{} evaluations over {} iterations", report.evaluations, report.iterations);
    println!("improvements:");
    for (evals, value) in &report.history {
        println!("  {evals:>6} {value:.6}");
    }
    Ok(())
}
