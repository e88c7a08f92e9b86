//! Builds the two-angle initial costate and solves the high-thrust pitch
//! equation at the GTO perigee.
//!
//! cargo run --example costate_guess

use lowthrust::dynamics::{switching_function, Environment, VehicleSpec};
use lowthrust::guess::{build_guess, max_pitch, solve_theta0, Branch};
use lowthrust::orbital::{initial_state, OrbitSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let env = Environment::earth(0.0, true);
    let vehicle = VehicleSpec::from_isp(1000.0, 1.0, 1500.0)?;
    let start = initial_state(&env, &OrbitSpec::new(36_000e3, 500e3)?, vehicle.m0)?;
    let (r0, v0) = (start.radius(), start.speed());

    println!("admissible pitch |theta_v| < {:.3} deg", max_pitch().to_degrees());
    for branch in [Branch::Plus, Branch::Minus] {
        match solve_theta0(&env, r0, v0, 0.0, branch) {
            Ok(t) => println!("high-thrust pitch root ({branch:?}): {:.4} deg", t.to_degrees()),
            Err(e) => println!("high-thrust pitch root ({branch:?}): {e}"),
        }
    }
    println!("{:>8} {:>8} {:>12} {:>24} {:>20} {:>10}", "th_v", "th_n", "omega_v", "p_r", "p_v", "switch");
    for (tv, tn) in [(0.0, 0.0), (2.0, -2.0), (-5.0, 5.0), (10.0, 10.0)] {
        let g = build_guess(&env, &vehicle, r0, f64::to_radians(tv), f64::to_radians(tn))?;
        let s = g.apply(&start);
        println!(
            "{tv:>8.1} {tn:>8.1} {:>12.4e} {:>24} {:>20} {:>10.2e}",
            g.omega_v,
            format!("({:.3e}, {:.3e})", g.pr0[0], g.pr0[1]),
            format!("({:.4}, {:.4})", g.pv0[0], g.pv0[1]),
            switching_function(&s, &vehicle)
        );
    }
    match build_guess(&env, &vehicle, r0, 40f64.to_radians(), 0.0) {
        Ok(_) => println!("40 deg accepted"),
        Err(e) => println!("40 deg rejected: {e}"),
    }
    Ok(())
}
