//! Walks one GTO revolution, prints where the vehicle enters and leaves the
//! cylindrical shadow, and shows the position-costate jump at each crossing.
//!
//! cargo run --example eclipse_geometry -- [perigee_local_time_h]

use lowthrust::dynamics::{apply_costate_jump, in_eclipse, shadow_constraint, shadow_constraint_rate, Environment, VehicleSpec};
use lowthrust::guess::build_guess;
use lowthrust::orbital::{initial_state, local_time_to_alpha0, OrbitSpec};
use lowthrust::propagation::{IntegratorSettings, Propagator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lt: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(12.0);
    let env = Environment::earth(local_time_to_alpha0(lt), true);
    let vehicle = VehicleSpec::from_isp(1000.0, 1.0, 1500.0)?;
    let orbit = OrbitSpec::new(36_000e3, 500e3)?;
    let start = initial_state(&env, &orbit, vehicle.m0)?;
    let guess = build_guess(&env, &vehicle, start.radius(), 0.0, 0.0)?;
    let mut s = guess.apply(&start);
    s.thrust_on = !in_eclipse(&env, s.x, s.y, s.t);

    let settings = IntegratorSettings::for_vehicle(&vehicle);
    let prop = Propagator::new(&env, &vehicle, &settings);
    println!("perigee local time {lt} h, starts {}", if s.thrust_on { "in sunlight" } else { "in shadow" });
    println!("{:>10} {:>6} {:>12} {:>12} {:>12} {:>12}", "t_s", "kind", "psi_km", "psi_dot", "dpx", "dpy");
    while s.t < 11.0 * 3600.0 {
        let next = prop.advance(&s, 600.0)?;
        match prop.detect_boundary_crossing(&s, &next)? {
            Some(at) => {
                let delta_eps = if at.thrust_on { -1 } else { 1 };
                let (after, ev) = apply_costate_jump(&env, &vehicle, &at, delta_eps)?;
                println!(
                    "{:>10.1} {:>6} {:>12.3} {:>12.3} {:>12.3e} {:>12.3e}",
                    at.t,
                    if ev.is_entry() { "entry" } else { "exit" },
                    shadow_constraint(&env, at.x, at.y, at.t) / 1e3,
                    shadow_constraint_rate(&env, &at),
                    ev.dpx,
                    ev.dpy
                );
                s = after;
            }
            None => s = next,
        }
    }
    Ok(())
}
