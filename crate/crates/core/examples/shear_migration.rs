//! A neutrally buoyant disk in plane Couette flow drifts toward the
//! centerline. Usage: `shear_migration [t_end] [dx]`.

use sphfsi::scenario::{build_setup, preset, PresetOptions};
use sphfsi::simulation::Simulation;

fn main() -> sphfsi::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let t_end = args.next().unwrap_or(5.0);
    let dx = args.next().unwrap_or(4e-4);
    let cfg = preset("shear_migration", &PresetOptions { dx: Some(dx), seed: None })?;
    let mut sim = Simulation::new(build_setup(&cfg)?)?;
    let id = *sim.body_ids().iter().next().expect("one disk");
    println!("{} particles, dt = {:.3e}", sim.n_particles(), sim.dt);
    println!("{:>8} {:>12} {:>12} {:>10}", "t", "r_y", "u_x", "omega");
    let mut next = 0.0;
    while sim.time < t_end {
        if sim.time >= next {
            let b = sim.body(id).expect("disk alive");
            println!("{:>8.3} {:>12.5e} {:>12.5e} {:>10.4}", sim.time, b.com[1], b.velocity[0], b.angular_velocity[2]);
            next += 0.5;
        }
        sim.step()?;
    }
    Ok(())
}
