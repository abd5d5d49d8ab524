//! A heavy disk sinks through a closed box of liquid and settles on the
//! bottom. Usage: `falling_disk [t_end] [dx]`.

use sphfsi::scenario::{build_setup, preset, PresetOptions};
use sphfsi::simulation::Simulation;

fn main() -> sphfsi::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let t_end = args.next().unwrap_or(0.3);
    let dx = args.next().unwrap_or(4e-4);
    let cfg = preset("falling_disk", &PresetOptions { dx: Some(dx), seed: None })?;
    let mut sim = Simulation::new(build_setup(&cfg)?)?;
    let id = *sim.body_ids().iter().next().expect("one disk");
    println!("{} particles, dt = {:.3e}", sim.n_particles(), sim.dt);
    println!("{:>8} {:>12} {:>12}", "t", "y", "u_y");
    let mut next = 0.0;
    while sim.time < t_end {
        if sim.time >= next {
            let b = sim.body(id).expect("disk alive");
            println!("{:>8.3} {:>12.5e} {:>12.5e}", sim.time, b.com[1], b.velocity[1]);
            next += 0.02;
        }
        sim.step()?;
    }
    Ok(())
}
