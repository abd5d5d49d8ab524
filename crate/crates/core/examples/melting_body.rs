//! A cold metal disk sits in hot gas inside heated walls. It melts, then
//! the walls are switched cold and the melt solidifies again. Prints the
//! phase inventory and the transition events.

use std::path::Path;

use sphfsi::model::ScenarioConfig;
use sphfsi::scenario::build_setup;
use sphfsi::simulation::Simulation;
use sphfsi::transition::Direction;

const SCENARIO: &str = r#"
name = "melting_body"
dimension = 2
discretization = { dx = 0.05 }
domain = { min = [-0.15, -0.15, 0.0], max = [1.15, 1.15, 0.0] }
time = { t_end = 4.0, expected_max_velocity = 0.0 }

[[materials]]
name = "gas"
reference_density = 1.0
kinematic_viscosity = 0.05
heat_capacity = 1.0
conductivity = 1.0
speed_of_sound = 10.0
background_pressure = 100.0

[[materials]]
name = "melt"
reference_density = 1.0
kinematic_viscosity = 0.05
heat_capacity = 1.0
conductivity = 1.0
speed_of_sound = 10.0
background_pressure = 100.0
transition = { field = "temperature", threshold = 50.0, into = "metal" }

[[materials]]
name = "metal"
reference_density = 1.0
heat_capacity = 1.0
conductivity = 1.0
transition = { field = "temperature", threshold = 50.0, into = "melt" }

[[materials]]
name = "wall"
reference_density = 1.0
heat_capacity = 1.0
conductivity = 1.0

[[fluids]]
material = "gas"
temperature = 50.0
shape = { type = "box", min = [0.0, 0.0, 0.0], max = [1.0, 1.0, 0.0] }

[[bodies]]
material = "metal"
temperature = 25.0
shape = { type = "circle", center = [0.5, 0.5], radius = 0.15 }

[[walls]]
name = "box"
material = "wall"
shape = { type = "shell", min = [0.0, 0.0, 0.0], max = [1.0, 1.0, 0.0] }

[[dirichlet]]
name = "box"
field = "temperature"
target = { wall = "box" }
schedule = [{ until = 1.5, value = 100.0 }, { until = inf, value = 0.0 }]
"#;

fn main() -> sphfsi::Result<()> {
    let cfg = ScenarioConfig::from_toml_str(SCENARIO, Path::new("melting_body.toml"))?;
    let mut sim = Simulation::new(build_setup(&cfg)?)?;
    let mass0 = sim.total_mass();
    let (mut melted, mut solidified) = (0usize, 0usize);
    let mut next = 0.0;
    while sim.time < cfg.time.t_end {
        sim.step()?;
        for e in &sim.events {
            match e.direction {
                Direction::Melt => melted += 1,
                Direction::Solidify => solidified += 1,
            }
        }
        if sim.time >= next {
            let ps = sim.particles();
            let rigid = ps.iter().filter(|p| p.tag.is_rigid()).count();
            let (t_lo, t_hi) = sim.scalar_range(sphfsi::model::ScalarField::Temperature);
            println!(
                "t = {:.2}: {} bodies, {rigid} rigid particles, T in [{t_lo:.1}, {t_hi:.1}], events so far {melted} melt / {solidified} solidify",
                sim.time,
                sim.bodies.len()
            );
            next += 0.25;
        }
    }
    println!("mass drift {:.1e}", (sim.total_mass() - mass0) / mass0);
    Ok(())
}
