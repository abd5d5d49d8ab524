//! Head-on dry collision of two disks under the spring-dashpot contact
//! model, for several damping coefficients.

use sphfsi::model::{BodySpec, ContactSpec, Discretization, DomainSpec, Material, OutputPlan, ScenarioConfig, Shape, TimeSpec};
use sphfsi::scenario::build_setup;
use sphfsi::simulation::Simulation;

fn disk(x: f64, u: f64) -> BodySpec {
    BodySpec {
        material: "solid".into(),
        shape: Shape::circle([x, 0.0], 0.1),
        velocity: [u, 0.0, 0.0],
        angular_velocity: [0.0; 3],
        mobile: true,
        temperature: 0.0,
        concentration: 0.0,
    }
}

fn main() -> sphfsi::Result<()> {
    println!("{:>8} {:>12} {:>12} {:>12}", "damping", "u_a after", "u_b after", "restitution");
    for damping in [0.0, 0.05, 0.5, 5.0] {
        let cfg = ScenarioConfig {
            name: "collision".into(),
            dimension: 2,
            discretization: Discretization::new(0.02),
            domain: DomainSpec { min: [-1.0, -0.5, 0.0], max: [1.0, 0.5, 0.0], periodic: [false; 3] },
            time: TimeSpec { t_end: 0.8, dt: None, expected_max_velocity: 0.0 },
            workers: 1,
            transport_velocity: true,
            seed: 0,
            contact: Some(ContactSpec { stiffness: 1e3, damping }),
            output: OutputPlan::default(),
            materials: vec![Material::new("solid", 1.0)],
            fluids: vec![],
            bodies: vec![disk(-0.2, 0.5), disk(0.2, -0.3)],
            walls: vec![],
            dirichlet: vec![],
            open_boundaries: vec![],
        };
        let mut sim = Simulation::new(build_setup(&cfg)?)?;
        sim.run_until(cfg.time.t_end)?;
        let ids: Vec<_> = sim.body_ids().into_iter().collect();
        let ua = sim.body(ids[0]).expect("body").velocity[0];
        let ub = sim.body(ids[1]).expect("body").velocity[0];
        println!("{damping:>8.2} {ua:>12.5} {ub:>12.5} {:>12.4}", (ub - ua) / 0.8);
    }
    Ok(())
}
