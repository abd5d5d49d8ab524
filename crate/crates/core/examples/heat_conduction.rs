//! Steady conduction between a cold and a hot wall through resting fluid,
//! in a strip that is periodic along y.

use sphfsi::model::{
    Discretization, DirichletSpec, DirichletTarget, DomainSpec, FluidRegion, Material, OutputPlan, ScalarField,
    ScenarioConfig, SchedulePoint, Shape, TimeSpec, WallMotion, WallShape, WallSpec,
};
use sphfsi::scenario::build_setup;
use sphfsi::simulation::Simulation;

fn wall(name: &str, min: [f64; 2], max: [f64; 2]) -> WallSpec {
    WallSpec {
        name: name.into(),
        material: "wall".into(),
        shape: WallShape::Solid { shape: Shape::rect(min, max) },
        motion: WallMotion::Fixed,
        openings: vec![],
        temperature: 0.0,
        concentration: 0.0,
    }
}

fn main() -> sphfsi::Result<()> {
    let (dx, l, ly) = (0.05, 1.0, 0.6);
    let t = 3.0 * dx;
    let mut fluid = Material::new("fluid", 1.0);
    fluid.speed_of_sound = 1.0;
    fluid.background_pressure = 1.0;
    fluid.kinematic_viscosity = 0.1;
    fluid.heat_capacity = 1.0;
    fluid.conductivity = 1.0;
    let mut solid = Material::new("wall", 1.0);
    solid.heat_capacity = 1.0;
    solid.conductivity = 1.0;
    let dirichlet = |name: &str, value: f64| DirichletSpec {
        name: name.into(),
        field: ScalarField::Temperature,
        target: DirichletTarget::Wall(name.into()),
        schedule: vec![SchedulePoint { until: f64::INFINITY, value }],
    };
    let cfg = ScenarioConfig {
        name: "conduction".into(),
        dimension: 2,
        discretization: Discretization::new(dx),
        domain: DomainSpec { min: [-t, 0.0, 0.0], max: [l + t, ly, 0.0], periodic: [false, true, false] },
        time: TimeSpec { t_end: 2.0, dt: None, expected_max_velocity: 0.1 },
        workers: 1,
        transport_velocity: true,
        seed: 0,
        contact: None,
        output: OutputPlan::default(),
        materials: vec![fluid, solid],
        fluids: vec![FluidRegion {
            material: "fluid".into(),
            shape: Shape::rect([0.0, 0.0], [l, ly]),
            velocity: [0.0; 3],
            temperature: 0.0,
            concentration: 0.0,
        }],
        bodies: vec![],
        walls: vec![wall("cold", [-t, 0.0], [0.0, ly]), wall("hot", [l, 0.0], [l + t, ly])],
        dirichlet: vec![dirichlet("cold", 0.0), dirichlet("hot", 1.0)],
        open_boundaries: vec![],
    };
    let mut sim = Simulation::new(build_setup(&cfg)?)?;
    println!("dt = {:.3e} ({} steps)", sim.dt, (cfg.time.t_end / sim.dt).round());
    for t_out in [0.05, 0.2, 2.0] {
        sim.run_until(t_out)?;
        let mut bins = vec![(0.0, 0usize); 10];
        for p in sim.particles().iter().filter(|p| p.tag.is_fluid()) {
            let b = ((p.position[0] / l * 10.0) as usize).min(9);
            bins[b].0 += p.temperature;
            bins[b].1 += 1;
        }
        let profile: Vec<String> = bins.iter().map(|(s, n)| format!("{:.3}", s / *n as f64)).collect();
        println!("t = {:.2}: {}", sim.time, profile.join(" "));
    }
    Ok(())
}
