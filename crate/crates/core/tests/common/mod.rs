#![allow(dead_code)]

use sphfsi::model::{
    BodySpec, ContactSpec, Discretization, DomainSpec, FluidRegion, Material, OutputPlan, ScenarioConfig, Shape,
    TimeSpec, WallMotion, WallShape, WallSpec,
};
use sphfsi::scenario::build_setup;
use sphfsi::simulation::Simulation;

pub fn blank(name: &str, dimension: usize, dx: f64, min: [f64; 3], max: [f64; 3]) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        dimension,
        discretization: Discretization::new(dx),
        domain: DomainSpec { min, max, periodic: [false; 3] },
        time: TimeSpec { t_end: 1.0, dt: None, expected_max_velocity: 0.0 },
        workers: 1,
        transport_velocity: true,
        seed: 0,
        contact: None,
        output: OutputPlan::default(),
        materials: vec![],
        fluids: vec![],
        bodies: vec![],
        walls: vec![],
        dirichlet: vec![],
        open_boundaries: vec![],
    }
}

pub fn liquid(name: &str, rho: f64, c: f64, nu: f64) -> Material {
    let mut m = Material::new(name, rho);
    m.speed_of_sound = c;
    m.kinematic_viscosity = nu;
    m.background_pressure = rho * c * c;
    m
}

pub fn region(material: &str, shape: Shape) -> FluidRegion {
    FluidRegion { material: material.into(), shape, velocity: [0.0; 3], temperature: 0.0, concentration: 0.0 }
}

pub fn disk(material: &str, center: [f64; 2], radius: f64) -> BodySpec {
    BodySpec {
        material: material.into(),
        shape: Shape::circle(center, radius),
        velocity: [0.0; 3],
        angular_velocity: [0.0; 3],
        mobile: true,
        temperature: 0.0,
        concentration: 0.0,
    }
}

pub fn shell(name: &str, material: &str, min: [f64; 3], max: [f64; 3]) -> WallSpec {
    WallSpec {
        name: name.into(),
        material: material.into(),
        shape: WallShape::Shell { min, max, sides: vec![], layers: None },
        motion: WallMotion::Fixed,
        openings: vec![],
        temperature: 0.0,
        concentration: 0.0,
    }
}

/// Square 2D box `[0, n·dx]²`, periodic on both axes and filled with
/// `fluid`.
pub fn periodic_square(name: &str, n: usize, dx: f64, fluid: Material) -> ScenarioConfig {
    let l = n as f64 * dx;
    let mut cfg = blank(name, 2, dx, [0.0; 3], [l, l, 0.0]);
    cfg.domain.periodic = [true, true, false];
    cfg.fluids.push(region(&fluid.name, Shape::rect([0.0, 0.0], [l, l])));
    cfg.materials.push(fluid);
    cfg
}

pub fn with_contact(mut cfg: ScenarioConfig, k: f64, d: f64) -> ScenarioConfig {
    cfg.contact = Some(ContactSpec { stiffness: k, damping: d });
    cfg
}

pub fn simulation(cfg: &ScenarioConfig) -> Simulation {
    Simulation::new(build_setup(cfg).expect("valid setup")).expect("simulation starts")
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
