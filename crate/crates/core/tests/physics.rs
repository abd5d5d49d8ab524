mod common;

use common::*;
use sphfsi::model::{
    DirichletSpec, DirichletTarget, Material, ScalarField, SchedulePoint, Shape, WallMotion, WallShape, WallSpec,
};
use sphfsi::scenario::output::write_snapshot_to;

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    (slope, my - slope * mx)
}

fn solid_wall(name: &str, material: &str, min: [f64; 2], max: [f64; 2]) -> WallSpec {
    WallSpec {
        name: name.into(),
        material: material.into(),
        shape: WallShape::Solid { shape: Shape::rect(min, max) },
        motion: WallMotion::Fixed,
        openings: vec![],
        temperature: 0.0,
        concentration: 0.0,
    }
}

#[test]
fn hydrostatic_pressure_gradient() {
    let dx = 0.05;
    let mut fluid = liquid("water", 1.0, 10.0, 0.5);
    fluid.body_force = [0.0, -1.0, 0.0];
    let mut cfg = blank("hydrostatic", 2, dx, [-0.2, -0.2, 0.0], [1.2, 1.2, 0.0]);
    cfg.materials = vec![fluid, Material::new("wall", 1.0)];
    cfg.walls.push(shell("box", "wall", [0.0; 3], [1.0, 1.0, 0.0]));
    cfg.fluids.push(region("water", Shape::rect([0.0, 0.0], [1.0, 1.0])));
    cfg.time.expected_max_velocity = 0.5;
    let mut sim = simulation(&cfg);
    sim.run_until(3.0).unwrap();
    let pts: Vec<(f64, f64)> = sim
        .particles()
        .iter()
        .filter(|p| p.tag.is_fluid() && (0.25..0.75).contains(&p.position[0]) && (0.2..0.8).contains(&p.position[1]))
        .map(|p| (p.position[1], p.pressure))
        .collect();
    let (slope, _) = least_squares(&pts);
    assert!((slope + 1.0).abs() < 0.05, "dp/dy = {slope}, expected -1");
    let u_max = sim.particles().iter().map(|p| p.velocity.norm()).fold(0.0, f64::max);
    assert!(u_max < 0.05, "residual velocity {u_max}");
}

#[test]
fn conduction_between_dirichlet_walls_becomes_linear() {
    let dx = 0.05;
    let (l, ly) = (1.0, 0.6);
    let mut fluid = liquid("fluid", 1.0, 1.0, 0.1);
    fluid.heat_capacity = 1.0;
    fluid.conductivity = 1.0;
    let mut wall = Material::new("wall", 1.0);
    wall.heat_capacity = 1.0;
    wall.conductivity = 1.0;
    let t = 3.0 * dx;
    let mut cfg = blank("rod", 2, dx, [-t, 0.0, 0.0], [l + t, ly, 0.0]);
    cfg.domain.periodic = [false, true, false];
    cfg.materials = vec![fluid, wall];
    cfg.walls.push(solid_wall("cold", "wall", [-t, 0.0], [0.0, ly]));
    cfg.walls.push(solid_wall("hot", "wall", [l, 0.0], [l + t, ly]));
    for (name, value) in [("cold", 0.0), ("hot", 1.0)] {
        cfg.dirichlet.push(DirichletSpec {
            name: name.into(),
            field: ScalarField::Temperature,
            target: DirichletTarget::Wall(name.into()),
            schedule: vec![SchedulePoint { until: f64::INFINITY, value }],
        });
    }
    cfg.fluids.push(region("fluid", Shape::rect([0.0, 0.0], [l, ly])));
    cfg.time.expected_max_velocity = 0.1;
    let mut sim = simulation(&cfg);
    sim.run_until(2.0).unwrap();
    let pts: Vec<(f64, f64)> =
        sim.particles().iter().filter(|p| p.tag.is_fluid()).map(|p| (p.position[0], p.temperature)).collect();
    let (slope, intercept) = least_squares(&pts);
    // the wall value acts a fraction of a spacing inside the wall layer
    assert!(slope <= 1.0 / l && slope >= 1.0 / (l + 2.0 * dx), "slope {slope}");
    assert!((slope * 0.5 * l + intercept - 0.5).abs() < 0.01, "midpoint {}", slope * 0.5 * l + intercept);
    let worst = pts.iter().map(|(x, t)| (t - slope * x - intercept).abs()).fold(0.0, f64::max);
    assert!(worst < 0.02, "deviation from linear {worst}");
}

#[test]
fn runs_are_reproducible_bit_for_bit() {
    let snapshot = || {
        let mut fluid = liquid("fluid", 1.0, 10.0, 0.05);
        fluid.heat_capacity = 1.0;
        fluid.conductivity = 0.2;
        let mut cfg = periodic_square("repro", 16, 0.1, fluid);
        cfg.materials.push(Material::new("solid", 1.3));
        let mut d = disk("solid", [0.8, 0.8], 0.25);
        d.velocity = [0.2, -0.1, 0.0];
        d.temperature = 2.0;
        cfg.bodies.push(d);
        cfg.workers = 2;
        cfg.time.expected_max_velocity = 0.5;
        let mut sim = simulation(&cfg);
        for _ in 0..200 {
            sim.step().unwrap();
        }
        let mut out = Vec::new();
        let ps = sim.particles();
        write_snapshot_to(&mut out, &ps, &sim.physics.materials, 2, sim.time, &[]).unwrap();
        out
    };
    assert_eq!(snapshot(), snapshot());
}
