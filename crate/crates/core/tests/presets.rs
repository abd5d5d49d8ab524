use sphfsi::scenario::presets::estimated_particles;
use sphfsi::scenario::runner::{run, RunOptions, Workers};
use sphfsi::scenario::{build_setup, preset, PresetOptions, PRESETS};
use sphfsi::simulation::Simulation;

fn coarse(name: &str) -> Option<f64> {
    match name {
        "shear_migration" | "shear_fixed_obstacle" => Some(4e-4),
        "falling_disk" => Some(5e-4),
        "scaling_box" => Some(1.0),
        _ => None,
    }
}

#[test]
fn every_preset_takes_steps() {
    for name in PRESETS.iter().filter(|n| **n != "disk_discretization") {
        let cfg = preset(name, &PresetOptions { dx: coarse(name), seed: None }).unwrap();
        let mut sim = Simulation::new(build_setup(&cfg).unwrap()).unwrap();
        let (n, m) = (sim.n_particles(), sim.total_mass());
        for _ in 0..3 {
            sim.step().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert_eq!(sim.n_particles(), n, "{name}");
        assert!(((sim.total_mass() - m) / m).abs() < 1e-12, "{name}");
        assert!(estimated_particles(&cfg) > 0.0);
    }
}

#[test]
fn gastric_boluses_take_up_juice() {
    let cfg = preset("gastric_demo", &PresetOptions { dx: None, seed: Some(1) }).unwrap();
    let mut sim = Simulation::new(build_setup(&cfg).unwrap()).unwrap();
    let bodies = sim.bodies.len();
    assert!(bodies > 10);
    sim.run_until(0.02).unwrap();
    let c = sim
        .particles()
        .iter()
        .filter(|p| p.tag.is_rigid())
        .map(|p| p.concentration)
        .fold(0.0, f64::max);
    assert!(c > 0.0, "no uptake into the boluses");
}

#[test]
fn disk_table_and_scaling_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions { out: Some(dir.path().join("disk")), ..Default::default() };
    run("disk_discretization", &opts).unwrap();
    let table = std::fs::read_to_string(dir.path().join("disk/disk_table.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("dx,mass,inertia"));
    assert_eq!(table.lines().count(), 7);

    let opts = RunOptions {
        out: Some(dir.path().join("scaling")),
        dx: Some(2.0),
        t_end: Some(0.01),
        workers: Some(Workers::Range(1, 2)),
        ..Default::default()
    };
    run("scaling_box", &opts).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("scaling/scaling.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "cores,walltimeperstep,strongscalingefficiency");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("1,") && rows[1].ends_with(",100.00"));
}
