//! Named scenarios.
//!
//! The melt, gastric and scaling scenarios default to a coarser spacing and a
//! shorter horizon than the published runs; `dx` and `t_end` overrides
//! restore them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    lattice_volume, seed_lattice, BodySpec, ContactSpec, DirichletSpec, DirichletTarget, Discretization,
    DomainSpec, FluidRegion, Material, OpenBoundaryKind, OpenBoundarySpec, OutputPlan, PhaseTag, ScalarField,
    ScenarioConfig, SchedulePoint, Shape, TimeSpec, TransitionRule, WallMotion, WallShape, WallSpec,
};
use crate::rigid::reduction::{particle_inertia, PartialMass};

pub const PRESETS: [&str; 7] = [
    "disk_discretization",
    "shear_migration",
    "shear_fixed_obstacle",
    "falling_disk",
    "melt_demo",
    "gastric_demo",
    "scaling_box",
];

/// Spacings of the disk discretization study.
pub const DISK_SPACINGS: [f64; 6] = [4e-4, 2e-4, 1e-4, 0.5e-4, 0.25e-4, 0.125e-4];
pub const DISK_DIAMETER: f64 = 2.5e-3;
pub const DISK_DENSITY: f64 = 1e3;

/// Options that change the geometry of a preset.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PresetOptions {
    pub dx: Option<f64>,
    pub seed: Option<u64>,
}

/// Re = u_w D² / (4 ν H).
pub fn compute_reynolds(u_w: f64, d: f64, nu: f64, h: f64) -> f64 {
    u_w * d * d / (4.0 * nu * h)
}

pub fn preset(name: &str, opts: &PresetOptions) -> Result<ScenarioConfig> {
    let seed = opts.seed.unwrap_or(0);
    match name {
        "disk_discretization" => Ok(disk_discretization(opts.dx.unwrap_or(4e-4))),
        "shear_migration" => Ok(shear(name, opts.dx.unwrap_or(2e-4), 0.01, true)),
        "shear_fixed_obstacle" => Ok(shear(name, opts.dx.unwrap_or(2e-4), 0.012, false)),
        "falling_disk" => Ok(falling_disk(opts.dx.unwrap_or(2e-4))),
        "melt_demo" => melt_demo(opts.dx.unwrap_or(0.4), seed),
        "gastric_demo" => gastric_demo(opts.dx.unwrap_or(0.4), seed),
        "scaling_box" => Ok(scaling_box(opts.dx.unwrap_or(0.5))),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

fn material(name: &str, rho: f64, f: impl FnOnce(&mut Material)) -> Material {
    let mut m = Material::new(name, rho);
    f(&mut m);
    m
}

fn base(name: &str, dimension: usize, dx: f64, min: [f64; 3], max: [f64; 3], t_end: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        dimension,
        discretization: Discretization::new(dx),
        domain: DomainSpec { min, max, periodic: [false; 3] },
        time: TimeSpec { t_end, dt: None, expected_max_velocity: 0.0 },
        workers: 1,
        transport_velocity: true,
        seed: 0,
        contact: None,
        output: OutputPlan::default(),
        materials: Vec::new(),
        fluids: Vec::new(),
        bodies: Vec::new(),
        walls: Vec::new(),
        dirichlet: Vec::new(),
        open_boundaries: Vec::new(),
    }
}

fn wall_thickness(dx: f64) -> f64 {
    3.0 * dx
}

fn body(material: &str, shape: Shape) -> BodySpec {
    BodySpec {
        material: material.to_string(),
        shape,
        velocity: [0.0; 3],
        angular_velocity: [0.0; 3],
        mobile: true,
        temperature: 0.0,
        concentration: 0.0,
    }
}

fn fluid(material: &str, shape: Shape) -> FluidRegion {
    FluidRegion { material: material.to_string(), shape, velocity: [0.0; 3], temperature: 0.0, concentration: 0.0 }
}

fn wall(name: &str, material: &str, shape: WallShape) -> WallSpec {
    WallSpec {
        name: name.to_string(),
        material: material.to_string(),
        shape,
        motion: WallMotion::Fixed,
        openings: Vec::new(),
        temperature: 0.0,
        concentration: 0.0,
    }
}

fn solid(min: [f64; 2], max: [f64; 2]) -> WallShape {
    WallShape::Solid { shape: Shape::rect(min, max) }
}

/// Single disk, no fluid; only its mass properties are of interest.
fn disk_discretization(dx: f64) -> ScenarioConfig {
    let r = 0.5 * DISK_DIAMETER;
    let mut cfg = base("disk_discretization", 2, dx, [-2.0 * r, -2.0 * r, 0.0], [2.0 * r, 2.0 * r, 0.0], 1.0);
    cfg.materials.push(Material::new("disk", DISK_DENSITY));
    cfg.bodies.push(body("disk", Shape::circle([0.0, 0.0], r)));
    cfg
}

/// (Δx, m, I) of the lattice disk for each spacing. The lattice is anchored
/// at the disk's bounding box corner plus Δx/2.
pub fn disk_discretization_table(spacings: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let mat = Material::new("disk", DISK_DENSITY);
    let shape = Shape::circle([0.0, 0.0], 0.5 * DISK_DIAMETER);
    spacings
        .iter()
        .map(|&dx| {
            let ps = seed_lattice(&shape, dx, 2, PhaseTag::Rigid(0), &mat)?;
            let items: Vec<_> = ps.iter().map(|p| (p.mass, p.position, particle_inertia(p.mass, dx, 2))).collect();
            let pm = PartialMass::from_particles(&items);
            Ok((dx, pm.mass, pm.inertia[(2, 2)]))
        })
        .collect()
}

/// Analytic mass and polar inertia of the disk.
pub fn disk_analytic() -> (f64, f64) {
    let r = 0.5 * DISK_DIAMETER;
    let m = DISK_DENSITY * std::f64::consts::PI * r * r;
    (m, 0.5 * m * r * r)
}

/// Periodic channel between walls sliding at ±u_w. With `mobile`, a free
/// disk starts off-center; otherwise a free and a fixed disk share the
/// centerline.
fn shear(name: &str, dx: f64, u_w: f64, mobile: bool) -> ScenarioConfig {
    let (l, h) = (5e-2, 1e-2);
    let t = wall_thickness(dx);
    let mut cfg = base(name, 2, dx, [-0.5 * l, -0.5 * h - t, 0.0], [0.5 * l, 0.5 * h + t, 0.0], 60.0);
    cfg.domain.periodic = [true, false, false];
    cfg.time.expected_max_velocity = 2.0 * u_w;
    cfg.contact = Some(ContactSpec { stiffness: 1.0, damping: 1e-3 });
    cfg.materials = vec![
        material("fluid", 1e3, |m| {
            m.kinematic_viscosity = 5e-6;
            m.speed_of_sound = 0.25;
            m.background_pressure = 62.5;
        }),
        Material::new("disk", 1e3),
        Material::new("wall", 1e3),
    ];
    let mut bottom = wall("bottom", "wall", solid([-0.5 * l, -0.5 * h - t], [0.5 * l, -0.5 * h]));
    bottom.motion = WallMotion::Sliding { velocity: [-u_w, 0.0, 0.0] };
    let mut top = wall("top", "wall", solid([-0.5 * l, 0.5 * h], [0.5 * l, 0.5 * h + t]));
    top.motion = WallMotion::Sliding { velocity: [u_w, 0.0, 0.0] };
    cfg.walls = vec![bottom, top];
    let r = 0.5 * DISK_DIAMETER;
    if mobile {
        cfg.bodies.push(body("disk", Shape::circle([0.0, 2.5e-3], r)));
    } else {
        cfg.bodies.push(body("disk", Shape::circle([-3.75e-3, 0.0], r)));
        let mut fixed = body("disk", Shape::circle([3.75e-3, 0.0], r));
        fixed.mobile = false;
        cfg.bodies.push(fixed);
    }
    cfg.fluids.push(fluid("fluid", Shape::rect([-0.5 * l, -0.5 * h], [0.5 * l, 0.5 * h])));
    cfg
}

/// Disk sinking in a closed box under the reduced gravity of the solid.
fn falling_disk(dx: f64) -> ScenarioConfig {
    let (w, h) = (2e-2, 6e-2);
    let t = wall_thickness(dx);
    let mut cfg = base("falling_disk", 2, dx, [-0.5 * w - t, -0.5 * h - t, 0.0], [0.5 * w + t, 0.5 * h + t, 0.0], 0.8);
    cfg.time.expected_max_velocity = 0.1;
    cfg.contact = Some(ContactSpec { stiffness: 100.0, damping: 0.5 });
    let (rho_s, rho_f, g) = (1.25e3, 1e3, 9.81);
    cfg.materials = vec![
        material("fluid", rho_f, |m| {
            m.kinematic_viscosity = 1e-5;
            m.speed_of_sound = 0.5;
            m.background_pressure = 250.0;
        }),
        material("disk", rho_s, |m| m.body_force = [0.0, -(rho_s - rho_f) / rho_s * g, 0.0]),
        Material::new("wall", rho_f),
    ];
    cfg.walls.push(wall(
        "box",
        "wall",
        WallShape::Shell { min: [-0.5 * w, -0.5 * h, 0.0], max: [0.5 * w, 0.5 * h, 0.0], sides: vec![], layers: None },
    ));
    cfg.bodies.push(body("disk", Shape::circle([0.0, 1e-2], 0.5 * DISK_DIAMETER)));
    cfg.fluids.push(fluid("fluid", Shape::rect([-0.5 * w, -0.5 * h], [0.5 * w, 0.5 * h])));
    cfg
}

/// Random non-overlapping disks inside `lo..hi` (centers keep `margin` plus
/// the radius away from the edges), largest first. `keep_out` rejects
/// centers for a given radius.
#[allow(clippy::too_many_arguments)]
fn place_disks(
    rng: &mut ChaCha8Rng,
    count: usize,
    d_range: (f64, f64),
    lo: [f64; 2],
    hi: [f64; 2],
    margin: f64,
    gap: f64,
    keep_out: impl Fn([f64; 2], f64) -> bool,
) -> Result<Vec<([f64; 2], f64)>> {
    let mut radii: Vec<f64> = (0..count).map(|_| 0.5 * rng.random_range(d_range.0..=d_range.1)).collect();
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut placed: Vec<([f64; 2], f64)> = Vec::with_capacity(count);
    for r in radii {
        let (x0, x1) = (lo[0] + r + margin, hi[0] - r - margin);
        let (y0, y1) = (lo[1] + r + margin, hi[1] - r - margin);
        let mut ok = false;
        for _ in 0..200_000 {
            let c = [rng.random_range(x0..x1), rng.random_range(y0..y1)];
            if keep_out(c, r) {
                continue;
            }
            if placed.iter().all(|(q, s)| ((c[0] - q[0]).powi(2) + (c[1] - q[1]).powi(2)).sqrt() >= r + s + gap) {
                placed.push((c, r));
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::config(format!(
                "could not place {count} disks without overlap; placed {}",
                placed.len()
            )));
        }
    }
    Ok(placed)
}

/// Two chambers joined over their upper half, hot lower walls, gas inflow
/// at the top left and outflow at the top right, metal grains that melt
/// above T = 50 and resolidify below it.
fn melt_demo(dx: f64, seed: u64) -> Result<ScenarioConfig> {
    let (w, h) = (40.0, 12.0);
    let t = wall_thickness(dx);
    let mut cfg = base("melt_demo", 2, dx, [-t, -t, 0.0], [w + t, h + t, 0.0], 0.1);
    cfg.seed = seed;
    cfg.time.expected_max_velocity = 1000.0;
    cfg.contact = Some(ContactSpec { stiffness: 1e6, damping: 1e3 });
    let p0: f64 = 16e6;
    let g = [0.0, -1e4, 0.0];
    cfg.materials = vec![
        material("gas", 0.1, |m| {
            m.kinematic_viscosity = 100.0;
            m.heat_capacity = 0.01;
            m.conductivity = 0.1;
            m.speed_of_sound = (p0 / 0.1).sqrt();
            m.background_pressure = p0;
            m.body_force = g;
        }),
        material("liquid", 1.0, |m| {
            m.kinematic_viscosity = 100.0;
            m.heat_capacity = 1.0;
            m.conductivity = 10.0;
            m.speed_of_sound = p0.sqrt();
            m.background_pressure = p0;
            m.body_force = g;
            m.transition =
                Some(TransitionRule { field: ScalarField::Temperature, threshold: 50.0, into: "metal".into() });
        }),
        material("metal", 1.0, |m| {
            m.heat_capacity = 1.0;
            m.conductivity = 10.0;
            m.body_force = g;
            m.transition =
                Some(TransitionRule { field: ScalarField::Temperature, threshold: 50.0, into: "liquid".into() });
        }),
        material("wall", 1.0, |m| {
            m.heat_capacity = 1.0;
            m.conductivity = 10.0;
        }),
    ];

    let (mid, open) = (0.5 * h, h - 3.0);
    let lower = [
        ("bottom", [-t, -t], [w + t, 0.0]),
        ("left_lower", [-t, 0.0], [0.0, mid]),
        ("right_lower", [w, 0.0], [w + t, mid]),
        ("divider", [0.5 * (w - t), 0.0], [0.5 * (w + t), mid]),
    ];
    let upper = [
        ("top", [-t, h], [w + t, h + t]),
        ("left_upper", [-t, mid], [0.0, open]),
        ("right_upper", [w, mid], [w + t, open]),
    ];
    let hot = vec![SchedulePoint { until: 0.5, value: 100.0 }, SchedulePoint { until: f64::INFINITY, value: 0.0 }];
    let warm = vec![SchedulePoint { until: f64::INFINITY, value: 50.0 }];
    for (set, schedule, t0) in [(&lower[..], hot, 100.0), (&upper[..], warm, 50.0)] {
        for (name, lo, hi) in set {
            let mut wl = wall(name, "wall", solid(*lo, *hi));
            wl.temperature = t0;
            cfg.walls.push(wl);
            cfg.dirichlet.push(DirichletSpec {
                name: name.to_string(),
                field: ScalarField::Temperature,
                target: DirichletTarget::Wall(name.to_string()),
                schedule: schedule.clone(),
            });
        }
    }

    let inlet = Shape::rect([-t, open], [0.0, h]);
    let outlet = Shape::rect([w, open], [w + t, h]);
    for (kind, zone) in [(OpenBoundaryKind::Inflow, &inlet), (OpenBoundaryKind::Outflow, &outlet)] {
        cfg.open_boundaries.push(OpenBoundarySpec {
            kind,
            material: "gas".into(),
            zone: zone.clone(),
            axis: 0,
            mean_velocity: 420.0,
            start_time: 0.25,
            temperature: 50.0,
            concentration: 0.0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grains = place_disks(&mut rng, 8, (2.5, 4.4), [0.0, 0.0], [0.5 * (w - t), h - 1.0], dx, 0.5 * dx, |_, _| false)?;
    for (c, r) in grains {
        let mut b = body("metal", Shape::circle(c, r));
        b.temperature = 25.0;
        cfg.bodies.push(b);
    }
    for shape in [Shape::rect([0.0, 0.0], [w, h]), inlet, outlet] {
        let mut f = fluid("gas", shape);
        f.temperature = 50.0;
        cfg.fluids.push(f);
    }
    Ok(cfg)
}

/// Closed box with a harmonically moving constriction; boluses absorb
/// gastric juice and turn into chyme above C = 0.8.
fn gastric_demo(dx: f64, seed: u64) -> Result<ScenarioConfig> {
    let (w, h) = (40.0, 16.0);
    let t = wall_thickness(dx);
    let (hw, hh) = (0.5 * w, 0.5 * h);
    let mut cfg = base("gastric_demo", 2, dx, [-hw - t, -hh - t, 0.0], [hw + t, hh + t, 0.0], 0.1);
    cfg.seed = seed;
    cfg.time.expected_max_velocity = 300.0;
    cfg.contact = Some(ContactSpec { stiffness: 1e5, damping: 10.0 });
    let (c, p0) = (1e3, 1e6);
    cfg.materials = vec![
        material("juice", 1.0, |m| {
            m.kinematic_viscosity = 100.0;
            m.diffusivity = 1.0;
            m.speed_of_sound = c;
            m.background_pressure = 5.0 * p0;
        }),
        material("chyme", 1.0, |m| {
            m.kinematic_viscosity = 200.0;
            m.diffusivity = 0.25;
            m.speed_of_sound = c;
            m.background_pressure = 5.0 * p0;
        }),
        material("bolus", 1.0, |m| {
            m.diffusivity = 0.25;
            m.transition =
                Some(TransitionRule { field: ScalarField::Concentration, threshold: 0.8, into: "chyme".into() });
        }),
        Material::new("wall", 1.0),
    ];
    cfg.walls.push(wall(
        "box",
        "wall",
        WallShape::Shell { min: [-hw, -hh, 0.0], max: [hw, hh, 0.0], sides: vec![], layers: None },
    ));
    let (x0, x1, gap_half) = (13.5, 15.5, 3.0);
    for (name, lo, hi) in [("constriction_lower", -hh, -gap_half), ("constriction_upper", gap_half, hh)] {
        let mut wl = wall(name, "wall", solid([x0, lo], [x1, hi]));
        wl.motion = WallMotion::Harmonic { amplitude: [14.5, 0.0, 0.0], angular_frequency: std::f64::consts::PI };
        cfg.walls.push(wl);
    }
    cfg.dirichlet.push(DirichletSpec {
        name: "juice".into(),
        field: ScalarField::Concentration,
        target: DirichletTarget::Material("juice".into()),
        schedule: vec![SchedulePoint { until: f64::INFINITY, value: 1.0 }],
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocked = |p: [f64; 2], r: f64| {
        p[0] + r > x0 - dx && p[0] - r < x1 + dx && (p[1] - r < -gap_half + dx || p[1] + r > gap_half - dx)
    };
    let boluses = place_disks(&mut rng, 60, (1.6, 2.8), [-hw, -hh], [hw, hh], dx, 0.5 * dx, blocked)?;
    for (c, r) in boluses {
        cfg.bodies.push(body("bolus", Shape::circle(c, r)));
    }
    let mut juice = fluid("juice", Shape::rect([-hw, -hh], [hw, hh]));
    juice.concentration = 1.0;
    cfg.fluids.push(juice);
    Ok(cfg)
}

/// Cube of fluid with a 6×6×6 array of heavy spheres sinking under gravity.
fn scaling_box(dx: f64) -> ScenarioConfig {
    let l: f64 = 30.0;
    let t = wall_thickness(dx);
    let hl = 0.5 * l;
    let mut cfg = base("scaling_box", 3, dx, [-hl - t; 3], [hl + t; 3], 0.05);
    cfg.time.expected_max_velocity = 1.0;
    cfg.contact = Some(ContactSpec { stiffness: 1e4, damping: 10.0 });
    let g = [0.0, -1.0, 0.0];
    cfg.materials = vec![
        material("fluid", 1.0, |m| {
            m.kinematic_viscosity = 1.0;
            m.speed_of_sound = 50.0;
            m.background_pressure = 2500.0;
            m.body_force = g;
        }),
        material("sphere", 10.0, |m| m.body_force = g),
        Material::new("wall", 1.0),
    ];
    cfg.walls.push(wall("box", "wall", WallShape::Shell { min: [-hl; 3], max: [hl; 3], sides: vec![], layers: None }));
    for k in 0..6 {
        for j in 0..6 {
            for i in 0..6 {
                let c = [-12.5 + 5.0 * i as f64, -12.5 + 5.0 * j as f64, -12.5 + 5.0 * k as f64];
                cfg.bodies.push(body("sphere", Shape::sphere(c, 1.25)));
            }
        }
    }
    cfg.fluids.push(fluid("fluid", Shape::cuboid([-hl; 3], [hl; 3])));
    cfg
}

/// Rough particle count of a configuration (lattice sites of the domain box).
pub fn estimated_particles(cfg: &ScenarioConfig) -> f64 {
    let ext = cfg.domain.max() - cfg.domain.min();
    (0..cfg.dimension).map(|a| ext[a]).product::<f64>() / lattice_volume(cfg.dx(), cfg.dimension)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_config;

    #[test]
    fn reynolds_examples() {
        assert!((compute_reynolds(0.02, 2.5e-3, 5e-6, 1e-2) - 0.625).abs() < 1e-12);
        assert!((compute_reynolds(0.024, 2.5e-3, 5e-6, 1e-2) - 0.75).abs() < 1e-12);
        assert_eq!(compute_reynolds(0.02, 0.0, 5e-6, 1e-2), 0.0);
    }

    #[test]
    fn every_preset_validates() {
        for name in PRESETS {
            let cfg = preset(name, &PresetOptions::default()).unwrap();
            validate_config(&cfg).unwrap_or_else(|v| panic!("{name}: {v:?}"));
        }
    }

    #[test]
    fn falling_disk_constants() {
        let cfg = preset("falling_disk", &PresetOptions::default()).unwrap();
        let set = cfg.material_set();
        let disk = set.by_name("disk").unwrap();
        let fluid = set.by_name("fluid").unwrap();
        assert_eq!(disk.reference_density, 1.25e3);
        assert_eq!(fluid.speed_of_sound, 0.5);
        assert_eq!(fluid.background_pressure, 250.0);
        assert!((disk.body_force[1] + 0.2 * 9.81).abs() < 1e-12);
        assert_eq!(fluid.body_force, [0.0; 3]);
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("nope", &PresetOptions::default()), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn placement_depends_on_seed_only() {
        let a = preset("gastric_demo", &PresetOptions { dx: None, seed: Some(3) }).unwrap();
        let b = preset("gastric_demo", &PresetOptions { dx: None, seed: Some(3) }).unwrap();
        let c = preset("gastric_demo", &PresetOptions { dx: None, seed: Some(4) }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.bodies, c.bodies);
        assert_eq!(a.bodies.len(), 60);
    }
}
