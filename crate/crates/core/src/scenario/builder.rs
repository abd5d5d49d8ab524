//! Turn a scenario description into particles, bodies and a run setup.
//!
//! All particles sit on one global lattice through the configured anchor.
//! Each lattice site is claimed at most once: walls first, then bodies in
//! order, then fluid regions.

use std::collections::HashSet;

use crate::decomposition::DomainGrid;
use crate::error::{Error, Result};
use crate::fluid::open_boundary::OpenBoundary;
use crate::model::{
    lattice_points, lattice_volume, validate_config, Particle, PhaseTag, ScenarioConfig, Shape, Side, Vec3, WallShape,
};
use crate::physics::Physics;
use crate::rigid::{BodySet, RigidBody};
use crate::simulation::Setup;
use crate::thermal::DirichletGroup;

/// Default number of wall layers: enough to cover the kernel support.
pub fn default_layers(cfg: &ScenarioConfig) -> usize {
    (cfg.support_radius() / cfg.dx() - 1e-9).ceil() as usize
}

/// Lattice region of a shell wall: the box grown by `layers` spacings on the
/// listed sides, minus the box itself.
fn shell_points(cfg: &ScenarioConfig, min: [f64; 3], max: [f64; 3], sides: &[Side], layers: usize) -> Vec<Vec3> {
    let dim = cfg.dimension;
    let t = layers as f64 * cfg.dx();
    let (mut lo, mut hi) = (min, max);
    for s in sides {
        if s.is_max() {
            hi[s.axis()] += t;
        } else {
            lo[s.axis()] -= t;
        }
    }
    let inner = Shape::Box { min, max };
    lattice_points(&Shape::Box { min: lo, max: hi }, cfg.dx(), dim, Some(cfg.lattice_anchor()))
        .into_iter()
        .filter(|p| !inner.contains(p, dim))
        .collect()
}

struct Claims {
    anchor: Vec3,
    dx: f64,
    taken: HashSet<[i64; 3]>,
}

impl Claims {
    fn claim(&mut self, p: &Vec3) -> bool {
        let key = [0, 1, 2].map(|a| ((p[a] - self.anchor[a]) / self.dx).round() as i64);
        self.taken.insert(key)
    }
}

/// Particles and bodies described by `cfg`, with ids in creation order.
pub fn build_particles(cfg: &ScenarioConfig) -> Result<(Vec<Particle>, BodySet)> {
    let dim = cfg.dimension;
    let dx = cfg.dx();
    let mats = cfg.material_set();
    let anchor = cfg.lattice_anchor();
    let cell = lattice_volume(dx, dim);
    let mut claims = Claims { anchor, dx, taken: HashSet::new() };
    let mut out: Vec<Particle> = Vec::new();
    let idx = |name: &str| -> Result<u16> {
        mats.index_of(name).map(|i| i as u16).ok_or_else(|| Error::config(format!("undefined material '{name}'")))
    };

    for (wi, w) in cfg.walls.iter().enumerate() {
        let m = idx(&w.material)?;
        let rho = mats.get(m as usize).reference_density;
        let pts = match &w.shape {
            WallShape::Shell { min, max, sides, layers } => {
                let sides = if sides.is_empty() { Side::all(dim) } else { sides.clone() };
                shell_points(cfg, *min, *max, &sides, layers.unwrap_or_else(|| default_layers(cfg)))
            }
            WallShape::Solid { shape } => lattice_points(shape, dx, dim, Some(anchor)),
        };
        for p in pts {
            if w.openings.iter().any(|o| o.contains(&p, dim)) || !claims.claim(&p) {
                continue;
            }
            let mut q = Particle::new(out.len() as u64, PhaseTag::Boundary(wi as u16), p, rho * cell, rho);
            q.material = m;
            q.temperature = w.temperature;
            q.concentration = w.concentration;
            out.push(q);
        }
    }

    let mut bodies = BodySet::new();
    for (bi, b) in cfg.bodies.iter().enumerate() {
        let m = idx(&b.material)?;
        let mat = mats.get(m as usize);
        let id = bi as u32;
        let mut body = RigidBody::new(id, m, mat.body_force());
        body.mobile = b.mobile;
        if b.mobile {
            body.velocity = Vec3::from(b.velocity);
            body.angular_velocity = Vec3::from(b.angular_velocity);
        }
        let (lo, hi) = b.shape.bounds();
        body.com = (lo + hi) * 0.5;
        if dim == 2 {
            body.com[2] = 0.0;
            body.angular_velocity[0] = 0.0;
            body.angular_velocity[1] = 0.0;
        }
        for p in lattice_points(&b.shape, dx, dim, Some(anchor)) {
            if !claims.claim(&p) {
                continue;
            }
            let mut q = Particle::new(out.len() as u64, PhaseTag::Rigid(id), p, mat.reference_density * cell, mat.reference_density);
            q.material = m;
            q.temperature = b.temperature;
            q.concentration = b.concentration;
            out.push(q);
        }
        bodies.insert(id, body);
    }

    let zones: Vec<(usize, OpenBoundary)> = cfg
        .open_boundaries
        .iter()
        .enumerate()
        .map(|(i, o)| Ok((i, OpenBoundary::from_spec(o, idx(&o.material)?, dim))))
        .collect::<Result<_>>()?;
    for f in &cfg.fluids {
        let m = idx(&f.material)?;
        let rho = mats.get(m as usize).reference_density;
        for p in lattice_points(&f.shape, dx, dim, Some(anchor)) {
            if !claims.claim(&p) {
                continue;
            }
            let mut q = Particle::new(out.len() as u64, PhaseTag::Fluid(m), p, rho * cell, rho);
            q.material = m;
            q.velocity = Vec3::from(f.velocity);
            q.temperature = f.temperature;
            q.concentration = f.concentration;
            q.open_zone = zones.iter().find(|(_, z)| z.contains(&p)).map(|(i, _)| *i as u16);
            out.push(q);
        }
    }
    if dim == 2 {
        for p in &mut out {
            p.velocity[2] = 0.0;
        }
    }
    Ok((out, bodies))
}

/// Validate `cfg` and assemble everything a [`crate::simulation::Simulation`]
/// needs.
pub fn build_setup(cfg: &ScenarioConfig) -> Result<Setup> {
    validate_config(cfg).map_err(Error::Config)?;
    let (particles, bodies) = build_particles(cfg)?;
    let physics = Physics::from_config(cfg);
    let grid = DomainGrid::new(cfg)?;
    let dirichlet = cfg.dirichlet.iter().map(DirichletGroup::from_spec).collect();
    let mats = cfg.material_set();
    let open_boundaries = cfg
        .open_boundaries
        .iter()
        .map(|o| OpenBoundary::from_spec(o, mats.index_of(&o.material).expect("validated") as u16, cfg.dimension))
        .collect();
    Ok(Setup {
        physics,
        grid,
        particles,
        bodies,
        dirichlet,
        open_boundaries,
        workers: cfg.workers,
        dt: cfg.time.dt,
        expected_max_velocity: cfg.time.expected_max_velocity,
        enforce_limits: true,
    })
}
