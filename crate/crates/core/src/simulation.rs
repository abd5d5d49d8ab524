//! The time loop: one coordinator driving a fixed set of workers through
//! bulk-synchronous phases.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::decomposition::{
    distribute, needs_rebuild, rebuild, refresh_halo, Decomposition, DomainGrid, Worker,
};
use crate::error::{Error, Result};
use crate::fluid::open_boundary::{OpenBoundary, ZoneTransit};
use crate::fluid::{density_summation, extrapolate_boundaries, momentum};
use crate::integrator::{
    compute_dt, drift_body, drift_fluid, final_kick_fluid, kick_body, kick_fluid, max_fluid_speed, move_walls,
    slave_rigid_particles, slave_rigid_velocities, StepLimits,
};
use crate::model::{BodyId, OpenBoundaryKind, Particle, PhaseTag, ScalarField, Vec3};
use crate::physics::Physics;
use crate::rigid::{contact_forces, reduce_force_torque, reduce_mass_quantities, BodySet, RigidBody};
use crate::thermal::{apply_thermal_dirichlet, integrate_scalars, update_rates, DirichletGroup};
use crate::transition::{apply_transitions, TransitionEvent};

/// Everything needed to start a run.
#[derive(Debug, Clone)]
pub struct Setup {
    pub physics: Physics,
    pub grid: DomainGrid,
    pub particles: Vec<Particle>,
    /// Bodies with id, material, mobility and initial velocities; mass
    /// quantities are computed from the particles.
    pub bodies: BodySet,
    pub dirichlet: Vec<DirichletGroup>,
    pub open_boundaries: Vec<OpenBoundary>,
    pub workers: usize,
    /// Fixed step; computed from the limits when absent.
    pub dt: Option<f64>,
    /// Lower bound for the maximum fluid speed in the CFL condition.
    pub expected_max_velocity: f64,
    /// Refuse steps above the limits (start and runtime).
    pub enforce_limits: bool,
}

pub struct Simulation {
    pub physics: Physics,
    pub decomp: Decomposition,
    pub workers: Vec<Worker>,
    pub bodies: BodySet,
    pub dirichlet: Vec<DirichletGroup>,
    pub open_boundaries: Vec<OpenBoundary>,
    pub dt: f64,
    pub limits: StepLimits,
    pub time: f64,
    pub step: u64,
    pub rebuilds: u64,
    /// Transition events of the last step.
    pub events: Vec<TransitionEvent>,
    enforce_limits: bool,
    next_body: BodyId,
    next_particle: u64,
    pool: rayon::ThreadPool,
}

impl Simulation {
    pub fn new(setup: Setup) -> Result<Self> {
        let Setup {
            physics,
            grid,
            mut particles,
            mut bodies,
            dirichlet,
            open_boundaries,
            workers,
            dt,
            expected_max_velocity,
            enforce_limits,
        } = setup;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::config(format!("cannot start {workers} worker threads: {e}")))?;
        for p in &mut particles {
            if let PhaseTag::Boundary(w) = p.tag {
                let motion = &physics.walls[w as usize].motion;
                p.body_offset = p.position;
                p.velocity = motion.velocity(0.0);
                p.acceleration = motion.acceleration(0.0);
                p.interaction_velocity = p.velocity;
            }
            if p.tag.is_fluid() {
                p.transport_velocity = p.velocity;
            }
        }
        let (auto_dt, limits) = compute_dt(&particles, &physics, expected_max_velocity)?;
        let dt = dt.unwrap_or(auto_dt);
        for (name, value) in limits.terms() {
            log::info!("time step condition {name}: {value:.6e}");
        }
        log::info!("time step {dt:.6e}");
        if enforce_limits {
            limits.check(dt)?;
        }
        let next_particle = particles.iter().map(|p| p.id + 1).max().unwrap_or(0);
        let next_body = bodies.keys().next_back().map_or(0, |b| b + 1);
        let decomp = Decomposition::new(grid, &particles, workers)?;
        let mut workers = pool.install(|| distribute(particles, &decomp, 0))?;
        let init: BTreeMap<BodyId, (Vec3, Vec3)> =
            bodies.iter().map(|(&id, b)| (id, (b.velocity, b.angular_velocity))).collect();
        let empty = pool.install(|| reduce_mass_quantities(&mut workers, &mut bodies, &decomp.grid, physics.dx, None));
        for b in empty {
            log::warn!("body {b} has no particles; removed");
            bodies.remove(&b);
        }
        for (id, (u, w)) in init {
            if let Some(b) = bodies.get_mut(&id) {
                b.velocity = u;
                b.angular_velocity = w;
            }
        }
        let mut sim = Simulation {
            physics,
            decomp,
            workers,
            bodies,
            dirichlet,
            open_boundaries,
            dt,
            limits,
            time: 0.0,
            step: 0,
            rebuilds: 1,
            events: Vec::new(),
            enforce_limits,
            next_body,
            next_particle,
            pool,
        };
        {
            let Simulation { workers, bodies, pool, .. } = &mut sim;
            pool.install(|| workers.par_iter_mut().for_each(|w| slave_rigid_velocities(w, bodies)));
        }
        sim.update_open_boundaries(false);
        sim.initial_forces()?;
        Ok(sim)
    }

    pub fn n_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn grid(&self) -> &DomainGrid {
        &self.decomp.grid
    }

    fn initial_forces(&mut self) -> Result<()> {
        let t = self.time;
        self.pool.install(|| {
            let phys = &self.physics;
            let groups = &self.dirichlet;
            self.workers.par_iter_mut().for_each(|w| apply_thermal_dirichlet(w, phys, groups, t));
        });
        self.evaluate(None)
    }

    /// Density, optional scalar update, wall extrapolation, forces and rigid
    /// reductions at the current positions.
    fn evaluate(&mut self, dt: Option<f64>) -> Result<()> {
        let Simulation { physics: phys, decomp, workers, bodies, dirichlet, pool, time, .. } = self;
        let t = *time;
        pool.install(|| {
            refresh_halo(workers, decomp);
            workers.par_iter_mut().for_each(|w| density_summation(w, phys));
            refresh_halo(workers, decomp);
            workers.par_iter_mut().for_each(|w| {
                if let Some(dt) = dt {
                    apply_thermal_dirichlet(w, phys, dirichlet, t);
                    update_rates(w, phys);
                    integrate_scalars(w, phys, dt);
                }
                extrapolate_boundaries(w, phys);
            });
            refresh_halo(workers, decomp);
            workers.par_iter_mut().try_for_each(|w| {
                momentum(w, phys)?;
                contact_forces(w, phys)
            })?;
            reduce_force_torque(workers, bodies, &decomp.grid);
            Ok(())
        })
    }

    /// Advance one step of size `dt`.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.dt;
        let half = 0.5 * dt;
        let t_new = self.time + dt;
        {
            let Simulation { physics: phys, decomp, workers, bodies, pool, .. } = self;
            let grid = &decomp.grid;
            pool.install(|| {
                for b in bodies.values_mut() {
                    kick_body(b, half);
                    drift_body(b, dt, grid);
                }
                let bodies = &*bodies;
                workers.par_iter_mut().for_each(|w| {
                    kick_fluid(w, half);
                    drift_fluid(w, dt);
                    slave_rigid_particles(w, bodies, grid);
                    move_walls(w, phys, t_new, grid);
                });
            });
        }
        self.time = t_new;
        self.evaluate(Some(dt))?;
        {
            let Simulation { workers, bodies, pool, .. } = self;
            pool.install(|| {
                for b in bodies.values_mut() {
                    kick_body(b, half);
                }
                let bodies = &*bodies;
                workers.par_iter_mut().for_each(|w| {
                    final_kick_fluid(w, half);
                    slave_rigid_velocities(w, bodies);
                });
            });
        }
        self.step += 1;
        let step = self.step;
        self.events = {
            let Simulation { physics, decomp, workers, bodies, next_body, pool, .. } = self;
            pool.install(|| apply_transitions(workers, decomp, bodies, next_body, physics, step))
        };
        let forced = self.update_open_boundaries(true);
        let u_max = self.pool.install(|| self.workers.par_iter().map(max_fluid_speed).reduce(|| 0.0, f64::max));
        if self.enforce_limits {
            self.limits.check_cfl(dt, u_max)?;
        }
        let rebuild_now = forced || self.pool.install(|| needs_rebuild(&self.workers, &self.decomp.grid));
        if rebuild_now {
            let Simulation { decomp, workers, pool, .. } = self;
            pool.install(|| rebuild(workers, decomp, step))?;
            self.rebuilds += 1;
        }
        Ok(())
    }

    /// Step until `t_end` (within half a step).
    pub fn run_until(&mut self, t_end: f64) -> Result<()> {
        while self.time + 0.5 * self.dt < t_end {
            self.step()?;
        }
        Ok(())
    }

    /// Prescribe zone velocities, recycle inflow particles, delete outflow
    /// particles. Returns whether particles were added or removed.
    fn update_open_boundaries(&mut self, allow_changes: bool) -> bool {
        if self.open_boundaries.is_empty() {
            return false;
        }
        let t = self.time;
        let zones = &self.open_boundaries;
        let grid = &self.decomp.grid;
        let mut spawned: Vec<(usize, Particle)> = Vec::new();
        let mut removed = 0usize;
        for w in self.workers.iter_mut() {
            w.particles.truncate(w.n_owned);
            let mut keep = Vec::with_capacity(w.particles.len());
            for mut p in w.particles.drain(..) {
                if !p.tag.is_fluid() {
                    keep.push(p);
                    continue;
                }
                match p.open_zone {
                    Some(z) => {
                        let zone = &zones[z as usize];
                        match (zone.kind, zone.transit(&p.position)) {
                            (_, ZoneTransit::Inside) => {
                                p.velocity = zone.velocity(&p.position, t);
                                p.transport_velocity = p.velocity;
                                p.acceleration = Vec3::zeros();
                                p.background_acceleration = Vec3::zeros();
                            }
                            (OpenBoundaryKind::Inflow, transit) if allow_changes => {
                                if transit == ZoneTransit::Downstream {
                                    let mut q = p.clone();
                                    q.position = zone.recycle_position(&p.position);
                                    q.velocity = zone.velocity(&q.position, t);
                                    q.transport_velocity = q.velocity;
                                    q.temperature = zone.temperature;
                                    q.concentration = zone.concentration;
                                    spawned.push((w.rank, q));
                                }
                                p.open_zone = None;
                            }
                            (OpenBoundaryKind::Outflow, _) if allow_changes => {
                                let mut q = p.position;
                                grid.wrap(&mut q);
                                if grid.contains(&q) && !zone.contains(&q) {
                                    p.open_zone = None;
                                } else {
                                    removed += 1;
                                    continue;
                                }
                            }
                            _ => {}
                        }
                    }
                    None => {
                        if let Some(z) = zones
                            .iter()
                            .position(|zone| zone.kind == OpenBoundaryKind::Outflow && zone.contains(&p.position))
                        {
                            p.open_zone = Some(z as u16);
                        }
                    }
                }
                keep.push(p);
            }
            w.particles = keep;
            w.n_owned = w.particles.len();
        }
        let added = !spawned.is_empty();
        for (rank, mut q) in spawned {
            q.id = self.next_particle;
            self.next_particle += 1;
            let w = &mut self.workers[rank];
            w.particles.push(q);
            w.n_owned += 1;
        }
        let changed = removed > 0 || added;
        if !changed {
            // ghosts were dropped above; neighbor indices still refer to them
            self.pool.install(|| refresh_halo(&mut self.workers, &self.decomp));
        }
        changed
    }

    /// Owned particles of all workers, sorted by id.
    pub fn particles(&self) -> Vec<Particle> {
        let mut all: Vec<Particle> = self.workers.iter().flat_map(|w| w.owned().iter().cloned()).collect();
        all.sort_by_key(|p| p.id);
        all
    }

    pub fn n_particles(&self) -> usize {
        self.workers.iter().map(|w| w.n_owned).sum()
    }

    pub fn body(&self, id: BodyId) -> Option<&RigidBody> {
        self.bodies.get(&id)
    }

    /// Σ m over fluid particles.
    pub fn fluid_mass(&self) -> f64 {
        self.particles().iter().filter(|p| p.tag.is_fluid()).map(|p| p.mass).sum()
    }

    /// Σ m over fluid and rigid particles.
    pub fn total_mass(&self) -> f64 {
        self.particles().iter().filter(|p| !p.tag.is_boundary()).map(|p| p.mass).sum()
    }

    /// Σ m u of fluid particles plus Σ m_k u_k of bodies.
    pub fn linear_momentum(&self) -> Vec3 {
        let fluid: Vec3 = self
            .particles()
            .iter()
            .filter(|p| p.tag.is_fluid())
            .fold(Vec3::zeros(), |s, p| s + p.velocity * p.mass);
        self.bodies.values().fold(fluid, |s, b| s + b.velocity * b.mass)
    }

    /// Σ m c_p T over fluid and rigid particles.
    pub fn thermal_energy(&self) -> f64 {
        self.particles()
            .iter()
            .filter(|p| !p.tag.is_boundary())
            .map(|p| p.mass * self.physics.material(p).heat_capacity * p.temperature)
            .sum()
    }

    /// Range of `field` over fluid and rigid particles.
    pub fn scalar_range(&self, field: ScalarField) -> (f64, f64) {
        self.particles()
            .iter()
            .filter(|p| !p.tag.is_boundary())
            .map(|p| crate::transition::scalar(p, field))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// Ids of live bodies.
    pub fn body_ids(&self) -> BTreeSet<BodyId> {
        self.bodies.keys().copied().collect()
    }
}
