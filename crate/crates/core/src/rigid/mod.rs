//! Rigid bodies as clusters of rigid particles.
//!
//! Mass quantities and loads are reduced in two stages: every worker builds
//! partial sums over the body particles it owns, then the coordinator
//! combines the partials in rank order.

pub mod contact;
pub mod reduction;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

pub use contact::{contact_force, contact_forces};
pub use reduction::{particle_inertia, steiner, PartialLoad, PartialMass};

use crate::decomposition::{DomainGrid, Worker};
use crate::integrator::Quaternion;
use crate::model::{BodyId, Mat3, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct RigidBody {
    pub id: BodyId,
    pub material: u16,
    /// Fixed bodies exert forces but are never integrated.
    pub mobile: bool,
    pub mass: f64,
    pub com: Vec3,
    /// Inertia tensor about the center of mass in the body frame. In 2D only
    /// the zz entry is meaningful.
    pub inertia: Mat3,
    pub orientation: Quaternion,
    pub velocity: Vec3,
    pub angular_velocity: Vec3,
    pub force: Vec3,
    pub torque: Vec3,
    pub acceleration: Vec3,
    pub angular_acceleration: Vec3,
    /// Body force per unit mass.
    pub body_force: Vec3,
    pub n_particles: usize,
    /// Worker holding the authoritative state.
    pub owner: usize,
}

pub type BodySet = BTreeMap<BodyId, RigidBody>;

impl RigidBody {
    pub fn new(id: BodyId, material: u16, body_force: Vec3) -> Self {
        RigidBody {
            id,
            material,
            mobile: true,
            mass: 0.0,
            com: Vec3::zeros(),
            inertia: Mat3::zeros(),
            orientation: Quaternion::identity(),
            velocity: Vec3::zeros(),
            angular_velocity: Vec3::zeros(),
            force: Vec3::zeros(),
            torque: Vec3::zeros(),
            acceleration: Vec3::zeros(),
            angular_acceleration: Vec3::zeros(),
            body_force,
            n_particles: 0,
            owner: 0,
        }
    }

    pub fn world_inertia(&self) -> Mat3 {
        let r = self.orientation.to_matrix();
        r * self.inertia * r.transpose()
    }

    /// Store a world-frame inertia tensor in the body frame.
    pub fn set_world_inertia(&mut self, world: &Mat3) {
        let r = self.orientation.to_matrix();
        self.inertia = r.transpose() * world * r;
    }

    /// a = f/m + b, α = I⁻¹ τ. Degenerate inertia gives α = 0.
    pub fn update_accelerations(&mut self, dimension: usize) {
        if !self.mobile || self.mass <= 0.0 {
            self.acceleration = Vec3::zeros();
            self.angular_acceleration = Vec3::zeros();
            return;
        }
        self.acceleration = self.force / self.mass + self.body_force;
        self.angular_acceleration = if dimension == 2 {
            let izz = self.inertia[(2, 2)];
            if izz > 0.0 {
                Vec3::new(0.0, 0.0, self.torque[2] / izz)
            } else {
                Vec3::zeros()
            }
        } else {
            match self.world_inertia().try_inverse() {
                Some(inv) if inv.iter().all(|x| x.is_finite()) => inv * self.torque,
                _ => {
                    log::warn!("body {} has a singular inertia tensor; no angular acceleration", self.id);
                    Vec3::zeros()
                }
            }
        };
    }

    /// u_k + ω × d for a world-frame offset d.
    pub fn point_velocity(&self, d: &Vec3) -> Vec3 {
        self.velocity + self.angular_velocity.cross(d)
    }

    /// a_k + α × d + ω × (ω × d).
    pub fn point_acceleration(&self, d: &Vec3) -> Vec3 {
        let w = &self.angular_velocity;
        self.acceleration + self.angular_acceleration.cross(d) + w.cross(&w.cross(d))
    }

    /// Kinetic energy ½ m u² + ½ ω·Iω.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * self.velocity.norm_squared()
            + 0.5 * self.angular_velocity.dot(&(self.world_inertia() * self.angular_velocity))
    }
}

/// Recompute mass, center of mass, inertia and particle counts of `which`
/// bodies (all when `None`), then refresh every affected particle's
/// body-frame offset. Returns the bodies that ended up without particles.
pub fn reduce_mass_quantities(
    workers: &mut [Worker],
    bodies: &mut BodySet,
    grid: &DomainGrid,
    dx: f64,
    which: Option<&BTreeSet<BodyId>>,
) -> Vec<BodyId> {
    let dim = grid.dimension;
    let selected = |b: BodyId| which.map_or(true, |s| s.contains(&b));
    let refs: BTreeMap<BodyId, Vec3> = bodies.iter().map(|(&id, b)| (id, b.com)).collect();
    let partials: Vec<BTreeMap<BodyId, PartialMass>> = workers
        .par_iter()
        .map(|w| {
            let mut items: BTreeMap<BodyId, Vec<(f64, Vec3, f64)>> = BTreeMap::new();
            for p in w.owned() {
                let Some(b) = p.tag.body() else { continue };
                if !selected(b) {
                    continue;
                }
                let reference = refs.get(&b).copied().unwrap_or(p.position);
                let pos = reference + grid.minimum_image(p.position - reference);
                items.entry(b).or_default().push((p.mass, pos, particle_inertia(p.mass, dx, dim)));
            }
            items.into_iter().map(|(b, v)| (b, PartialMass::from_particles(&v))).collect()
        })
        .collect();
    let mut combined: BTreeMap<BodyId, Vec<PartialMass>> = BTreeMap::new();
    for part in &partials {
        for (&b, pm) in part {
            combined.entry(b).or_default().push(*pm);
        }
    }
    let mut empty = Vec::new();
    for (&id, body) in bodies.iter_mut() {
        if !selected(id) {
            continue;
        }
        match combined.get(&id) {
            Some(parts) => {
                let total = PartialMass::combine(parts);
                body.mass = total.mass;
                body.com = total.com;
                body.n_particles = total.count;
                body.set_world_inertia(&total.inertia);
            }
            None => {
                body.n_particles = 0;
                empty.push(id);
            }
        }
    }
    update_offsets(workers, bodies, grid, which);
    empty
}

/// χ = Rᵀ (r_r − r_k) for rigid particles of the selected bodies.
pub fn update_offsets(workers: &mut [Worker], bodies: &BodySet, grid: &DomainGrid, which: Option<&BTreeSet<BodyId>>) {
    workers.par_iter_mut().for_each(|w| {
        for p in w.owned_mut() {
            let Some(b) = p.tag.body() else { continue };
            if which.map_or(false, |s| !s.contains(&b)) {
                continue;
            }
            if let Some(body) = bodies.get(&b) {
                let d = grid.minimum_image(p.position - body.com);
                p.body_offset = body.orientation.conjugate().rotate(&d);
            }
        }
    });
}

/// Resultant force and torque of every body from its particles' force
/// accumulators, then the body accelerations.
pub fn reduce_force_torque(workers: &[Worker], bodies: &mut BodySet, grid: &DomainGrid) {
    if bodies.is_empty() {
        return;
    }
    let coms: BTreeMap<BodyId, Vec3> = bodies.iter().map(|(&id, b)| (id, b.com)).collect();
    let partials: Vec<BTreeMap<BodyId, PartialLoad>> = workers
        .par_iter()
        .map(|w| {
            let mut out: BTreeMap<BodyId, PartialLoad> = BTreeMap::new();
            for p in w.owned() {
                let Some(b) = p.tag.body() else { continue };
                let Some(com) = coms.get(&b) else { continue };
                let arm = grid.minimum_image(p.position - com);
                let l = out.entry(b).or_default();
                l.force += p.force;
                l.torque += arm.cross(&p.force);
            }
            out
        })
        .collect();
    for body in bodies.values_mut() {
        body.force = Vec3::zeros();
        body.torque = Vec3::zeros();
    }
    for part in &partials {
        for (b, l) in part {
            if let Some(body) = bodies.get_mut(b) {
                body.force += l.force;
                body.torque += l.torque;
            }
        }
    }
    for body in bodies.values_mut() {
        body.update_accelerations(grid.dimension);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_d_angular_acceleration_uses_zz() {
        let mut b = RigidBody::new(0, 0, Vec3::zeros());
        b.mass = 2.0;
        b.inertia[(2, 2)] = 0.5;
        b.torque = Vec3::new(0.0, 0.0, 1.0);
        b.force = Vec3::new(4.0, 0.0, 0.0);
        b.update_accelerations(2);
        assert_eq!(b.acceleration, Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(b.angular_acceleration, Vec3::new(0.0, 0.0, 2.0));
    }

    #[test]
    fn collinear_three_d_body_gets_no_spin() {
        let mut b = RigidBody::new(0, 0, Vec3::zeros());
        b.mass = 1.0;
        b.inertia = Mat3::from_diagonal(&Vec3::new(0.0, 1.0, 1.0));
        b.torque = Vec3::new(1.0, 0.0, 0.0);
        b.update_accelerations(3);
        assert_eq!(b.angular_acceleration, Vec3::zeros());
    }

    #[test]
    fn fixed_body_does_not_accelerate() {
        let mut b = RigidBody::new(0, 0, Vec3::new(0.0, -9.81, 0.0));
        b.mobile = false;
        b.mass = 1.0;
        b.force = Vec3::new(1.0, 1.0, 0.0);
        b.update_accelerations(2);
        assert_eq!(b.acceleration, Vec3::zeros());
    }
}
