//! Kick-drift-kick velocity Verlet for fluid particles and rigid bodies,
//! rigid particle slaving and the time step restrictions.

mod quaternion;

pub use quaternion::{rotate_vector, Quaternion};

use crate::decomposition::{DomainGrid, Worker};
use crate::error::{Error, Result};
use crate::model::{Particle, ScalarField, Vec3};
use crate::physics::Physics;
use crate::rigid::{BodySet, RigidBody};

/// 0.25 h/(c + |u_max|).
pub fn cfl_limit(h: f64, c: f64, u_max: f64) -> f64 {
    0.25 * h / (c + u_max)
}

/// 0.125 h²/ν.
pub fn viscous_limit(h: f64, nu: f64) -> f64 {
    0.125 * h * h / nu
}

/// 0.25 √(h/|b|).
pub fn body_force_limit(h: f64, b: f64) -> f64 {
    0.25 * (h / b).sqrt()
}

/// 0.22 √(m_r/k_c).
pub fn contact_limit(m: f64, k: f64) -> f64 {
    0.22 * (m / k).sqrt()
}

/// 0.1 ρ c_p h²/κ.
pub fn conduction_limit(rho: f64, cp: f64, h: f64, kappa: f64) -> f64 {
    0.1 * rho * cp * h * h / kappa
}

/// 0.1 h²/D, the same bound for species diffusion.
pub fn diffusion_limit(h: f64, d: f64) -> f64 {
    0.1 * h * h / d
}

/// Candidate steps of every applicable condition; `None` where the physics is
/// absent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepLimits {
    pub u_max: f64,
    pub b_max: f64,
    /// Largest fluid speed of sound; needed to re-check the CFL term.
    pub c_max: f64,
    pub h: f64,
    pub cfl: Option<f64>,
    pub viscous: Option<f64>,
    pub body_force: Option<f64>,
    pub contact: Option<f64>,
    pub conduction: Option<f64>,
    pub diffusion: Option<f64>,
}

impl StepLimits {
    /// Evaluate every condition over the particles present. `u_floor` is a
    /// lower bound for u_max, for flows that start at rest.
    pub fn evaluate(particles: &[Particle], phys: &Physics, u_floor: f64) -> Self {
        let h = phys.kernel.h();
        let mats = &phys.materials;
        let mut present = vec![false; mats.len()];
        let mut fluid_present = vec![false; mats.len()];
        let mut u_max = u_floor.max(0.0);
        let mut m_rigid = f64::INFINITY;
        for p in particles {
            let m = p.material as usize;
            if p.tag.is_boundary() {
                continue;
            }
            present[m] = true;
            if p.tag.is_fluid() {
                fluid_present[m] = true;
                u_max = u_max.max(p.velocity.norm());
            } else {
                m_rigid = m_rigid.min(p.mass);
            }
        }
        // Fluid that may solidify can become a contact partner later.
        if m_rigid.is_infinite() && mats.iter().any(|m| m.transition.is_some()) {
            for p in particles.iter().filter(|p| p.tag.is_fluid()) {
                m_rigid = m_rigid.min(p.mass);
            }
        }
        let mut l = StepLimits { u_max, h, ..Default::default() };
        let min_opt = |a: Option<f64>, b: f64| Some(a.map_or(b, |a: f64| a.min(b)));
        for (i, m) in mats.iter().enumerate() {
            if fluid_present[i] {
                l.c_max = l.c_max.max(m.speed_of_sound);
                if m.kinematic_viscosity > 0.0 {
                    l.viscous = min_opt(l.viscous, viscous_limit(h, m.kinematic_viscosity));
                }
            }
            if !present[i] {
                continue;
            }
            l.b_max = l.b_max.max(m.body_force().norm());
            if m.conductivity > 0.0 && m.heat_capacity > 0.0 {
                l.conduction =
                    min_opt(l.conduction, conduction_limit(m.reference_density, m.heat_capacity, h, m.conductivity));
            }
            if m.diffusivity > 0.0 {
                l.diffusion = min_opt(l.diffusion, diffusion_limit(h, m.diffusivity));
            }
        }
        if fluid_present.iter().any(|&f| f) {
            l.cfl = Some(cfl_limit(h, l.c_max, u_max));
        }
        if l.b_max > 0.0 {
            l.body_force = Some(body_force_limit(h, l.b_max));
        }
        if let Some(c) = phys.contact {
            if m_rigid.is_finite() && c.stiffness > 0.0 {
                l.contact = Some(contact_limit(m_rigid, c.stiffness));
            }
        }
        // Dirichlet walls conduct too.
        for field in [ScalarField::Temperature, ScalarField::Concentration] {
            for w in &phys.walls {
                let g = match field {
                    ScalarField::Temperature => w.temperature_group,
                    ScalarField::Concentration => w.concentration_group,
                };
                if g.is_none() {
                    continue;
                }
                let m = mats.get(w.material as usize);
                match field {
                    ScalarField::Temperature if m.conductivity > 0.0 && m.heat_capacity > 0.0 => {
                        l.conduction =
                            min_opt(l.conduction, conduction_limit(m.reference_density, m.heat_capacity, h, m.conductivity));
                    }
                    ScalarField::Concentration if m.diffusivity > 0.0 => {
                        l.diffusion = min_opt(l.diffusion, diffusion_limit(h, m.diffusivity));
                    }
                    _ => {}
                }
            }
        }
        l
    }

    /// Named candidates that apply.
    pub fn terms(&self) -> Vec<(&'static str, f64)> {
        [
            ("cfl", self.cfl),
            ("viscous", self.viscous),
            ("body force", self.body_force),
            ("contact", self.contact),
            ("conduction", self.conduction),
            ("diffusion", self.diffusion),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| (n, v)))
        .collect()
    }

    /// Most restrictive candidate.
    pub fn min(&self) -> Option<(&'static str, f64)> {
        self.terms().into_iter().min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Refuse `dt` if it exceeds any candidate.
    pub fn check(&self, dt: f64) -> Result<()> {
        for (name, limit) in self.terms() {
            if dt > limit * (1.0 + 1e-12) {
                return Err(Error::StepLimit { dt, limit, condition: name });
            }
        }
        Ok(())
    }

    /// Re-evaluate the CFL condition for a new maximum speed.
    pub fn check_cfl(&self, dt: f64, u_max: f64) -> Result<()> {
        if self.cfl.is_none() {
            return Ok(());
        }
        let limit = cfl_limit(self.h, self.c_max, u_max);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::StepLimit { dt, limit, condition: "cfl" });
        }
        Ok(())
    }
}

/// Δt = min over all applicable conditions. Fails when none applies.
pub fn compute_dt(particles: &[Particle], phys: &Physics, u_floor: f64) -> Result<(f64, StepLimits)> {
    let l = StepLimits::evaluate(particles, phys, u_floor);
    match l.min() {
        Some((_, dt)) => Ok((dt, l)),
        None => Err(Error::config("no time step condition applies (no fluid, body force, contact or conduction)")),
    }
}

/// Half kick of owned fluid particles: u += Δt/2 a, then the transport
/// velocity ũ = u + Δt/2 a_bg.
pub fn kick_fluid(w: &mut Worker, half_dt: f64) {
    for p in w.owned_mut() {
        if p.tag.is_fluid() && p.open_zone.is_none() {
            p.velocity += p.acceleration * half_dt;
            p.transport_velocity = p.velocity + p.background_acceleration * half_dt;
        }
    }
}

/// Second half kick of owned fluid particles.
pub fn final_kick_fluid(w: &mut Worker, half_dt: f64) {
    for p in w.owned_mut() {
        if p.tag.is_fluid() && p.open_zone.is_none() {
            p.velocity += p.acceleration * half_dt;
        }
    }
}

/// r += Δt ũ for owned fluid particles (ũ = u without transport velocity).
pub fn drift_fluid(w: &mut Worker, dt: f64) {
    for p in w.owned_mut() {
        if p.tag.is_fluid() {
            p.position += p.transport_velocity * dt;
        }
    }
}

pub fn kick_body(b: &mut RigidBody, half_dt: f64) {
    if b.mobile {
        b.velocity += b.acceleration * half_dt;
        b.angular_velocity += b.angular_acceleration * half_dt;
    }
}

/// r_k += Δt u_k and q ← q_trans ∘ q with q_trans = exp(Δt ω_k).
pub fn drift_body(b: &mut RigidBody, dt: f64, grid: &DomainGrid) {
    if !b.mobile {
        return;
    }
    b.com += b.velocity * dt;
    grid.wrap(&mut b.com);
    if b.angular_velocity != Vec3::zeros() {
        let q = Quaternion::from_rotation_vector(&(b.angular_velocity * dt));
        b.orientation = (q * b.orientation).normalize();
    }
}

/// Place owned rigid particles at r_k + R χ (nearest periodic image of their
/// previous position) and set u_r = u_k + ω_k × r_rk and the rigid
/// acceleration used by the wall pressure extrapolation.
pub fn slave_rigid_particles(w: &mut Worker, bodies: &BodySet, grid: &DomainGrid) {
    for p in w.owned_mut() {
        let Some(b) = p.tag.body() else { continue };
        let Some(body) = bodies.get(&b) else { continue };
        let d = body.orientation.rotate(&p.body_offset);
        p.position = grid.nearest_image(body.com + d, &p.position);
        p.velocity = body.point_velocity(&d);
        p.acceleration = body.point_acceleration(&d);
    }
}

/// End-of-step rigid particle velocities u_r = u_k + ω_k × r_rk.
pub fn slave_rigid_velocities(w: &mut Worker, bodies: &BodySet) {
    for p in w.owned_mut() {
        let Some(b) = p.tag.body() else { continue };
        let Some(body) = bodies.get(&b) else { continue };
        let d = body.orientation.rotate(&p.body_offset);
        p.velocity = body.point_velocity(&d);
        p.acceleration = body.point_acceleration(&d);
    }
}

/// Moving walls follow their prescribed motion: r = r0 + s(t).
pub fn move_walls(w: &mut Worker, phys: &Physics, t: f64, grid: &DomainGrid) {
    for p in w.owned_mut() {
        let crate::model::PhaseTag::Boundary(i) = p.tag else { continue };
        let motion = &phys.walls[i as usize].motion;
        if !motion.moves() {
            continue;
        }
        p.velocity = motion.velocity(t);
        p.acceleration = motion.acceleration(t);
        let target = p.body_offset + motion.displacement(t);
        p.position = grid.nearest_image(target, &p.position);
    }
}

/// Largest fluid speed among owned particles.
pub fn max_fluid_speed(w: &Worker) -> f64 {
    w.owned().iter().filter(|p| p.tag.is_fluid()).map(|p| p.velocity.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ContactSpec, Material, PhaseTag};
    use std::f64::consts::PI;

    #[test]
    fn hand_evaluated_terms() {
        assert!((cfl_limit(2e-4, 0.25, 0.01) - 0.25 * 2e-4 / 0.26).abs() < 1e-18);
        assert!((cfl_limit(2e-4, 0.25, 0.01) - 1.923e-4).abs() < 1e-7);
        assert!((viscous_limit(2e-4, 5e-6) - 1.0e-3).abs() < 1e-15);
        assert!((contact_limit(1e-3, 1e3) - 2.2e-4).abs() < 1e-15);
    }

    #[test]
    fn compute_dt_picks_the_most_restrictive() {
        let mut m = Material::new("water", 1e3);
        m.speed_of_sound = 0.25;
        m.kinematic_viscosity = 5e-6;
        let mut phys = Physics::simple(2, 2e-4, vec![m]);
        phys.contact = Some(ContactSpec { stiffness: 1e3, damping: 0.0 });
        let mut p = Particle::new(0, PhaseTag::Fluid(0), Vec3::zeros(), 1e-3, 1e3);
        p.velocity = Vec3::new(0.01, 0.0, 0.0);
        let (dt, l) = compute_dt(&[p], &phys, 0.0).unwrap();
        assert_eq!(l.contact, None);
        assert_eq!(dt, cfl_limit(2e-4, 0.25, 0.01));
        assert!(l.check(dt * 1.01).is_err());
        assert!(l.check(dt).is_ok());
        assert!(l.check_cfl(dt, 1.0).is_err());
    }

    #[test]
    fn no_condition_is_an_error() {
        let phys = Physics::simple(2, 1.0, vec![Material::new("wall", 1.0)]);
        assert!(compute_dt(&[], &phys, 0.0).is_err());
    }

    #[test]
    fn constant_acceleration_step() {
        let g = Vec3::new(0.0, -9.81, 0.0);
        let mut b = RigidBody::new(0, 0, g);
        b.mass = 1.0;
        b.update_accelerations(2);
        b.velocity = Vec3::new(1.0, 0.0, 0.0);
        let grid = DomainGrid::from_parts(2, Vec3::new(-10.0, -10.0, 0.0), Vec3::new(10.0, 10.0, 0.0), [false; 3], 1.0, 1.0, 0.0)
            .unwrap();
        let dt = 0.1;
        kick_body(&mut b, 0.5 * dt);
        drift_body(&mut b, dt, &grid);
        b.update_accelerations(2);
        kick_body(&mut b, 0.5 * dt);
        assert!((b.velocity - (Vec3::new(1.0, 0.0, 0.0) + g * dt)).norm() < 1e-15);
        let expected = Vec3::new(1.0, 0.0, 0.0) * dt + g * (0.5 * dt * dt);
        assert!((b.com - expected).norm() < 1e-15);
    }

    #[test]
    fn quarter_turn_orientation() {
        let mut b = RigidBody::new(0, 0, Vec3::zeros());
        b.mass = 1.0;
        b.angular_velocity = Vec3::new(0.0, 0.0, PI / 2.0);
        let grid = DomainGrid::from_parts(2, Vec3::new(-1.0, -1.0, 0.0), Vec3::new(1.0, 1.0, 0.0), [false; 3], 0.5, 0.5, 0.0)
            .unwrap();
        drift_body(&mut b, 1.0, &grid);
        let h = (PI / 4.0).cos();
        assert!((b.orientation.w - h).abs() < 1e-15 && (b.orientation.v[2] - h).abs() < 1e-15);
        let mut still = RigidBody::new(1, 0, Vec3::zeros());
        let q0 = Quaternion::new(0.6, 0.0, 0.0, 0.8);
        still.orientation = q0;
        drift_body(&mut still, 1.0, &grid);
        assert_eq!(still.orientation, q0);
    }
}
