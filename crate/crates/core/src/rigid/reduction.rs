use crate::model::{Mat3, Vec3};

/// Moment of inertia of a single rigid particle, treated as a disk (2D) or
/// sphere (3D) of the same area/volume as its lattice cell.
pub fn particle_inertia(mass: f64, dx: f64, dimension: usize) -> f64 {
    match dimension {
        2 => {
            let r = dx / std::f64::consts::PI.sqrt();
            0.5 * mass * r * r
        }
        3 => {
            let r = (0.75 / std::f64::consts::PI).cbrt() * dx;
            0.4 * mass * r * r
        }
        _ => panic!("rigid bodies need dimension 2 or 3"),
    }
}

/// m (|d|² E − d dᵀ): parallel-axis shift of a point mass.
pub fn steiner(mass: f64, d: &Vec3) -> Mat3 {
    (Mat3::identity() * d.norm_squared() - d * d.transpose()) * mass
}

/// Mass, center of mass and inertia (about that center) of a subset of a
/// body's particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialMass {
    pub mass: f64,
    pub com: Vec3,
    pub inertia: Mat3,
    pub count: usize,
}

impl Default for PartialMass {
    fn default() -> Self {
        PartialMass { mass: 0.0, com: Vec3::zeros(), inertia: Mat3::zeros(), count: 0 }
    }
}

impl PartialMass {
    /// From `(mass, position, particle inertia)` triples; positions must be
    /// unwrapped consistently (same periodic image).
    pub fn from_particles(items: &[(f64, Vec3, f64)]) -> Self {
        if items.is_empty() {
            return PartialMass::default();
        }
        let mut m = 0.0;
        let mut mr = Vec3::zeros();
        for (mi, ri, _) in items {
            m += mi;
            mr += ri * *mi;
        }
        let com = mr / m;
        let mut inertia = Mat3::zeros();
        for (mi, ri, ii) in items {
            inertia += Mat3::identity() * *ii + steiner(*mi, &(ri - com));
        }
        PartialMass { mass: m, com, inertia, count: items.len() }
    }

    /// Combine partial results in the given order via Huygens–Steiner.
    pub fn combine(parts: &[PartialMass]) -> PartialMass {
        let mut m = 0.0;
        let mut mr = Vec3::zeros();
        let mut count = 0;
        for p in parts.iter().filter(|p| p.count > 0) {
            m += p.mass;
            mr += p.com * p.mass;
            count += p.count;
        }
        if count == 0 {
            return PartialMass::default();
        }
        let com = mr / m;
        let mut inertia = Mat3::zeros();
        for p in parts.iter().filter(|p| p.count > 0) {
            inertia += p.inertia + steiner(p.mass, &(p.com - com));
        }
        PartialMass { mass: m, com, inertia, count }
    }
}

/// Resultant force and torque (about the global center of mass) of a subset
/// of a body's particles.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PartialLoad {
    pub force: Vec3,
    pub torque: Vec3,
}

impl PartialLoad {
    /// From `(position, force)` pairs about `com`.
    pub fn from_particles(com: &Vec3, items: &[(Vec3, Vec3)]) -> Self {
        let mut l = PartialLoad::default();
        for (r, f) in items {
            l.force += f;
            l.torque += (r - com).cross(f);
        }
        l
    }

    pub fn combine(parts: &[PartialLoad]) -> PartialLoad {
        let mut l = PartialLoad::default();
        for p in parts {
            l.force += p.force;
            l.torque += p.torque;
        }
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_radius_examples() {
        let pi = std::f64::consts::PI;
        assert!((particle_inertia(1.0, pi.sqrt(), 2) - 0.5).abs() < 1e-15);
        assert!((particle_inertia(1.0, (pi / 0.75).cbrt(), 3) - 0.4).abs() < 1e-15);
        let dx = 0.37;
        let r = dx / pi.sqrt();
        assert!((pi * r * r - dx * dx).abs() < 1e-15);
    }

    #[test]
    fn single_particle_body() {
        let p = PartialMass::from_particles(&[(2.0, Vec3::new(1.0, 2.0, 0.0), 0.3)]);
        assert_eq!(p.mass, 2.0);
        assert_eq!(p.com, Vec3::new(1.0, 2.0, 0.0));
        assert_eq!(p.inertia[(2, 2)], 0.3);
    }

    #[test]
    fn two_particles_parallel_axis() {
        let (m, ir, d) = (1.5, 0.01, 0.7);
        let p = PartialMass::from_particles(&[(m, Vec3::new(-d, 0.0, 0.0), ir), (m, Vec3::new(d, 0.0, 0.0), ir)]);
        assert!((p.inertia[(2, 2)] - 2.0 * (ir + m * d * d)).abs() < 1e-15);
    }

    #[test]
    fn uniform_force_field_has_no_torque() {
        let f = Vec3::new(0.0, -1.0, 0.0);
        let items: Vec<(Vec3, Vec3)> = [-1.0, 0.0, 1.0].iter().map(|&x| (Vec3::new(x, 0.0, 0.0), f)).collect();
        let l = PartialLoad::from_particles(&Vec3::zeros(), &items);
        assert_eq!(l.torque, Vec3::zeros());
        assert_eq!(l.force, f * 3.0);
    }

    #[test]
    fn single_force_torque_is_arm_cross_force() {
        let rho = Vec3::new(0.2, 0.5, -0.1);
        let f = Vec3::new(1.0, -2.0, 0.3);
        let c = Vec3::new(3.0, 3.0, 3.0);
        let l = PartialLoad::from_particles(&c, &[(c + rho, f)]);
        assert!((l.torque - rho.cross(&f)).norm() < 1e-14);
    }
}
