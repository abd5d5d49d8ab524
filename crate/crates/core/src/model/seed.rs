use crate::error::{Error, Result};

use super::{lattice_volume, Material, Particle, PhaseTag, Shape, Vec3};

/// Regular lattice points with spacing `dx` inside `region`.
///
/// The lattice passes through `anchor`; without one it is anchored at the
/// region's minimum corner plus `dx/2` on every axis. Enumeration order is
/// x fastest, then y, then z, so repeated calls are bit-identical.
pub fn lattice_points(region: &Shape, dx: f64, dimension: usize, anchor: Option<Vec3>) -> Vec<Vec3> {
    let (lo, hi) = region.bounds();
    let anchor = anchor.unwrap_or_else(|| lo.add_scalar(0.5 * dx));
    let mut first = [0i64; 3];
    let mut last = [0i64; 3];
    for a in 0..3 {
        if a < dimension {
            first[a] = ((lo[a] - anchor[a]) / dx).ceil() as i64;
            last[a] = ((hi[a] - anchor[a]) / dx).floor() as i64;
        }
    }
    let mut out = Vec::new();
    for k in first[2]..=last[2] {
        for j in first[1]..=last[1] {
            for i in first[0]..=last[0] {
                let mut p = Vec3::new(
                    anchor[0] + i as f64 * dx,
                    anchor[1] + j as f64 * dx,
                    anchor[2] + k as f64 * dx,
                );
                if dimension < 3 {
                    p[2] = 0.0;
                }
                if region.contains(&p, dimension) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Fill `region` with particles of one phase on a regular lattice.
///
/// Each particle gets mass ρ0·Δx^d and density ρ0; velocity, temperature and
/// concentration are zero. Ids are sequential starting at zero.
pub fn seed_lattice(
    region: &Shape,
    dx: f64,
    dimension: usize,
    tag: PhaseTag,
    material: &Material,
) -> Result<Vec<Particle>> {
    if !(dx > 0.0) {
        return Err(Error::config(format!("particle spacing must be positive, got {dx}")));
    }
    if !(2..=3).contains(&dimension) && dimension != 1 {
        return Err(Error::config(format!("unsupported dimension {dimension}")));
    }
    let mass = material.reference_density * lattice_volume(dx, dimension);
    Ok(lattice_points(region, dx, dimension, None)
        .into_iter()
        .enumerate()
        .map(|(i, p)| Particle::new(i as u64, tag, p, mass, material.reference_density))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn water() -> Material {
        Material::new("water", 1.0)
    }

    #[test]
    fn unit_square_gives_four_quarter_mass_particles() {
        let ps = seed_lattice(&Shape::rect([0.0, 0.0], [1.0, 1.0]), 0.5, 2, PhaseTag::Fluid(0), &water())
            .unwrap();
        assert_eq!(ps.len(), 4);
        for p in &ps {
            assert_eq!(p.mass, 0.25);
        }
        assert_eq!(ps[0].position, Vec3::new(0.25, 0.25, 0.0));
    }

    #[test]
    fn non_positive_spacing_is_a_configuration_error() {
        let r = seed_lattice(&Shape::rect([0.0, 0.0], [1.0, 1.0]), 0.0, 2, PhaseTag::Fluid(0), &water());
        assert!(matches!(r, Err(Error::Config(_))));
        let r = seed_lattice(&Shape::rect([0.0, 0.0], [1.0, 1.0]), -1.0, 2, PhaseTag::Fluid(0), &water());
        assert!(r.is_err());
    }

    #[test]
    fn empty_region_is_not_an_error() {
        let ps = seed_lattice(&Shape::circle([0.0, 0.0], 0.1), 1.0, 2, PhaseTag::Fluid(0), &water()).unwrap();
        assert!(ps.is_empty());
    }

    #[test]
    fn coarse_disk_count_matches_point_in_circle_scan() {
        let (d, dx) = (2.5e-3, 4.0e-4);
        let r = d / 2.0;
        let ps = seed_lattice(&Shape::circle([0.0, 0.0], r), dx, 2, PhaseTag::Rigid(0), &water()).unwrap();
        // independent scan over a generous integer window
        let mut count = 0;
        for j in -20i32..20 {
            for i in -20i32..20 {
                let x = -r + dx / 2.0 + i as f64 * dx;
                let y = -r + dx / 2.0 + j as f64 * dx;
                if x * x + y * y <= r * r {
                    count += 1;
                }
            }
        }
        assert_eq!(ps.len(), count);
        assert_eq!(count, 32);
    }

    #[test]
    fn fine_disk_mass_close_to_analytic() {
        let m = Material::new("solid", 1.0e3);
        let dx = 0.5e-4;
        let ps = seed_lattice(&Shape::circle([0.0, 0.0], 1.25e-3), dx, 2, PhaseTag::Rigid(0), &m).unwrap();
        let total: f64 = ps.iter().map(|p| p.mass).sum();
        assert!((total - 4.908738521e-3).abs() / 4.908738521e-3 < 1.5e-2, "{total}");
    }

    #[test]
    fn reseeding_is_bit_identical() {
        let shape = Shape::sphere([0.1, 0.2, 0.3], 0.37);
        let a = lattice_points(&shape, 0.05, 3, None);
        let b = lattice_points(&shape, 0.05, 3, None);
        assert_eq!(a, b);
    }

    #[test]
    fn total_mass_is_count_times_cell_mass() {
        let m = Material::new("m", 997.0);
        let dx = 0.013;
        let ps = seed_lattice(&Shape::sphere([0.0; 3], 0.1), dx, 3, PhaseTag::Fluid(0), &m).unwrap();
        let cell = 997.0 * dx * dx * dx;
        let total: f64 = ps.iter().map(|p| p.mass).sum();
        let expected: f64 = std::iter::repeat(cell).take(ps.len()).sum();
        assert_eq!(total, expected);
    }
}
