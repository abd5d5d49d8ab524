//! Weakly compressible fluid: density summation, equation of state,
//! transport velocity momentum equation, wall extrapolation and the
//! fluid-to-rigid coupling force.

pub mod open_boundary;

use crate::decomposition::Worker;
use crate::error::{Error, Result};
use crate::model::{Material, Particle, Vec3};
use crate::physics::Physics;

/// p = c²(ρ − ρ0).
pub fn eos_pressure(rho: f64, m: &Material) -> f64 {
    m.speed_of_sound * m.speed_of_sound * (rho - m.reference_density)
}

/// Harmonic mean 2ab/(a+b); zero when both vanish.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s > 0.0 {
        2.0 * a * b / s
    } else {
        0.0
    }
}

/// ρ_i = m_i Σ_j W_ij over the particle itself and all neighbors, followed
/// by the equation of state. Owned fluid particles only.
pub fn density_summation(w: &mut Worker, phys: &Physics) {
    let k = &phys.kernel;
    let rc = phys.cutoff();
    let rho: Vec<Option<f64>> = (0..w.n_owned)
        .map(|i| {
            let pi = &w.particles[i];
            if !pi.tag.is_fluid() {
                return None;
            }
            let mut s = k.w0();
            for &j in w.neighbors(i) {
                let r = (pi.position - w.particles[j as usize].position).norm();
                if r <= rc {
                    s += k.w(r);
                }
            }
            Some(pi.mass * s)
        })
        .collect();
    for (p, r) in w.particles.iter_mut().zip(rho) {
        if let Some(r) = r {
            p.density = r;
            p.pressure = eos_pressure(r, phys.materials.get(p.material as usize));
        }
    }
}

/// Pressure and no-slip interaction velocity of owned boundary and rigid
/// particles, extrapolated from the surrounding fluid:
///
/// p_b = (Σ_f p_f W_bf + Σ_f ρ_f (b_f − a_b)·(r_b − r_f) W_bf) / Σ_f W_bf,
/// ũ_b = Σ_f u_f W_bf / Σ_f W_bf, interaction velocity 2u_b − ũ_b.
///
/// Without fluid support the particle falls back to zero pressure and its own
/// velocity. `a_b` is read from the particle's acceleration field.
pub fn extrapolate_boundaries(w: &mut Worker, phys: &Physics) {
    let k = &phys.kernel;
    let rc = phys.cutoff();
    let out: Vec<Option<(f64, Vec3)>> = (0..w.n_owned)
        .map(|b| {
            let pb = &w.particles[b];
            if pb.tag.is_fluid() {
                return None;
            }
            let mut sw = 0.0;
            let mut sp = 0.0;
            let mut su = Vec3::zeros();
            for &j in w.neighbors(b) {
                let f = &w.particles[j as usize];
                if !f.tag.is_fluid() {
                    continue;
                }
                let d = pb.position - f.position;
                let r = d.norm();
                if r > rc {
                    continue;
                }
                let wk = k.w(r);
                let bf = phys.material(f).body_force();
                sw += wk;
                sp += (f.pressure + f.density * (bf - pb.acceleration).dot(&d)) * wk;
                su += f.velocity * wk;
            }
            if sw > 0.0 {
                Some((sp / sw, 2.0 * pb.velocity - su / sw))
            } else {
                log::debug!("particle {} has no fluid support", pb.id);
                Some((0.0, pb.velocity))
            }
        })
        .collect();
    for (p, o) in w.particles.iter_mut().zip(out) {
        if let Some((pressure, iv)) = o {
            p.pressure = pressure;
            p.interaction_velocity = iv;
        }
    }
}

/// What one side of a pair contributes to the momentum equation.
#[derive(Debug, Clone, Copy)]
pub struct PairView {
    pub rho: f64,
    pub p: f64,
    pub vol: f64,
    pub eta: f64,
    pub u: Vec3,
    /// ρ u ⊗ (ũ − u) enters as ρ u ((ũ − u)·e); zero for walls and rigid particles.
    pub rho_u: Vec3,
    pub du: Vec3,
}

impl PairView {
    pub fn fluid(p: &Particle, m: &Material, tvf: bool) -> Self {
        let du = if tvf { p.transport_velocity - p.velocity } else { Vec3::zeros() };
        PairView {
            rho: p.density,
            p: p.pressure,
            vol: p.mass / p.density,
            eta: m.dynamic_viscosity(),
            u: p.velocity,
            rho_u: p.velocity * p.density,
            du,
        }
    }

    /// A wall or rigid particle as seen by a fluid particle of material `mf`:
    /// ρ = ρ0 + max(p, 0)/c², V = Δx^d ρ0/ρ, η taken from the fluid.
    pub fn solid(p: &Particle, mf: &Material, cell_volume: f64) -> Self {
        let c2 = mf.speed_of_sound * mf.speed_of_sound;
        let rho = mf.reference_density + p.pressure.max(0.0) / c2;
        PairView {
            rho,
            p: p.pressure,
            vol: cell_volume * mf.reference_density / rho,
            eta: mf.dynamic_viscosity(),
            u: p.interaction_velocity,
            rho_u: Vec3::zeros(),
            du: Vec3::zeros(),
        }
    }
}

/// Pair momentum exchange m_i a_ij for unit vector `e` = (r_i − r_j)/r and
/// kernel slope `dw`. Written so that swapping the roles of i and j (which
/// negates `e`) negates the result bit for bit.
#[inline]
pub fn pair_term(vi: &PairView, vj: &PairView, e: &Vec3, dw: f64, r: f64) -> Vec3 {
    let vv = vi.vol * vi.vol + vj.vol * vj.vol;
    let pt = (vj.rho * vi.p + vi.rho * vj.p) / (vi.rho + vj.rho);
    let eta = harmonic_mean(vi.eta, vj.eta);
    let a = (vi.rho_u * vi.du.dot(e) + vj.rho_u * vj.du.dot(e)) * 0.5;
    let pressure = e * (-pt * dw);
    let convective = a * dw;
    let viscous = (vi.u - vj.u) * (eta * dw / r);
    (pressure + convective + viscous) * vv
}

fn coincident(a: &Particle, b: &Particle) -> Error {
    Error::CoincidentParticles { a: a.id.min(b.id), b: a.id.max(b.id) }
}

/// Accelerations of owned fluid particles and coupling forces on owned rigid
/// particles.
///
/// Fluid: a_i = Σ_j pair_term/m_i + b_i, plus the background pressure
/// acceleration −p_b/m_i Σ_j (V_i² + V_j²) ∂W e_ij used for the transport
/// velocity. Rigid: f_r = −Σ_i m_i a_ir over fluid neighbors, overwriting
/// the force accumulator.
pub fn momentum(w: &mut Worker, phys: &Physics) -> Result<()> {
    let k = &phys.kernel;
    let rc = phys.cutoff();
    let cell = phys.cell_volume();
    let tvf = phys.transport_velocity;
    let mut out: Vec<(Vec3, Vec3)> = Vec::with_capacity(w.n_owned);
    for i in 0..w.n_owned {
        let pi = &w.particles[i];
        if pi.tag.is_boundary() {
            out.push((Vec3::zeros(), Vec3::zeros()));
            continue;
        }
        if pi.tag.is_fluid() {
            let mi = phys.material(pi);
            let vi = PairView::fluid(pi, mi, tvf);
            let mut acc = Vec3::zeros();
            let mut bg = Vec3::zeros();
            for &j in w.neighbors(i) {
                let pj = &w.particles[j as usize];
                let d = pi.position - pj.position;
                let r = d.norm();
                if r > rc {
                    continue;
                }
                if r == 0.0 {
                    return Err(coincident(pi, pj));
                }
                let e = d / r;
                let dw = k.dw_dr(r);
                let vj = if pj.tag.is_fluid() {
                    PairView::fluid(pj, phys.material(pj), tvf)
                } else {
                    PairView::solid(pj, mi, cell)
                };
                acc += pair_term(&vi, &vj, &e, dw, r);
                bg += e * ((vi.vol * vi.vol + vj.vol * vj.vol) * dw);
            }
            let inv_m = 1.0 / pi.mass;
            let a = acc * inv_m + mi.body_force();
            let abg = if tvf { bg * (-mi.background_pressure * inv_m) } else { Vec3::zeros() };
            out.push((a, abg));
        } else {
            let mut f = Vec3::zeros();
            for &j in w.neighbors(i) {
                let pj = &w.particles[j as usize];
                if !pj.tag.is_fluid() {
                    continue;
                }
                let d = pj.position - pi.position;
                let r = d.norm();
                if r > rc {
                    continue;
                }
                if r == 0.0 {
                    return Err(coincident(pi, pj));
                }
                let e = d / r;
                let mf = phys.material(pj);
                let vf = PairView::fluid(pj, mf, tvf);
                let vr = PairView::solid(pi, mf, cell);
                f -= pair_term(&vf, &vr, &e, k.dw_dr(r), r);
            }
            out.push((f, Vec3::zeros()));
        }
    }
    for (p, (a, b)) in w.particles.iter_mut().zip(out) {
        if p.tag.is_fluid() {
            p.acceleration = a;
            p.background_acceleration = b;
        } else if p.tag.is_rigid() {
            p.force = a;
        }
    }
    Ok(())
}

/// Every pair force m_i a_ij acting on an owned fluid or rigid particle i,
/// as (id_i, id_j, force). Used to check pairwise antisymmetry.
pub fn pair_forces(w: &Worker, phys: &Physics) -> Vec<(u64, u64, Vec3)> {
    let k = &phys.kernel;
    let rc = phys.cutoff();
    let cell = phys.cell_volume();
    let tvf = phys.transport_velocity;
    let mut out = Vec::new();
    for i in 0..w.n_owned {
        let pi = &w.particles[i];
        for &j in w.neighbors(i) {
            let pj = &w.particles[j as usize];
            let d = pi.position - pj.position;
            let r = d.norm();
            if r > rc || r == 0.0 {
                continue;
            }
            let e = d / r;
            let dw = k.dw_dr(r);
            let f = match (pi.tag.is_fluid(), pj.tag.is_fluid()) {
                (true, true) => {
                    pair_term(&PairView::fluid(pi, phys.material(pi), tvf), &PairView::fluid(pj, phys.material(pj), tvf), &e, dw, r)
                }
                (true, false) => {
                    let mi = phys.material(pi);
                    pair_term(&PairView::fluid(pi, mi, tvf), &PairView::solid(pj, mi, cell), &e, dw, r)
                }
                (false, true) if pi.tag.is_rigid() => {
                    let mf = phys.material(pj);
                    -pair_term(&PairView::fluid(pj, mf, tvf), &PairView::solid(pi, mf, cell), &(-e), dw, r)
                }
                _ => continue,
            };
            out.push((pi.id, pj.id, f));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{distribute, Decomposition, DomainGrid};
    use crate::model::PhaseTag;
    use proptest::prelude::*;

    fn water() -> Material {
        let mut m = Material::new("water", 1000.0);
        m.speed_of_sound = 0.25;
        m.kinematic_viscosity = 5e-6;
        m
    }

    #[test]
    fn eos_examples() {
        let m = water();
        assert_eq!(eos_pressure(1000.0, &m), 0.0);
        assert_eq!(m.reference_pressure(), 62.5);
        assert!((eos_pressure(1010.0, &m) - 0.625).abs() < 1e-12);
    }

    #[test]
    fn harmonic_mean_identity() {
        assert_eq!(harmonic_mean(3.0, 3.0), 3.0);
        assert_eq!(harmonic_mean(0.0, 0.0), 0.0);
    }

    fn one_worker(particles: Vec<Particle>, phys: &Physics, lo: f64, hi: f64) -> crate::decomposition::Worker {
        let rc = phys.cutoff();
        let grid = DomainGrid::from_parts(
            2,
            Vec3::new(lo, lo, 0.0),
            Vec3::new(hi, hi, 0.0),
            [false; 3],
            rc * 1.05,
            rc,
            0.05 * rc,
        )
        .unwrap();
        let d = Decomposition::new(grid, &particles, 1).unwrap();
        distribute(particles, &d, 0).unwrap().remove(0)
    }

    #[test]
    fn isolated_particle_gets_self_density() {
        let phys = Physics::simple(2, 1.0, vec![water()]);
        let p = Particle::new(0, PhaseTag::Fluid(0), Vec3::new(5.0, 5.0, 0.0), 2.0, 1000.0);
        let mut w = one_worker(vec![p], &phys, 0.0, 10.0);
        density_summation(&mut w, &phys);
        assert_eq!(w.particles[0].density, 2.0 * phys.kernel.w0());
    }

    #[test]
    fn lattice_interior_density_near_reference() {
        let dx = 0.1;
        let phys = Physics::simple(2, dx, vec![water()]);
        let mut ps = Vec::new();
        for j in 0..20 {
            for i in 0..20 {
                let pos = Vec3::new((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dx, 0.0);
                ps.push(Particle::new(ps.len() as u64, PhaseTag::Fluid(0), pos, 1000.0 * dx * dx, 1000.0));
            }
        }
        let mut w = one_worker(ps, &phys, 0.0, 2.0);
        density_summation(&mut w, &phys);
        let center = w.particles.iter().find(|p| p.id == 10 * 20 + 10).unwrap();
        // direct lattice sum oracle
        let mut s = 0.0;
        for j in -5i32..=5 {
            for i in -5i32..=5 {
                s += phys.kernel.w(dx * ((i * i + j * j) as f64).sqrt());
            }
        }
        assert!((center.density - 1000.0 * dx * dx * s).abs() < 1e-9);
        assert!((center.density / 1000.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn two_particle_forces_are_equal_and_opposite() {
        let mut m = water();
        m.kinematic_viscosity = 0.0;
        let phys = Physics::simple(2, 1.0, vec![m]);
        let mut a = Particle::new(0, PhaseTag::Fluid(0), Vec3::new(4.0, 4.0, 0.0), 1000.0, 1000.0);
        let mut b = Particle::new(1, PhaseTag::Fluid(0), Vec3::new(5.3, 4.4, 0.0), 1000.0, 1000.0);
        a.pressure = 3.0;
        b.pressure = 3.0;
        let w = one_worker(vec![a, b], &phys, 0.0, 10.0);
        let pairs = pair_forces(&w, &phys);
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].2, -pairs[1].2);
        let e = (w.particles[0].position - w.particles[1].position).normalize();
        assert!(pairs[0].2.cross(&e).norm() < 1e-12 * pairs[0].2.norm());
        // repulsive for positive pressure
        assert!(pairs[0].2.dot(&e) > 0.0);
    }

    #[test]
    fn still_fluid_without_gravity_gives_zero_wall_state() {
        let dx = 0.1;
        let phys = Physics::simple(2, dx, vec![water()]);
        let mut ps = Vec::new();
        for j in 0..10 {
            for i in 0..10 {
                let pos = Vec3::new((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dx, 0.0);
                let tag = if j < 3 { PhaseTag::Boundary(0) } else { PhaseTag::Fluid(0) };
                ps.push(Particle::new(ps.len() as u64, tag, pos, 1000.0 * dx * dx, 1000.0));
            }
        }
        let mut w = one_worker(ps, &phys, 0.0, 1.0);
        extrapolate_boundaries(&mut w, &phys);
        for p in w.owned().iter().filter(|p| p.tag.is_boundary()) {
            assert_eq!(p.pressure, 0.0);
            assert_eq!(p.interaction_velocity, Vec3::zeros());
        }
    }

    #[test]
    fn moving_wall_drags_fluid_along() {
        let dx = 0.1;
        let phys = Physics::simple(2, dx, vec![water()]);
        let mut ps = Vec::new();
        for j in 0..10 {
            for i in 0..10 {
                let pos = Vec3::new((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dx, 0.0);
                let mut p = if j < 3 {
                    let mut p = Particle::new(ps.len() as u64, PhaseTag::Boundary(0), pos, 10.0, 1000.0);
                    p.velocity = Vec3::new(0.01, 0.0, 0.0);
                    p
                } else {
                    Particle::new(ps.len() as u64, PhaseTag::Fluid(0), pos, 1000.0 * dx * dx, 1000.0)
                };
                p.density = 1000.0;
                ps.push(p);
            }
        }
        let mut w = one_worker(ps, &phys, 0.0, 1.0);
        extrapolate_boundaries(&mut w, &phys);
        momentum(&mut w, &phys).unwrap();
        let near = w.owned().iter().find(|p| p.tag.is_fluid() && p.position[1] < 0.4 && p.position[0] > 0.4).unwrap();
        assert!(near.acceleration[0] > 0.0);
    }

    proptest! {
        #[test]
        fn eos_is_strictly_increasing(a in 900.0f64..1100.0, b in 900.0f64..1100.0) {
            prop_assume!(a < b);
            let m = water();
            prop_assert!(eos_pressure(a, &m) < eos_pressure(b, &m));
        }

        #[test]
        fn pair_term_antisymmetric(
            x in -2.9f64..2.9, y in -2.9f64..2.9,
            ra in 990.0f64..1010.0, rb in 990.0f64..1010.0,
            pa in -5.0f64..5.0, pb in -5.0f64..5.0,
            ua in -1.0f64..1.0, ub in -1.0f64..1.0,
        ) {
            let r = (x * x + y * y).sqrt();
            prop_assume!(r > 1e-3 && r < 3.0);
            let k = crate::kernel::Kernel::new(1.0, 2);
            let m = water();
            let mut a = Particle::new(0, PhaseTag::Fluid(0), Vec3::new(x, y, 0.0), 1.0, ra);
            let mut b = Particle::new(1, PhaseTag::Fluid(0), Vec3::zeros(), 1.1, rb);
            a.pressure = pa; b.pressure = pb;
            a.velocity = Vec3::new(ua, ub, 0.0); b.velocity = Vec3::new(ub, -ua, 0.0);
            a.transport_velocity = a.velocity * 1.1; b.transport_velocity = b.velocity * 0.9;
            let e = (a.position - b.position) / r;
            let e2 = (b.position - a.position) / r;
            let dw = k.dw_dr(r);
            let fab = pair_term(&PairView::fluid(&a, &m, true), &PairView::fluid(&b, &m, true), &e, dw, r);
            let fba = pair_term(&PairView::fluid(&b, &m, true), &PairView::fluid(&a, &m, true), &e2, dw, r);
            prop_assert_eq!(fab, -fba);
        }
    }
}
