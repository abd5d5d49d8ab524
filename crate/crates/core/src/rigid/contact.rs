use crate::decomposition::Worker;
use crate::error::{Error, Result};
use crate::model::{ContactSpec, Vec3};
use crate::physics::Physics;

/// Spring-dashpot normal force on particle r from particle s, active for
/// r_rs < Δx and purely repulsive:
/// f = −min(0, k_c (r_rs − Δx) + d_c (e·v)) e with e = (x_r − x_s)/r_rs and
/// v = v_r − v_s.
pub fn contact_force(xr: &Vec3, xs: &Vec3, vr: &Vec3, vs: &Vec3, dx: f64, c: &ContactSpec) -> Vec3 {
    let d = xr - xs;
    let r = d.norm();
    if r >= dx || r == 0.0 {
        return Vec3::zeros();
    }
    let e = d / r;
    let s = c.stiffness * (r - dx) + c.damping * e.dot(&(vr - vs));
    e * (-s.min(0.0))
}

/// Add contact forces to owned rigid particles from rigid particles of other
/// bodies and from wall particles. Particles of the same body never touch.
pub fn contact_forces(w: &mut Worker, phys: &Physics) -> Result<()> {
    let Some(spec) = phys.contact else { return Ok(()) };
    let dx = phys.dx;
    let mut add: Vec<(usize, Vec3)> = Vec::new();
    for i in 0..w.n_owned {
        let pi = &w.particles[i];
        let Some(body) = pi.tag.body() else { continue };
        let mut f = Vec3::zeros();
        for &j in w.neighbors(i) {
            let pj = &w.particles[j as usize];
            let other = match pj.tag.body() {
                Some(b) => b != body,
                None => pj.tag.is_boundary(),
            };
            if !other {
                continue;
            }
            if pi.position == pj.position {
                return Err(Error::CoincidentParticles { a: pi.id.min(pj.id), b: pi.id.max(pj.id) });
            }
            f += contact_force(&pi.position, &pj.position, &pi.velocity, &pj.velocity, dx, &spec);
        }
        if f != Vec3::zeros() {
            add.push((i, f));
        }
    }
    for (i, f) in add {
        w.particles[i].force += f;
    }
    Ok(())
}
