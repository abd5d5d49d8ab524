//! Heat conduction across all phases and the analogous concentration
//! diffusion.
//!
//! c_p,a dT_a/dt = (1/ρ_a) Σ_b V_b 4κ_aκ_b/(κ_a+κ_b) (T_ab/r_ab) ∂W/∂r_ab
//!
//! Every pair exchange is antisymmetric, so Σ m c_p T is conserved on closed
//! systems. Wall particles only take part when a Dirichlet group fixes
//! their value; otherwise walls are adiabatic.

use crate::decomposition::Worker;
use crate::model::{DirichletSpec, Particle, ScalarField, SchedulePoint};
use crate::physics::Physics;

/// Piecewise constant schedule for one Dirichlet group.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletGroup {
    pub name: String,
    pub field: ScalarField,
    pub schedule: Vec<SchedulePoint>,
}

impl DirichletGroup {
    pub fn from_spec(spec: &DirichletSpec) -> Self {
        DirichletGroup { name: spec.name.clone(), field: spec.field, schedule: spec.schedule.clone() }
    }

    /// Value of the first entry with `t <= until`, the last value beyond the
    /// final entry, `None` without a schedule.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.schedule.iter().find(|s| t <= s.until).or(self.schedule.last()).map(|s| s.value)
    }
}

fn field_value(p: &Particle, field: ScalarField) -> f64 {
    match field {
        ScalarField::Temperature => p.temperature,
        ScalarField::Concentration => p.concentration,
    }
}

fn set_field(p: &mut Particle, field: ScalarField, v: f64) {
    match field {
        ScalarField::Temperature => p.temperature = v,
        ScalarField::Concentration => p.concentration = v,
    }
}

/// Set the value of every owned Dirichlet particle from its group's schedule.
pub fn apply_thermal_dirichlet(w: &mut Worker, phys: &Physics, groups: &[DirichletGroup], t: f64) {
    for p in w.owned_mut() {
        for field in [ScalarField::Temperature, ScalarField::Concentration] {
            if let Some(g) = phys.dirichlet_group(p, field) {
                if let Some(v) = groups[g].value_at(t) {
                    set_field(p, field, v);
                }
            }
        }
    }
}

/// Whether any material conducts heat (or diffuses species).
pub fn field_active(phys: &Physics, field: ScalarField) -> bool {
    phys.materials.iter().any(|m| match field {
        ScalarField::Temperature => m.conductivity > 0.0,
        ScalarField::Concentration => m.diffusivity > 0.0,
    })
}

fn coefficient(phys: &Physics, p: &Particle, field: ScalarField) -> f64 {
    let m = phys.material(p);
    match field {
        ScalarField::Temperature => m.conductivity,
        ScalarField::Concentration => m.diffusivity,
    }
}

/// 4ab/(a+b); zero for two insulating sides.
pub fn pair_conductivity(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s > 0.0 {
        4.0 * a * b / s
    } else {
        0.0
    }
}

/// Rates of the owned particles for `field` from the current values.
pub fn scalar_rates(w: &Worker, phys: &Physics, field: ScalarField) -> Vec<f64> {
    let k = &phys.kernel;
    let rc = phys.cutoff();
    (0..w.n_owned)
        .map(|a| {
            let pa = &w.particles[a];
            if !phys.transports(pa, field) {
                return 0.0;
            }
            let ka = coefficient(phys, pa, field);
            let fa = field_value(pa, field);
            let mut s = 0.0;
            for &b in w.neighbors(a) {
                let pb = &w.particles[b as usize];
                if !phys.transports(pb, field) {
                    continue;
                }
                let d = pa.position - pb.position;
                let r = d.norm();
                if r > rc || r == 0.0 {
                    continue;
                }
                let kab = pair_conductivity(ka, coefficient(phys, pb, field));
                if kab == 0.0 {
                    continue;
                }
                let vb = pb.mass / pb.density;
                s += vb * kab * (fa - field_value(pb, field)) / r * k.dw_dr(r);
            }
            let cap = match field {
                ScalarField::Temperature => phys.material(pa).heat_capacity,
                ScalarField::Concentration => 1.0,
            };
            if cap > 0.0 {
                s / (pa.density * cap)
            } else {
                0.0
            }
        })
        .collect()
}

/// Compute conduction and diffusion rates of owned particles.
pub fn update_rates(w: &mut Worker, phys: &Physics) {
    for field in [ScalarField::Temperature, ScalarField::Concentration] {
        if !field_active(phys, field) {
            continue;
        }
        let rates = scalar_rates(w, phys, field);
        for (p, r) in w.particles.iter_mut().zip(rates) {
            match field {
                ScalarField::Temperature => p.temperature_rate = r,
                ScalarField::Concentration => p.concentration_rate = r,
            }
        }
    }
}

/// Explicit update T ← T + Δt·dT/dt (and C) for owned particles that are
/// neither walls nor held by a Dirichlet group.
pub fn integrate_scalars(w: &mut Worker, phys: &Physics, dt: f64) {
    let t_on = field_active(phys, ScalarField::Temperature);
    let c_on = field_active(phys, ScalarField::Concentration);
    let n = w.n_owned;
    for p in &mut w.particles[..n] {
        if p.tag.is_boundary() {
            continue;
        }
        if t_on && phys.dirichlet_group(p, ScalarField::Temperature).is_none() {
            p.temperature += dt * p.temperature_rate;
        }
        if c_on && phys.dirichlet_group(p, ScalarField::Concentration).is_none() {
            p.concentration += dt * p.concentration_rate;
        }
    }
}

/// Largest Δt·Σ_b c_ab over owned particles, where T_a^{n+1} =
/// (1 − Δt Σ c_ab) T_a + Δt Σ c_ab T_b. The explicit update keeps the
/// discrete maximum principle iff this stays ≤ 1.
pub fn max_update_weight(w: &Worker, phys: &Physics, dt: f64) -> f64 {
    let k = &phys.kernel;
    let rc = phys.cutoff();
    let field = ScalarField::Temperature;
    let mut worst = 0.0f64;
    for a in 0..w.n_owned {
        let pa = &w.particles[a];
        if !phys.transports(pa, field) || pa.tag.is_boundary() {
            continue;
        }
        let ka = coefficient(phys, pa, field);
        let cap = phys.material(pa).heat_capacity;
        let mut s = 0.0;
        for &b in w.neighbors(a) {
            let pb = &w.particles[b as usize];
            if !phys.transports(pb, field) {
                continue;
            }
            let r = (pa.position - pb.position).norm();
            if r > rc || r == 0.0 {
                continue;
            }
            let kab = pair_conductivity(ka, coefficient(phys, pb, field));
            s += -(pb.mass / pb.density) * kab / r * k.dw_dr(r);
        }
        if cap > 0.0 {
            worst = worst.max(dt * s / (pa.density * cap));
        }
    }
    worst
}
