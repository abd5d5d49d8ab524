//! Reversible phase transitions between rigid and fluid particles.
//!
//! A rigid particle whose material carries a rule melts when its value
//! rises strictly above the threshold; a fluid particle solidifies when its
//! value drops strictly below. Events are applied at the coordinator: melts
//! first, then solidifications in id order. Affected bodies are re-reduced,
//! empty bodies are deleted and bodies that fell apart are split.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::decomposition::{refresh_halo, Decomposition, DomainGrid, Worker};
use crate::model::{BodyId, Particle, PhaseTag, ScalarField, Vec3};
use crate::physics::Physics;
use crate::rigid::{reduce_mass_quantities, BodySet, RigidBody};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Melt,
    Solidify,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Melt => "melt",
            Direction::Solidify => "solidify",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEvent {
    pub step: u64,
    pub particle: u64,
    pub direction: Direction,
    pub field: ScalarField,
    /// Body left (melt) or joined (solidify).
    pub body: BodyId,
}

impl TransitionEvent {
    pub const CSV_HEADER: &'static str = "step,particle,direction,field,body";

    pub fn csv_row(&self) -> String {
        let field = match self.field {
            ScalarField::Temperature => "temperature",
            ScalarField::Concentration => "concentration",
        };
        format!("{},{},{},{},{}", self.step, self.particle, self.direction, field, self.body)
    }
}

/// A particle that crossed its threshold this step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub rank: usize,
    pub index: usize,
    pub id: u64,
    pub direction: Direction,
    pub field: ScalarField,
    /// Material index the particle turns into.
    pub into: u16,
}

pub fn scalar(p: &Particle, field: ScalarField) -> f64 {
    match field {
        ScalarField::Temperature => p.temperature,
        ScalarField::Concentration => p.concentration,
    }
}

/// Transition candidates among the owned particles of one worker.
pub fn detect_transitions(w: &Worker, phys: &Physics) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (i, p) in w.owned().iter().enumerate() {
        if p.tag.is_boundary() {
            continue;
        }
        let Some(rule) = &phys.material(p).transition else { continue };
        let v = scalar(p, rule.field);
        let direction = match p.tag {
            PhaseTag::Rigid(_) if v > rule.threshold => Direction::Melt,
            PhaseTag::Fluid(_) if v < rule.threshold => Direction::Solidify,
            _ => continue,
        };
        let into = phys.materials.index_of(&rule.into).expect("validated transition target") as u16;
        out.push(Candidate { rank: w.rank, index: i, id: p.id, direction, field: rule.field, into });
    }
    out
}

/// u_k = u'_k + ω_k × (r_k − r'_k): the new center of mass moves with the
/// rigid motion of the old body.
pub fn post_transition_velocity(old_velocity: &Vec3, omega: &Vec3, com_shift: &Vec3) -> Vec3 {
    old_velocity + omega.cross(com_shift)
}

/// Detect and apply all transitions of this step. Returns the events in the
/// order they were applied.
pub fn apply_transitions(
    workers: &mut [Worker],
    decomp: &Decomposition,
    bodies: &mut BodySet,
    next_body: &mut BodyId,
    phys: &Physics,
    step: u64,
) -> Vec<TransitionEvent> {
    let mut cands: Vec<Candidate> = workers.par_iter().map(|w| detect_transitions(w, phys)).flatten().collect();
    if cands.is_empty() {
        return Vec::new();
    }
    cands.sort_by_key(|c| (c.direction, c.id));
    let grid = &decomp.grid;
    let old: BTreeMap<BodyId, (Vec3, Vec3, Vec3)> =
        bodies.iter().map(|(&id, b)| (id, (b.com, b.velocity, b.angular_velocity))).collect();
    let mut events = Vec::with_capacity(cands.len());
    let mut affected = BTreeSet::new();
    let mut shrunk = BTreeSet::new();

    for c in cands.iter().filter(|c| c.direction == Direction::Melt) {
        let p = &mut workers[c.rank].particles[c.index];
        let PhaseTag::Rigid(b) = p.tag else { unreachable!() };
        if let Some(body) = bodies.get(&b) {
            let d = grid.minimum_image(p.position - body.com);
            p.velocity = body.point_velocity(&d);
        }
        p.transport_velocity = p.velocity;
        p.acceleration = Vec3::zeros();
        p.background_acceleration = Vec3::zeros();
        p.force = Vec3::zeros();
        p.tag = PhaseTag::Fluid(c.into);
        p.material = c.into;
        affected.insert(b);
        shrunk.insert(b);
        events.push(TransitionEvent { step, particle: c.id, direction: Direction::Melt, field: c.field, body: b });
    }

    let solid: Vec<&Candidate> = cands.iter().filter(|c| c.direction == Direction::Solidify).collect();
    if !solid.is_empty() {
        if !shrunk.is_empty() {
            refresh_halo(workers, decomp);
        }
        let rc = phys.cutoff();
        // Neighbors within r_c: (distance, id, body if already rigid).
        let near: Vec<Vec<(f64, u64, Option<BodyId>)>> = solid
            .iter()
            .map(|c| {
                let w = &workers[c.rank];
                let pi = &w.particles[c.index];
                let mut v: Vec<(f64, u64, Option<BodyId>)> = w
                    .neighbors(c.index)
                    .iter()
                    .map(|&j| &w.particles[j as usize])
                    .filter_map(|pj| {
                        let r = (pi.position - pj.position).norm();
                        (r <= rc && !pj.tag.is_boundary()).then(|| (r, pj.id, pj.tag.body()))
                    })
                    .collect();
                v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                v
            })
            .collect();
        let mut joined: HashMap<u64, BodyId> = HashMap::new();
        for (c, near) in solid.iter().zip(&near) {
            let target = near.iter().find_map(|&(_, id, b)| b.or_else(|| joined.get(&id).copied()));
            let p = &mut workers[c.rank].particles[c.index];
            let b = match target {
                Some(b) => b,
                None => {
                    let id = *next_body;
                    *next_body += 1;
                    let m = phys.materials.get(c.into as usize);
                    let mut body = RigidBody::new(id, c.into, m.body_force());
                    body.com = p.position;
                    body.velocity = p.velocity;
                    bodies.insert(id, body);
                    id
                }
            };
            joined.insert(c.id, b);
            p.tag = PhaseTag::Rigid(b);
            p.material = c.into;
            p.density = phys.materials.get(c.into as usize).reference_density;
            p.pressure = 0.0;
            p.acceleration = Vec3::zeros();
            p.background_acceleration = Vec3::zeros();
            affected.insert(b);
            events.push(TransitionEvent { step, particle: c.id, direction: Direction::Solidify, field: c.field, body: b });
        }
    }

    let empty = reduce_mass_quantities(workers, bodies, grid, phys.dx, Some(&affected));
    for b in &empty {
        bodies.remove(b);
    }
    for (id, body) in bodies.iter_mut() {
        if let Some((com, u, w)) = old.get(id) {
            if affected.contains(id) {
                body.velocity = post_transition_velocity(u, w, &grid.minimum_image(body.com - com));
            }
        }
    }
    let candidates: BTreeSet<BodyId> = shrunk.into_iter().filter(|b| bodies.contains_key(b)).collect();
    if !candidates.is_empty() {
        split_disconnected_bodies(workers, bodies, next_body, grid, phys.dx, &candidates);
    }
    slave_after_transition(workers, bodies, grid);
    events
}

/// Rigid particle velocities follow the (possibly updated) body state.
fn slave_after_transition(workers: &mut [Worker], bodies: &BodySet, grid: &DomainGrid) {
    workers.par_iter_mut().for_each(|w| {
        for p in w.owned_mut() {
            let Some(b) = p.tag.body() else { continue };
            if let Some(body) = bodies.get(&b) {
                let d = grid.minimum_image(p.position - body.com);
                p.velocity = body.point_velocity(&d);
            }
        }
    });
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of `points` under |a − b| ≤ `radius`, labelled by
/// the smallest index of each component.
pub fn components(points: &[Vec3], radius: f64) -> Vec<usize> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let key = |p: &Vec3| -> [i64; 3] { [0, 1, 2].map(|a| (p[a] / radius).floor() as i64) };
    let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        cells.entry(key(p)).or_default().push(i);
    }
    let r2 = radius * radius;
    for (i, p) in points.iter().enumerate() {
        let k = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(list) = cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) else { continue };
                    for &j in list {
                        if j > i && (points[j] - p).norm_squared() <= r2 {
                            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                            if a != b {
                                parent[a.max(b)] = a.min(b);
                            }
                        }
                    }
                }
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Split every listed body into its connected components (adjacency
/// 1.5Δx). The component holding the smallest particle id keeps the body
/// id. New bodies inherit ω and the rigid velocity at their center of mass,
/// so total linear momentum is unchanged. Returns the ids of new bodies.
pub fn split_disconnected_bodies(
    workers: &mut [Worker],
    bodies: &mut BodySet,
    next_body: &mut BodyId,
    grid: &DomainGrid,
    dx: f64,
    which: &BTreeSet<BodyId>,
) -> Vec<BodyId> {
    let mut members: BTreeMap<BodyId, Vec<(u64, Vec3)>> = BTreeMap::new();
    for w in workers.iter() {
        for p in w.owned() {
            let Some(b) = p.tag.body() else { continue };
            if let (true, Some(body)) = (which.contains(&b), bodies.get(&b)) {
                members.entry(b).or_default().push((p.id, body.com + grid.minimum_image(p.position - body.com)));
            }
        }
    }
    let mut relabel: HashMap<u64, BodyId> = HashMap::new();
    let mut created = Vec::new();
    let mut touched = BTreeSet::new();
    for (b, mut list) in members {
        list.sort_by_key(|(id, _)| *id);
        let pts: Vec<Vec3> = list.iter().map(|(_, x)| *x).collect();
        let labels = components(&pts, 1.5 * dx);
        let roots: BTreeSet<usize> = labels.iter().copied().collect();
        if roots.len() < 2 {
            continue;
        }
        touched.insert(b);
        let parent = bodies[&b].clone();
        for &root in roots.iter().skip(1) {
            let id = *next_body;
            *next_body += 1;
            let mut nb = parent.clone();
            nb.id = id;
            bodies.insert(id, nb);
            created.push(id);
            touched.insert(id);
            for (k, &l) in labels.iter().enumerate() {
                if l == root {
                    relabel.insert(list[k].0, id);
                }
            }
        }
    }
    if touched.is_empty() {
        return created;
    }
    workers.par_iter_mut().for_each(|w| {
        for p in w.owned_mut() {
            if let Some(&nb) = relabel.get(&p.id) {
                p.tag = PhaseTag::Rigid(nb);
            }
        }
    });
    let before: BTreeMap<BodyId, (Vec3, Vec3, Vec3)> =
        touched.iter().map(|id| (*id, (bodies[id].com, bodies[id].velocity, bodies[id].angular_velocity))).collect();
    reduce_mass_quantities(workers, bodies, grid, dx, Some(&touched));
    for (id, (com, u, w)) in before {
        let body = bodies.get_mut(&id).expect("split body");
        body.velocity = post_transition_velocity(&u, &w, &grid.minimum_image(body.com - com));
    }
    created
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_rule_hand_case() {
        let u = post_transition_velocity(&Vec3::zeros(), &Vec3::new(0.0, 0.0, 1.0), &Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(u, Vec3::new(0.0, 1.0, 0.0));
        let u0 = Vec3::new(0.3, -0.1, 0.0);
        assert_eq!(post_transition_velocity(&u0, &Vec3::zeros(), &Vec3::new(1.0, 2.0, 0.0)), u0);
        assert_eq!(post_transition_velocity(&u0, &Vec3::new(0.0, 0.0, 2.0), &Vec3::zeros()), u0);
    }

    #[test]
    fn chain_split_at_midpoint() {
        let dx = 0.1;
        let pts: Vec<Vec3> =
            (0..11).filter(|&i| i != 5).map(|i| Vec3::new(i as f64 * dx, 0.0, 0.0)).collect();
        let labels = components(&pts, 1.5 * dx);
        let roots: BTreeSet<usize> = labels.iter().copied().collect();
        assert_eq!(roots.len(), 2);
        assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 5);
    }

    #[test]
    fn intact_cluster_is_one_component() {
        let dx = 0.5;
        let mut pts = Vec::new();
        for i in 0..6 {
            for j in 0..4 {
                pts.push(Vec3::new(i as f64 * dx, j as f64 * dx, 0.0));
            }
        }
        assert!(components(&pts, 1.5 * dx).iter().all(|&l| l == 0));
    }
}
