//! Spatial decomposition into worker-owned cell blocks, halo exchange and
//! Verlet neighbor lists.
//!
//! Each [`Worker`] stores its owned particles, sorted by global id, followed
//! by read-only ghost copies of the particles in the adjacent cells of other
//! blocks (and periodic images). Workers never touch each other's memory:
//! every exchange builds explicit packets which the coordinator routes in
//! rank order.
//!
//! Ownership and the ghost set are refreshed at Verlet rebuilds only. Lists
//! are built with radius `r_c + skin` and reused until some particle has
//! moved more than half the skin; in between, [`refresh_halo`] re-copies the
//! same source particles so ghost indices stay valid.

mod grid;
mod partition;

pub use grid::DomainGrid;
pub use partition::{ghost_count, partition, Block, GhostEntry, HaloPattern, Partition};

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Particle, Vec3};

/// Grid, block partition and static halo pattern.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub grid: DomainGrid,
    pub partition: Partition,
    pub pattern: HaloPattern,
}

impl Decomposition {
    pub fn new(grid: DomainGrid, particles: &[Particle], workers: usize) -> Result<Self> {
        let occ = grid.occupancy(particles.iter().map(|p| &p.position));
        let partition = partition(&grid, &occ, workers)?;
        let pattern = HaloPattern::new(&grid, &partition);
        Ok(Decomposition { grid, partition, pattern })
    }

    pub fn n_workers(&self) -> usize {
        self.partition.n_workers()
    }
}

/// One execution unit: an owned cell block plus its ghost layer.
#[derive(Debug, Clone)]
pub struct Worker {
    pub rank: usize,
    pub block: Block,
    /// Owned particles `[0, n_owned)` sorted by id, then ghosts.
    pub particles: Vec<Particle>,
    pub n_owned: usize,
    nbr_start: Vec<u32>,
    nbr: Vec<u32>,
    /// Per destination: (owned index, index into the destination's ghost pattern).
    sends: Vec<Vec<(u32, u32)>>,
    reference: Vec<Vec3>,
}

impl Worker {
    fn empty(rank: usize, block: Block, n_workers: usize) -> Self {
        Worker {
            rank,
            block,
            particles: Vec::new(),
            n_owned: 0,
            nbr_start: vec![0],
            nbr: Vec::new(),
            sends: vec![Vec::new(); n_workers],
            reference: Vec::new(),
        }
    }

    pub fn owned(&self) -> &[Particle] {
        &self.particles[..self.n_owned]
    }

    pub fn owned_mut(&mut self) -> &mut [Particle] {
        &mut self.particles[..self.n_owned]
    }

    pub fn ghosts(&self) -> &[Particle] {
        &self.particles[self.n_owned..]
    }

    /// Local indices of the Verlet neighbors of owned particle `i`, sorted by
    /// global id. May contain particles slightly beyond r_c.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.nbr[self.nbr_start[i] as usize..self.nbr_start[i + 1] as usize]
    }

    /// Number of ghost copies sent to each destination rank.
    pub fn send_counts(&self) -> Vec<usize> {
        self.sends.iter().map(|s| s.len()).collect()
    }

    /// Largest displacement of an owned particle since the last rebuild.
    pub fn max_displacement(&self) -> f64 {
        self.owned()
            .iter()
            .zip(&self.reference)
            .map(|(p, r)| (p.position - r).norm_squared())
            .fold(0.0, f64::max)
            .sqrt()
    }
}

/// Distribute particles over workers and build halos and neighbor lists.
pub fn distribute(particles: Vec<Particle>, decomp: &Decomposition, step: u64) -> Result<Vec<Worker>> {
    let n = decomp.n_workers();
    let mut workers: Vec<Worker> =
        (0..n).map(|r| Worker::empty(r, decomp.partition.block(r), n)).collect();
    workers[0].particles = particles;
    workers[0].n_owned = workers[0].particles.len();
    rebuild(&mut workers, decomp, step)?;
    Ok(workers)
}

/// Whether any particle moved more than half the skin since the last rebuild.
pub fn needs_rebuild(workers: &[Worker], grid: &DomainGrid) -> bool {
    let max = workers.par_iter().map(|w| w.max_displacement()).reduce(|| 0.0, f64::max);
    max > 0.5 * grid.skin
}

/// Migrate particles to the owners of their current cells, then rebuild
/// ghost layers and neighbor lists.
pub fn rebuild(workers: &mut [Worker], decomp: &Decomposition, step: u64) -> Result<()> {
    migrate(workers, decomp, step)?;
    exchange_halo(workers, decomp);
    workers.par_iter_mut().for_each(|w| build_pairs(w, &decomp.grid));
    Ok(())
}

/// Wrap positions on periodic axes and hand every particle to the worker
/// owning its cell. Owned particles end up sorted by id.
pub fn migrate(workers: &mut [Worker], decomp: &Decomposition, step: u64) -> Result<()> {
    let n = workers.len();
    let grid = &decomp.grid;
    let outgoing: Vec<Result<Vec<Vec<Particle>>>> = workers
        .par_iter_mut()
        .map(|w| {
            w.particles.truncate(w.n_owned);
            let mut out: Vec<Vec<Particle>> = vec![Vec::new(); n];
            let mut keep = Vec::with_capacity(w.particles.len());
            for mut p in w.particles.drain(..) {
                grid.wrap(&mut p.position);
                if !grid.contains(&p.position) || !p.position.iter().all(|x| x.is_finite()) {
                    return Err(Error::EscapedParticle { id: p.id, step, position: p.position.into() });
                }
                let owner = decomp.partition.owner_of(grid.cell_of(&p.position));
                if owner == w.rank {
                    keep.push(p);
                } else {
                    out[owner].push(p);
                }
            }
            w.particles = keep;
            Ok(out)
        })
        .collect();
    let mut inbox: Vec<Vec<Particle>> = vec![Vec::new(); n];
    for out in outgoing {
        for (to, packet) in out?.into_iter().enumerate() {
            inbox[to].extend(packet);
        }
    }
    workers.par_iter_mut().zip(inbox).for_each(|(w, incoming)| {
        w.particles.extend(incoming);
        w.particles.sort_by_key(|p| p.id);
        w.n_owned = w.particles.len();
        w.reference = w.particles.iter().map(|p| p.position).collect();
    });
    Ok(())
}

/// Recompute send lists from the static pattern and install fresh ghost
/// copies (with periodic shifts) on every worker.
pub fn exchange_halo(workers: &mut [Worker], decomp: &Decomposition) {
    let grid = &decomp.grid;
    let pattern = &decomp.pattern;
    workers.par_iter_mut().for_each(|w| {
        let bins = OwnedBins::new(w, grid);
        for (dest, entries) in pattern.per_worker.iter().enumerate() {
            let list = &mut w.sends[dest];
            list.clear();
            for (k, e) in entries.iter().enumerate() {
                if e.owner == w.rank {
                    list.extend(bins.cell(e.real_cell, &w.block).iter().map(|&i| (i, k as u32)));
                }
            }
        }
    });
    refresh_halo(workers, decomp);
}

/// Re-copy the current state of all ghost sources without changing the
/// ghost set. Valid between rebuilds only.
pub fn refresh_halo(workers: &mut [Worker], decomp: &Decomposition) {
    let pattern = &decomp.pattern;
    let packets: Vec<Vec<Vec<Particle>>> = workers
        .par_iter()
        .map(|w| {
            w.sends
                .iter()
                .enumerate()
                .map(|(dest, items)| {
                    let entries = &pattern.per_worker[dest];
                    items
                        .iter()
                        .map(|&(i, k)| {
                            let mut p = w.particles[i as usize].clone();
                            p.position += entries[k as usize].shift;
                            p
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut inbox: Vec<Vec<Vec<Particle>>> = (0..workers.len()).map(|_| Vec::new()).collect();
    for from in packets {
        for (to, packet) in from.into_iter().enumerate() {
            inbox[to].push(packet);
        }
    }
    workers.par_iter_mut().zip(inbox).for_each(|(w, incoming)| {
        w.particles.truncate(w.n_owned);
        for packet in incoming {
            w.particles.extend(packet);
        }
    });
}

/// Verlet lists for the owned particles of one worker.
pub fn build_pairs(w: &mut Worker, grid: &DomainGrid) {
    let d = grid.dimension;
    let b = w.block;
    let mut ext = [1usize; 3];
    for a in 0..d {
        ext[a] = b.hi[a] - b.lo[a] + 2;
    }
    let n_ext = ext[0] * ext[1] * ext[2];
    let local = |p: &Vec3| -> usize {
        // ghost positions are shifted images, so this lands in the ghost layer
        let mut c = [0usize; 3];
        for a in 0..d {
            let f = ((p[a] - grid.min[a]) / grid.edge[a]).floor() as i64 - (b.lo[a] as i64 - 1);
            c[a] = f.clamp(0, ext[a] as i64 - 1) as usize;
        }
        c[0] + ext[0] * (c[1] + ext[1] * c[2])
    };
    let cells: Vec<usize> = w.particles.iter().map(|p| local(&p.position)).collect();
    let mut start = vec![0u32; n_ext + 1];
    for &c in &cells {
        start[c + 1] += 1;
    }
    for i in 0..n_ext {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut items = vec![0u32; cells.len()];
    for (i, &c) in cells.iter().enumerate() {
        items[fill[c] as usize] = i as u32;
        fill[c] += 1;
    }

    let r2 = grid.search_radius() * grid.search_radius();
    let mut offsets = Vec::new();
    let span = |a: usize| if a < d { -1i64..=1 } else { 0..=0 };
    for dz in span(2) {
        for dy in span(1) {
            for dx in span(0) {
                offsets.push([dx, dy, dz]);
            }
        }
    }

    w.nbr_start.clear();
    w.nbr_start.push(0);
    w.nbr.clear();
    let mut scratch: Vec<(u64, u32)> = Vec::new();
    for i in 0..w.n_owned {
        let c = cells[i];
        let cc = [c % ext[0], (c / ext[0]) % ext[1], c / (ext[0] * ext[1])];
        let pi = w.particles[i].position;
        scratch.clear();
        for o in &offsets {
            let mut nc = [0usize; 3];
            let mut ok = true;
            for a in 0..3 {
                let v = cc[a] as i64 + o[a];
                if v < 0 || v >= ext[a] as i64 {
                    ok = false;
                    break;
                }
                nc[a] = v as usize;
            }
            if !ok {
                continue;
            }
            let lc = nc[0] + ext[0] * (nc[1] + ext[1] * nc[2]);
            for &j in &items[start[lc] as usize..start[lc + 1] as usize] {
                if j as usize == i {
                    continue;
                }
                let pj = &w.particles[j as usize];
                if (pj.position - pi).norm_squared() <= r2 {
                    scratch.push((pj.id, j));
                }
            }
        }
        scratch.sort_unstable();
        w.nbr.extend(scratch.iter().map(|&(_, j)| j));
        w.nbr_start.push(w.nbr.len() as u32);
    }
}

/// Owned particle indices binned by cell of the worker's block.
struct OwnedBins {
    start: Vec<u32>,
    items: Vec<u32>,
}

impl OwnedBins {
    fn new(w: &Worker, grid: &DomainGrid) -> Self {
        let b = &w.block;
        let n = b.n_cells();
        let cells: Vec<usize> = w.owned().iter().map(|p| block_index(b, grid.cell_of(&p.position))).collect();
        let mut start = vec![0u32; n + 1];
        for &c in &cells {
            start[c + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut items = vec![0u32; cells.len()];
        for (i, &c) in cells.iter().enumerate() {
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        OwnedBins { start, items }
    }

    fn cell(&self, c: [usize; 3], b: &Block) -> &[u32] {
        let k = block_index(b, c);
        &self.items[self.start[k] as usize..self.start[k + 1] as usize]
    }
}

fn block_index(b: &Block, c: [usize; 3]) -> usize {
    let e = [b.hi[0] - b.lo[0], b.hi[1] - b.lo[1]];
    (c[0] - b.lo[0]) + e[0] * ((c[1] - b.lo[1]) + e[1] * (c[2] - b.lo[2]))
}

/// Cell occupancy histogram as CSV: `i,j,k,count,owner`.
pub fn write_cell_occupancy(path: &Path, decomp: &Decomposition, workers: &[Worker]) -> Result<()> {
    let grid = &decomp.grid;
    let occ = grid.occupancy(workers.iter().flat_map(|w| w.owned().iter().map(|p| &p.position)));
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    let mut body = String::from("i,j,k,count,owner\n");
    for (idx, &count) in occ.iter().enumerate() {
        let c = grid.unlinear(idx);
        body.push_str(&format!("{},{},{},{},{}\n", c[0], c[1], c[2], count, decomp.partition.owner_of(c)));
    }
    f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Owned particle counts per worker and the max/mean imbalance ratio.
pub fn load_imbalance(workers: &[Worker]) -> (Vec<usize>, f64) {
    let counts: Vec<usize> = workers.iter().map(|w| w.n_owned).collect();
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    let max = counts.iter().copied().max().unwrap_or(0) as f64;
    (counts, if mean > 0.0 { max / mean } else { 1.0 })
}
