use crate::error::{Error, Result};
use crate::model::Vec3;

use super::DomainGrid;

/// Half-open cell block `lo..hi` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl Block {
    pub fn n_cells(&self) -> usize {
        (0..3).map(|a| self.hi[a] - self.lo[a]).product()
    }

    pub fn contains(&self, c: [usize; 3]) -> bool {
        (0..3).all(|a| c[a] >= self.lo[a] && c[a] < self.hi[a])
    }
}

/// Static block decomposition of the cell lattice.
///
/// Workers are arranged as a `procs[0] × procs[1] × procs[2]` grid; along each
/// axis the cut positions split the projected particle histogram into parts
/// of (nearly) equal count.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub procs: [usize; 3],
    /// `cuts[a]` has `procs[a] + 1` entries from 0 to the cell count.
    pub cuts: [Vec<usize>; 3],
}

impl Partition {
    pub fn n_workers(&self) -> usize {
        self.procs.iter().product()
    }

    pub fn block(&self, rank: usize) -> Block {
        let px = rank % self.procs[0];
        let r = rank / self.procs[0];
        let idx = [px, r % self.procs[1], r / self.procs[1]];
        let mut b = Block { lo: [0; 3], hi: [1; 3] };
        for a in 0..3 {
            b.lo[a] = self.cuts[a][idx[a]];
            b.hi[a] = self.cuts[a][idx[a] + 1];
        }
        b
    }

    pub fn owner_of(&self, c: [usize; 3]) -> usize {
        let mut idx = [0usize; 3];
        for a in 0..3 {
            // last cut index whose start is <= c
            idx[a] = self.cuts[a].partition_point(|&x| x <= c[a]) - 1;
        }
        idx[0] + self.procs[0] * (idx[1] + self.procs[1] * idx[2])
    }
}

/// Split the grid over `workers` blocks, balancing the particle counts given
/// by `occupancy` (one entry per cell; uniform weights when all zero).
pub fn partition(grid: &DomainGrid, occupancy: &[u32], workers: usize) -> Result<Partition> {
    let cells = grid.n_cells();
    if workers == 0 || workers > cells {
        return Err(Error::TooManyWorkers { workers, cells });
    }
    let procs = best_factorization(grid, workers).ok_or(Error::TooManyWorkers { workers, cells })?;
    let mut cuts: [Vec<usize>; 3] = Default::default();
    for a in 0..3 {
        let n = grid.counts[a];
        let mut hist = vec![0u64; n];
        for (i, &o) in occupancy.iter().enumerate() {
            hist[grid.unlinear(i)[a]] += o as u64;
        }
        if hist.iter().all(|&x| x == 0) {
            hist.iter_mut().for_each(|x| *x = 1);
        }
        cuts[a] = quantile_cuts(&hist, procs[a]);
    }
    Ok(Partition { procs, cuts })
}

/// Factorization p0·p1·p2 = workers with p_a ≤ n_a minimizing the total
/// area of the cut planes between blocks.
fn best_factorization(grid: &DomainGrid, workers: usize) -> Option<[usize; 3]> {
    let mut best: Option<([usize; 3], f64)> = None;
    let n = grid.counts;
    for p0 in 1..=workers {
        if workers % p0 != 0 || p0 > n[0] {
            continue;
        }
        let rest = workers / p0;
        for p1 in 1..=rest {
            if rest % p1 != 0 || p1 > n[1] {
                continue;
            }
            let p2 = rest / p1;
            if p2 > n[2] {
                continue;
            }
            let p = [p0, p1, p2];
            let mut cost = 0.0;
            for a in 0..grid.dimension {
                let planes = if p[a] > 1 && grid.periodic[a] { p[a] } else { p[a] - 1 };
                let area: f64 = (0..grid.dimension).filter(|&b| b != a).map(|b| n[b] as f64).product();
                cost += planes as f64 * area;
            }
            if best.map_or(true, |(_, c)| cost < c - 1e-9) {
                best = Some((p, cost));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Cut a histogram into `parts` contiguous non-empty ranges of near-equal sum.
fn quantile_cuts(hist: &[u64], parts: usize) -> Vec<usize> {
    let n = hist.len();
    let total: u64 = hist.iter().sum();
    let mut cuts = vec![0usize; parts + 1];
    cuts[parts] = n;
    let mut cum = 0u64;
    let mut c = 0usize;
    for k in 1..parts {
        let target = total as f64 * k as f64 / parts as f64;
        // at least one cell per part on both sides of the cut
        let lo = cuts[k - 1] + 1;
        let hi = n - (parts - k);
        while c < lo {
            cum += hist[c];
            c += 1;
        }
        while c < hi && cum as f64 + 0.5 * hist[c] as f64 <= target {
            cum += hist[c];
            c += 1;
        }
        cuts[k] = c;
    }
    cuts
}

/// Ghost cells of a cubic block of `owned` cells in `dimension` dimensions:
/// (∛n_o + 2)^d − n_o.
pub fn ghost_count(owned: usize, dimension: usize) -> usize {
    let side = (owned as f64).powf(1.0 / dimension as f64).round() as usize;
    assert_eq!(side.pow(dimension as u32), owned, "block must be a cube");
    (side + 2).pow(dimension as u32) - owned
}

/// One ghost cell of a worker: a copy of `real_cell` (owned by `owner`)
/// placed at `virtual_cell`, positions shifted by `shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostEntry {
    pub owner: usize,
    pub real_cell: [usize; 3],
    pub virtual_cell: [i64; 3],
    pub shift: Vec3,
}

/// Static exchange pattern: the ghost cells every worker needs.
#[derive(Debug, Clone, PartialEq)]
pub struct HaloPattern {
    pub per_worker: Vec<Vec<GhostEntry>>,
}

impl HaloPattern {
    pub fn new(grid: &DomainGrid, part: &Partition) -> Self {
        let d = grid.dimension;
        let per_worker = (0..part.n_workers())
            .map(|rank| {
                let b = part.block(rank);
                let mut entries = Vec::new();
                let range = |a: usize| -> (i64, i64) {
                    if a < d {
                        (b.lo[a] as i64 - 1, b.hi[a] as i64 + 1)
                    } else {
                        (0, 1)
                    }
                };
                let (z0, z1) = range(2);
                let (y0, y1) = range(1);
                let (x0, x1) = range(0);
                for z in z0..z1 {
                    for y in y0..y1 {
                        for x in x0..x1 {
                            let v = [x, y, z];
                            let inside = (0..3).all(|a| v[a] >= b.lo[a] as i64 && v[a] < b.hi[a] as i64);
                            if inside {
                                continue;
                            }
                            let mut real = [0usize; 3];
                            let mut shift = Vec3::zeros();
                            let mut exists = true;
                            for a in 0..3 {
                                let n = grid.counts[a] as i64;
                                if v[a] < 0 || v[a] >= n {
                                    if a < d && grid.periodic[a] {
                                        let w = v[a].rem_euclid(n);
                                        // image of cell w: shifted by one period
                                        shift[a] = if v[a] < 0 { -grid.period(a) } else { grid.period(a) };
                                        real[a] = w as usize;
                                    } else {
                                        exists = false;
                                    }
                                } else {
                                    real[a] = v[a] as usize;
                                }
                            }
                            if exists {
                                entries.push(GhostEntry { owner: part.owner_of(real), real_cell: real, virtual_cell: v, shift });
                            }
                        }
                    }
                }
                entries
            })
            .collect();
        HaloPattern { per_worker }
    }

    pub fn ghost_cells(&self, rank: usize) -> usize {
        self.per_worker[rank].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(n: usize, periodic: bool) -> DomainGrid {
        let l = n as f64;
        DomainGrid::from_parts(3, Vec3::zeros(), Vec3::new(l, l, l), [periodic; 3], 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn octant_split_of_48_cube() {
        let g = cube(48, false);
        let occ = vec![1u32; g.n_cells()];
        let p = partition(&g, &occ, 8).unwrap();
        assert_eq!(p.procs, [2, 2, 2]);
        for r in 0..8 {
            assert_eq!(p.block(r).n_cells(), 13824);
        }
    }

    #[test]
    fn ghost_formula() {
        assert_eq!(ghost_count(27, 3), 98);
        assert_eq!(ghost_count(13824, 3), 26 * 26 * 26 - 13824);
        assert_eq!(ghost_count(9, 2), 16);
    }

    #[test]
    fn pattern_matches_formula_for_interior_block() {
        let g = cube(9, false);
        let occ = vec![1u32; g.n_cells()];
        let p = partition(&g, &occ, 27).unwrap();
        let h = HaloPattern::new(&g, &p);
        let center = p.owner_of([4, 4, 4]);
        assert_eq!(p.block(center).n_cells(), 27);
        assert_eq!(h.ghost_cells(center), ghost_count(27, 3));
    }

    #[test]
    fn single_worker_owns_everything() {
        let g = cube(4, false);
        let p = partition(&g, &vec![0; g.n_cells()], 1).unwrap();
        assert_eq!(p.block(0).n_cells(), 64);
        assert_eq!(HaloPattern::new(&g, &p).ghost_cells(0), 0);
        let gp = cube(4, true);
        let pp = partition(&gp, &vec![0; gp.n_cells()], 1).unwrap();
        let h = HaloPattern::new(&gp, &pp);
        assert_eq!(h.ghost_cells(0), 6 * 6 * 6 - 64);
        assert!(h.per_worker[0].iter().all(|e| e.owner == 0 && e.shift.norm() > 0.0));
    }

    #[test]
    fn too_many_workers() {
        let g = cube(3, false);
        assert!(matches!(partition(&g, &[], 28), Err(Error::TooManyWorkers { .. })));
        // 27 cells but no factorization into 3x3x3 with 5 parts
        assert!(partition(&g, &vec![1; 27], 5).is_err());
    }

    #[test]
    fn every_cell_owned_exactly_once() {
        let g = DomainGrid::from_parts(2, Vec3::zeros(), Vec3::new(13.0, 7.0, 0.0), [false; 3], 1.0, 1.0, 0.0).unwrap();
        let occ: Vec<u32> = (0..g.n_cells()).map(|i| (i * 7 % 5) as u32).collect();
        for w in 1..=6 {
            let p = partition(&g, &occ, w).unwrap();
            let mut count = vec![0; g.n_cells()];
            for r in 0..w {
                let b = p.block(r);
                for i in 0..g.n_cells() {
                    if b.contains(g.unlinear(i)) {
                        count[i] += 1;
                        assert_eq!(p.owner_of(g.unlinear(i)), r);
                    }
                }
            }
            assert!(count.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn uniform_occupancy_balances_within_twenty_percent() {
        let g = DomainGrid::from_parts(2, Vec3::zeros(), Vec3::new(40.0, 24.0, 0.0), [false; 3], 1.0, 1.0, 0.0).unwrap();
        let occ = vec![9u32; g.n_cells()];
        for w in [2, 3, 4, 6, 8] {
            let p = partition(&g, &occ, w).unwrap();
            let loads: Vec<usize> = (0..w).map(|r| p.block(r).n_cells() * 9).collect();
            let max = *loads.iter().max().unwrap() as f64;
            let mean = loads.iter().sum::<usize>() as f64 / w as f64;
            assert!(max / mean <= 1.2, "{w}: {loads:?}");
        }
    }
}
