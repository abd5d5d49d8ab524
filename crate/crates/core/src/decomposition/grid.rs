use crate::error::{Error, Result};
use crate::model::{ScenarioConfig, Vec3};

/// Uniform cell lattice covering the global domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainGrid {
    pub dimension: usize,
    pub min: Vec3,
    pub max: Vec3,
    pub periodic: [bool; 3],
    pub edge: [f64; 3],
    pub counts: [usize; 3],
    /// Interaction radius r_c.
    pub cutoff: f64,
    /// Verlet skin actually used (limited by the cell edge).
    pub skin: f64,
}

impl DomainGrid {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        Self::from_parts(
            cfg.dimension,
            cfg.domain.min(),
            cfg.domain.max(),
            cfg.domain.periodic,
            cfg.discretization.min_cell_edge(),
            cfg.support_radius(),
            cfg.discretization.skin(),
        )
    }

    /// Periodic axes get the largest cell count whose edge is still at least
    /// `min_edge`, so the period is an integer number of cells.
    pub fn from_parts(
        dimension: usize,
        min: Vec3,
        max: Vec3,
        periodic: [bool; 3],
        min_edge: f64,
        cutoff: f64,
        skin: f64,
    ) -> Result<Self> {
        if min_edge < cutoff {
            return Err(Error::config(format!("cell edge < support radius ({min_edge} < {cutoff})")));
        }
        let mut edge = [min_edge; 3];
        let mut counts = [1usize; 3];
        let mut periodic = periodic;
        for a in 0..3 {
            if a >= dimension {
                periodic[a] = false;
                edge[a] = f64::INFINITY;
                continue;
            }
            let len = max[a] - min[a];
            if !(len > 0.0) {
                return Err(Error::config(format!("domain extent along axis {a} must be positive")));
            }
            if periodic[a] {
                let n = (len / min_edge).floor() as usize;
                if n < 3 {
                    return Err(Error::config(format!(
                        "periodic axis {a} needs at least 3 cells, domain fits {n}"
                    )));
                }
                counts[a] = n;
                edge[a] = len / n as f64;
            } else {
                counts[a] = ((len / min_edge).ceil() as usize).max(1);
            }
        }
        let smallest = edge.iter().take(dimension).cloned().fold(f64::INFINITY, f64::min);
        let skin = skin.min(smallest - cutoff).max(0.0);
        Ok(DomainGrid { dimension, min, max, periodic, edge, counts, cutoff, skin })
    }

    pub fn n_cells(&self) -> usize {
        self.counts.iter().product()
    }

    /// Neighbor search radius r_c + skin.
    pub fn search_radius(&self) -> f64 {
        self.cutoff + self.skin
    }

    pub fn period(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    /// Map a position into the primary periodic image.
    pub fn wrap(&self, p: &mut Vec3) {
        for a in 0..self.dimension {
            if self.periodic[a] {
                let len = self.period(a);
                let mut x = self.min[a] + (p[a] - self.min[a]).rem_euclid(len);
                if x >= self.max[a] {
                    x = self.min[a];
                }
                p[a] = x;
            }
        }
    }

    /// Whether `p` is inside the domain on all non-periodic axes.
    pub fn contains(&self, p: &Vec3) -> bool {
        (0..self.dimension).all(|a| self.periodic[a] || (p[a] >= self.min[a] && p[a] <= self.max[a]))
    }

    /// Cell of a wrapped, contained position.
    pub fn cell_of(&self, p: &Vec3) -> [usize; 3] {
        let mut c = [0usize; 3];
        for a in 0..self.dimension {
            let f = ((p[a] - self.min[a]) / self.edge[a]).floor();
            c[a] = (f.max(0.0) as usize).min(self.counts[a] - 1);
        }
        c
    }

    pub fn linear(&self, c: [usize; 3]) -> usize {
        c[0] + self.counts[0] * (c[1] + self.counts[1] * c[2])
    }

    pub fn unlinear(&self, i: usize) -> [usize; 3] {
        let x = i % self.counts[0];
        let r = i / self.counts[0];
        [x, r % self.counts[1], r / self.counts[1]]
    }

    /// Shortest periodic representative of a separation vector.
    pub fn minimum_image(&self, mut d: Vec3) -> Vec3 {
        for a in 0..self.dimension {
            if self.periodic[a] {
                let len = self.period(a);
                d[a] -= len * (d[a] / len).round();
            }
        }
        d
    }

    /// Periodic image of `p` closest to `reference`.
    pub fn nearest_image(&self, p: Vec3, reference: &Vec3) -> Vec3 {
        let mut q = p;
        for a in 0..self.dimension {
            if self.periodic[a] {
                let len = self.period(a);
                q[a] -= len * ((p[a] - reference[a]) / len).round();
            }
        }
        q
    }

    /// Occupancy count per cell.
    pub fn occupancy<'a>(&self, positions: impl IntoIterator<Item = &'a Vec3>) -> Vec<u32> {
        let mut h = vec![0u32; self.n_cells()];
        for p in positions {
            let mut q = *p;
            self.wrap(&mut q);
            if self.contains(&q) {
                h[self.linear(self.cell_of(&q))] += 1;
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> DomainGrid {
        DomainGrid::from_parts(
            2,
            Vec3::zeros(),
            Vec3::new(1.0, 0.5, 0.0),
            [true, false, false],
            0.1,
            0.09,
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn periodic_axis_divides_evenly() {
        let g = grid();
        assert_eq!(g.counts, [10, 5, 1]);
        assert!((g.edge[0] * 10.0 - 1.0).abs() < 1e-15);
        assert!(g.edge[0] >= 0.1 - 1e-15);
    }

    #[test]
    fn wrap_and_cells() {
        let g = grid();
        let mut p = Vec3::new(1.0 + 0.025, 0.2, 0.0);
        g.wrap(&mut p);
        assert!((p[0] - 0.025).abs() < 1e-12);
        assert_eq!(g.cell_of(&p), [0, 2, 0]);
        let mut q = Vec3::new(-1e-300, 0.2, 0.0);
        g.wrap(&mut q);
        assert!(q[0] >= 0.0 && q[0] < 1.0);
    }

    #[test]
    fn minimum_image_and_nearest_image() {
        let g = grid();
        let d = g.minimum_image(Vec3::new(0.9, 0.1, 0.0));
        assert!((d[0] + 0.1).abs() < 1e-12);
        let q = g.nearest_image(Vec3::new(0.05, 0.1, 0.0), &Vec3::new(0.98, 0.1, 0.0));
        assert!((q[0] - 1.05).abs() < 1e-12);
    }

    #[test]
    fn small_cells_rejected() {
        let r = DomainGrid::from_parts(2, Vec3::zeros(), Vec3::new(1.0, 1.0, 0.0), [false; 3], 0.05, 0.1, 0.0);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn two_cell_periodic_axis_rejected() {
        let r = DomainGrid::from_parts(2, Vec3::zeros(), Vec3::new(0.25, 1.0, 0.0), [true, false, false], 0.1, 0.1, 0.0);
        assert!(r.is_err());
    }
}
