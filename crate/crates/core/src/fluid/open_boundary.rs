//! Inflow/outflow buffer zones with a prescribed parabolic velocity profile.
//!
//! Inflow zones recycle: a particle leaving the zone downstream is released
//! into the domain and a copy is re-inserted one zone length upstream.
//! Outflow zones delete particles leaving them downstream.

use crate::model::{OpenBoundaryKind, OpenBoundarySpec, Shape, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct OpenBoundary {
    pub kind: OpenBoundaryKind,
    pub material: u16,
    pub min: Vec3,
    pub max: Vec3,
    pub axis: usize,
    pub mean_velocity: f64,
    pub start_time: f64,
    pub temperature: f64,
    pub concentration: f64,
    pub dimension: usize,
}

/// What happened to a particle relative to its zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneTransit {
    Inside,
    /// Left through the downstream face.
    Downstream,
    /// Left through any other face.
    Elsewhere,
}

impl OpenBoundary {
    pub fn from_spec(spec: &OpenBoundarySpec, material: u16, dimension: usize) -> Self {
        let (min, max) = match &spec.zone {
            Shape::Box { min, max } => (Vec3::from(*min), Vec3::from(*max)),
            other => other.bounds(),
        };
        OpenBoundary {
            kind: spec.kind,
            material,
            min,
            max,
            axis: spec.axis,
            mean_velocity: spec.mean_velocity,
            start_time: spec.start_time,
            temperature: spec.temperature,
            concentration: spec.concentration,
            dimension,
        }
    }

    pub fn direction(&self) -> f64 {
        if self.mean_velocity < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn length(&self) -> f64 {
        self.max[self.axis] - self.min[self.axis]
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..self.dimension).all(|a| p[a] >= self.min[a] && p[a] < self.max[a])
    }

    pub fn transit(&self, p: &Vec3) -> ZoneTransit {
        if self.contains(p) {
            return ZoneTransit::Inside;
        }
        let a = self.axis;
        let beyond = if self.direction() > 0.0 { p[a] >= self.max[a] } else { p[a] < self.min[a] };
        let lateral_ok = (0..self.dimension).filter(|&b| b != a).all(|b| p[b] >= self.min[b] && p[b] < self.max[b]);
        if beyond && lateral_ok {
            ZoneTransit::Downstream
        } else {
            ZoneTransit::Elsewhere
        }
    }

    /// Parabolic profile with the configured mean over the zone cross-section;
    /// zero up to `start_time`.
    pub fn velocity(&self, p: &Vec3, t: f64) -> Vec3 {
        let mut v = Vec3::zeros();
        if t <= self.start_time {
            return v;
        }
        let mut shape = 1.0;
        for b in (0..self.dimension).filter(|&b| b != self.axis) {
            let w = self.max[b] - self.min[b];
            let s = 2.0 * (p[b] - 0.5 * (self.min[b] + self.max[b])) / w;
            shape *= 1.5 * (1.0 - s * s).max(0.0);
        }
        v[self.axis] = self.mean_velocity * shape;
        v
    }

    /// Position of the recycled copy of a particle released at `p`.
    pub fn recycle_position(&self, p: &Vec3) -> Vec3 {
        let mut q = *p;
        q[self.axis] -= self.direction() * self.length();
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inlet() -> OpenBoundary {
        OpenBoundary {
            kind: OpenBoundaryKind::Inflow,
            material: 0,
            min: Vec3::new(0.0, 10.0, 0.0),
            max: Vec3::new(3.0, 11.0, 0.0),
            axis: 1,
            mean_velocity: -420.0,
            start_time: 0.25,
            temperature: 0.0,
            concentration: 0.0,
            dimension: 2,
        }
    }

    #[test]
    fn profile_mean_matches_and_starts_late() {
        let z = inlet();
        assert_eq!(z.velocity(&Vec3::new(1.5, 10.5, 0.0), 0.2), Vec3::zeros());
        let n = 3000;
        let mean: f64 = (0..n)
            .map(|i| z.velocity(&Vec3::new(3.0 * (i as f64 + 0.5) / n as f64, 10.5, 0.0), 0.3)[1])
            .sum::<f64>()
            / n as f64;
        assert!((mean + 420.0).abs() < 1e-3);
    }

    #[test]
    fn downward_flow_exits_through_bottom() {
        let z = inlet();
        assert_eq!(z.transit(&Vec3::new(1.0, 9.99, 0.0)), ZoneTransit::Downstream);
        assert_eq!(z.transit(&Vec3::new(1.0, 11.01, 0.0)), ZoneTransit::Elsewhere);
        assert_eq!(z.transit(&Vec3::new(1.0, 10.5, 0.0)), ZoneTransit::Inside);
        let q = z.recycle_position(&Vec3::new(1.0, 9.95, 0.0));
        assert!((q[1] - 10.95).abs() < 1e-12);
    }
}
