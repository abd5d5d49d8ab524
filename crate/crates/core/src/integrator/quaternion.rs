use std::ops::Mul;

use crate::model::{Mat3, Vec3};

/// Rotation quaternion `w + v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub v: Vec3,
}

impl Default for Quaternion {
    fn default() -> Self {
        Quaternion::identity()
    }
}

impl Quaternion {
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, v: Vec3::new(x, y, z) }
    }

    pub fn identity() -> Self {
        Quaternion { w: 1.0, v: Vec3::zeros() }
    }

    /// Exponential map of a rotation vector: axis φ/|φ|, angle |φ|. Uses a
    /// series expansion for |φ| < 1e-8.
    pub fn from_rotation_vector(phi: &Vec3) -> Self {
        let theta = phi.norm();
        if theta < 1e-8 {
            let t2 = theta * theta;
            Quaternion { w: 1.0 - t2 / 8.0, v: phi * (0.5 - t2 / 48.0) }
        } else {
            let half = 0.5 * theta;
            Quaternion { w: half.cos(), v: phi * (half.sin() / theta) }
        }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.v.norm_squared()).sqrt()
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm();
        Quaternion { w: self.w / n, v: self.v / n }
    }

    pub fn conjugate(&self) -> Self {
        Quaternion { w: self.w, v: -self.v }
    }

    /// Rotate `x` by this (unit) quaternion.
    pub fn rotate(&self, x: &Vec3) -> Vec3 {
        let t = self.v.cross(x) * 2.0;
        x + t * self.w + self.v.cross(&t)
    }

    pub fn to_matrix(&self) -> Mat3 {
        let (w, x, y, z) = (self.w, self.v[0], self.v[1], self.v[2]);
        Mat3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product; `a * b` applies `b` first.
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion { w: self.w * o.w - self.v.dot(&o.v), v: o.v * self.w + self.v * o.w + self.v.cross(&o.v) }
    }
}

/// Rotate `v` by `q`, renormalizing (with a warning) when `q` is off unit
/// length by more than 1e-9.
pub fn rotate_vector(q: &Quaternion, v: &Vec3) -> Vec3 {
    let n = q.norm();
    if (n - 1.0).abs() > 1e-9 {
        log::warn!("rotating by a non-unit quaternion (|q| = {n}); normalizing");
        return q.normalize().rotate(v);
    }
    q.rotate(v)
}
