//! Quintic spline smoothing kernel with support radius 3h.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul};

use crate::model::Vec3;

/// Support radius in units of the smoothing length.
pub const SUPPORT_SCALE: f64 = 3.0;

/// Normalization constant σ_d (per h^d) for dimension 1, 2 or 3.
pub fn sigma(dimension: usize) -> f64 {
    match dimension {
        1 => 1.0 / 120.0,
        2 => 7.0 / (478.0 * PI),
        3 => 1.0 / (120.0 * PI),
        _ => panic!("kernel dimension must be 1, 2 or 3, got {dimension}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    h: f64,
    dimension: usize,
    inv_h: f64,
    rc: f64,
    /// σ_d / h^d
    norm: f64,
}

impl Kernel {
    pub fn new(h: f64, dimension: usize) -> Self {
        assert!(h > 0.0, "smoothing length must be positive");
        Kernel { h, dimension, inv_h: 1.0 / h, rc: SUPPORT_SCALE * h, norm: sigma(dimension) / h.powi(dimension as i32) }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn support_radius(&self) -> f64 {
        self.rc
    }

    pub fn w(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0, "negative distance {r}");
        if r >= self.rc {
            return 0.0;
        }
        let q = r * self.inv_h;
        let t3 = 3.0 - q;
        let t2 = 2.0 - q;
        let t1 = 1.0 - q;
        let s = if q < 1.0 {
            p5(t3) - 6.0 * p5(t2) + 15.0 * p5(t1)
        } else if q < 2.0 {
            p5(t3) - 6.0 * p5(t2)
        } else if q < 3.0 {
            p5(t3)
        } else {
            0.0
        };
        self.norm * s
    }

    /// ∂W/∂r. Non-positive everywhere.
    pub fn dw_dr(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0, "negative distance {r}");
        if r >= self.rc {
            return 0.0;
        }
        let q = r * self.inv_h;
        let t3 = 3.0 - q;
        let t2 = 2.0 - q;
        let t1 = 1.0 - q;
        let s = if q < 1.0 {
            -5.0 * p4(t3) + 30.0 * p4(t2) - 75.0 * p4(t1)
        } else if q < 2.0 {
            -5.0 * p4(t3) + 30.0 * p4(t2)
        } else if q < 3.0 {
            -5.0 * p4(t3)
        } else {
            0.0
        };
        self.norm * self.inv_h * s
    }

    /// W(0) = 66 σ_d / h^d.
    pub fn w0(&self) -> f64 {
        66.0 * self.norm
    }
}

#[inline]
fn p4(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2
}

#[inline]
fn p5(x: f64) -> f64 {
    p4(x) * x
}

/// Shepard-filtered value at `x` from `(position, volume, value)` samples.
///
/// Returns `None` when no sample lies inside the kernel support.
pub fn shepard_interpolate<T, I>(kernel: &Kernel, x: &Vec3, samples: I) -> Option<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T> + Div<f64, Output = T>,
    I: IntoIterator<Item = (Vec3, f64, T)>,
{
    let mut num: Option<T> = None;
    let mut den = 0.0;
    for (p, v, f) in samples {
        let w = kernel.w((x - p).norm());
        if w <= 0.0 {
            continue;
        }
        let c = f * (v * w);
        num = Some(match num {
            Some(n) => n + c,
            None => c,
        });
        den += v * w;
    }
    match num {
        Some(n) if den > 0.0 => Some(n / den),
        _ => None,
    }
}

/// Plain kernel gradient estimate ∇f(x_i) ≈ Σ_j V_j f_j ∇W(x_i − r_j).
///
/// Has known accuracy problems on irregular particle sets; the physics
/// modules use dedicated pair operators instead.
pub fn gradient_estimate<I>(kernel: &Kernel, x: &Vec3, samples: I) -> Vec3
where
    I: IntoIterator<Item = (Vec3, f64, f64)>,
{
    let mut g = Vec3::zeros();
    for (p, v, f) in samples {
        let d = x - p;
        let r = d.norm();
        if r > 0.0 {
            g += d * (v * f * kernel.dw_dr(r) / r);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let c = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64, fc: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let c = 0.5 * (a + b);
            let (l, r) = (0.5 * (a + c), 0.5 * (c + b));
            let (fl, fr) = (f(l), f(r));
            let left = (c - a) / 6.0 * (fa + 4.0 * fl + fc);
            let right = (b - c) / 6.0 * (fc + 4.0 * fr + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, c, fa, fc, fl, left, tol / 2.0, depth - 1) + rec(f, c, b, fc, fb, fr, right, tol / 2.0, depth - 1)
        }
        rec(f, a, b, f(a), f(b), f(c), whole, tol, depth)
    }

    fn integral(dim: usize, h: f64) -> f64 {
        let k = Kernel::new(h, dim);
        let shell = move |r: f64| match dim {
            1 => 2.0 * k.w(r),
            2 => 2.0 * PI * r * k.w(r),
            _ => 4.0 * PI * r * r * k.w(r),
        };
        (0..3).map(|i| simpson(&shell, i as f64 * h, (i + 1) as f64 * h, 1e-13, 40)).sum()
    }

    #[test]
    fn normalization_by_quadrature() {
        for dim in 1..=3 {
            for h in [1.0, 2e-4, 0.37] {
                let s = integral(dim, h);
                assert!((s - 1.0).abs() < 1e-6, "dim {dim} h {h}: {s}");
            }
        }
    }

    #[test]
    fn origin_value_is_66_sigma() {
        for dim in 1..=3 {
            let k = Kernel::new(1.0, dim);
            let spline = 3f64.powi(5) - 6.0 * 2f64.powi(5) + 15.0;
            assert_eq!(spline, 66.0);
            assert_relative_eq!(k.w(0.0), spline * sigma(dim), max_relative = 1e-15);
        }
    }

    #[test]
    fn compact_support_is_exact() {
        let k = Kernel::new(1.0, 2);
        assert_eq!(k.w(3.0), 0.0);
        assert_eq!(k.w(3.0000001), 0.0);
        assert_eq!(k.dw_dr(3.0), 0.0);
        assert_eq!(k.dw_dr(5.0), 0.0);
        assert_eq!(k.dw_dr(0.0), 0.0);
    }

    #[test]
    fn derivative_matches_central_difference() {
        for dim in 1..=3 {
            let k = Kernel::new(1.0, dim);
            let mut r = 0.013;
            while r < 3.0 {
                let eps = 1e-5;
                let fd = (k.w(r + eps) - k.w(r - eps)) / (2.0 * eps);
                let an = k.dw_dr(r);
                // the central difference of a quintic has O(eps^2 f''') error
                let tol = 1e-8 * an.abs().max(1e-3 * k.w0());
                assert!((fd - an).abs() <= tol, "dim {dim} r {r}: {fd} vs {an}");
                r += 0.0731;
            }
        }
    }

    fn lattice_partition_sum(dim: usize, dx: f64, h: f64) -> f64 {
        let k = Kernel::new(h, dim);
        let n = (k.support_radius() / dx).ceil() as i64 + 1;
        let vol = dx.powi(dim as i32);
        let range = -n..=n;
        let mut s = 0.0;
        for i in range.clone() {
            for j in if dim >= 2 { range.clone() } else { 0..=0 } {
                for l in if dim >= 3 { range.clone() } else { 0..=0 } {
                    let r = dx * ((i * i + j * j + l * l) as f64).sqrt();
                    s += vol * k.w(r);
                }
            }
        }
        s
    }

    #[test]
    fn lattice_partition_of_unity() {
        for dim in 1..=3 {
            let s = lattice_partition_sum(dim, 0.1, 0.1);
            assert!((0.99..=1.01).contains(&s), "dim {dim}: {s}");
        }
    }

    #[test]
    fn shepard_reproduces_constants_and_single_neighbors() {
        let k = Kernel::new(1.0, 2);
        let pts = [(Vec3::new(0.3, 0.1, 0.0), 0.7, 7.0), (Vec3::new(-1.1, 0.4, 0.0), 1.3, 7.0)];
        let v: f64 = shepard_interpolate(&k, &Vec3::zeros(), pts).unwrap();
        assert_relative_eq!(v, 7.0, max_relative = 1e-15);
        let one = [(Vec3::new(0.5, 0.0, 0.0), 2.0, Vec3::new(1.0, 2.0, 3.0))];
        let u: Vec3 = shepard_interpolate(&k, &Vec3::zeros(), one).unwrap();
        assert!((u - Vec3::new(1.0, 2.0, 3.0)).norm() < 1e-15);
        let none: Option<f64> = shepard_interpolate(&k, &Vec3::zeros(), [(Vec3::new(4.0, 0.0, 0.0), 1.0, 1.0)]);
        assert!(none.is_none());
    }

    #[test]
    fn shepard_linear_field_on_lattice() {
        let dx = 0.1;
        let k = Kernel::new(dx, 2);
        let f = |p: &Vec3| 2.0 * p[0] - 3.0 * p[1] + 5.0;
        let mut samples = Vec::new();
        for i in -10..=10 {
            for j in -10..=10 {
                let p = Vec3::new(i as f64 * dx, j as f64 * dx, 0.0);
                samples.push((p, dx * dx, f(&p)));
            }
        }
        let x = Vec3::new(0.037, -0.021, 0.0);
        let v: f64 = shepard_interpolate(&k, &x, samples.iter().copied()).unwrap();
        // direct oracle
        let mut num = 0.0;
        let mut den = 0.0;
        for (p, vol, val) in &samples {
            let w = k.w((x - p).norm());
            num += vol * val * w;
            den += vol * w;
        }
        assert_relative_eq!(v, num / den, max_relative = 1e-12);
        assert!((v - f(&x)).abs() / f(&x).abs() < 0.01);
    }

    #[test]
    fn gradient_of_linear_field_in_lattice_interior() {
        let dx = 0.1;
        let k = Kernel::new(dx, 2);
        let mut samples = Vec::new();
        for i in -8..=8 {
            for j in -8..=8 {
                let p = Vec3::new(i as f64 * dx, j as f64 * dx, 0.0);
                samples.push((p, dx * dx, 4.0 * p[0] + 1.0 * p[1]));
            }
        }
        let g = gradient_estimate(&k, &Vec3::zeros(), samples);
        assert!((g[0] - 4.0).abs() < 0.02 && (g[1] - 1.0).abs() < 0.02, "{g:?}");
    }

    proptest! {
        #[test]
        fn kernel_is_positive_and_decreasing(r in 0.0f64..4.0, h in 0.01f64..10.0, dim in 1usize..=3) {
            let k = Kernel::new(h, dim);
            let r = r * h;
            prop_assert!(k.w(r) >= 0.0);
            prop_assert!(k.dw_dr(r) <= 0.0);
            if r > k.support_radius() {
                prop_assert_eq!(k.w(r), 0.0);
            }
        }

        #[test]
        fn kernel_depends_only_on_distance(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
            let k = Kernel::new(1.0, 3);
            let a = Vec3::new(x, y, z);
            let b = -a;
            prop_assert_eq!(k.w(a.norm()), k.w(b.norm()));
        }
    }
}
