use serde::{Deserialize, Serialize};

use super::Vec3;

/// Geometric primitives used to define fluid regions, bodies and walls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    /// Axis-aligned box (rectangle in 2D, z bounds ignored).
    Box { min: [f64; 3], max: [f64; 3] },
    /// Disk in the xy-plane. Two-dimensional only.
    Circle { center: [f64; 2], radius: f64 },
    /// Three-dimensional only.
    Sphere { center: [f64; 3], radius: f64 },
}

impl Shape {
    pub fn rect(min: [f64; 2], max: [f64; 2]) -> Self {
        Shape::Box { min: [min[0], min[1], 0.0], max: [max[0], max[1], 0.0] }
    }

    pub fn cuboid(min: [f64; 3], max: [f64; 3]) -> Self {
        Shape::Box { min, max }
    }

    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        Shape::Circle { center, radius }
    }

    pub fn sphere(center: [f64; 3], radius: f64) -> Self {
        Shape::Sphere { center, radius }
    }

    pub fn contains(&self, p: &Vec3, dimension: usize) -> bool {
        match self {
            Shape::Box { min, max } => (0..dimension).all(|a| p[a] >= min[a] && p[a] <= max[a]),
            Shape::Circle { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx * dx + dy * dy <= radius * radius
            }
            Shape::Sphere { center, radius } => {
                let d = p - Vec3::from(*center);
                d.norm_squared() <= radius * radius
            }
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        match self {
            Shape::Box { min, max } => (Vec3::from(*min), Vec3::from(*max)),
            Shape::Circle { center, radius } => (
                Vec3::new(center[0] - radius, center[1] - radius, 0.0),
                Vec3::new(center[0] + radius, center[1] + radius, 0.0),
            ),
            Shape::Sphere { center, radius } => {
                let c = Vec3::from(*center);
                (c.add_scalar(-radius), c.add_scalar(*radius))
            }
        }
    }

    /// Whether the primitive exists in the given dimension.
    pub fn supports_dimension(&self, dimension: usize) -> bool {
        match self {
            Shape::Box { .. } => true,
            Shape::Circle { .. } => dimension == 2,
            Shape::Sphere { .. } => dimension == 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Shape::Box { .. } => "box",
            Shape::Circle { .. } => "circle",
            Shape::Sphere { .. } => "sphere",
        }
    }
}
