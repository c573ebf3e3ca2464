//! Points of the first Heisenberg group and its group operations.
//!
//! A point is an element of R^3 written as two horizontal coordinates
//! `(x, y)` and one vertical coordinate `z`. The group product twists the
//! vertical coordinate by the symplectic form of the horizontal parts, the
//! identity is the origin and the inverse is coordinate-wise negation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the Heisenberg group, serialized as a 3-array `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    /// Builds a point, rejecting non-finite coordinates.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::invalid(format!(
                "point coordinates must be finite, got ({x}, {y}, {z})"
            )));
        }
        Ok(Point { x, y, z })
    }

    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    /// Group product. The vertical coordinate picks up twice the symplectic
    /// area term of the two horizontal parts.
    #[must_use]
    pub fn group_mul(self, q: Point) -> Point {
        Point {
            x: self.x + q.x,
            y: self.y + q.y,
            z: self.z + q.z + 2.0 * (self.y * q.x - self.x * q.y),
        }
    }

    /// Group inverse, which is coordinate-wise negation.
    #[must_use]
    pub fn group_inverse(self) -> Point {
        Point { x: -self.x, y: -self.y, z: -self.z }
    }

    /// Anisotropic dilation: the horizontal part scales linearly, the
    /// vertical part quadratically. Fails for non-positive factors.
    pub fn dilate(self, lambda: f64) -> Result<Point> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::invalid(format!(
                "dilation factor must be positive and finite, got {lambda}"
            )));
        }
        Ok(Point {
            x: lambda * self.x,
            y: lambda * self.y,
            z: lambda * lambda * self.z,
        })
    }

    /// Euclidean norm of the coordinates, used for escape-radius estimates.
    pub fn euclidean_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Largest coordinate magnitude.
    pub fn max_abs_coordinate(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl From<Point> for [f64; 3] {
    fn from(p: Point) -> [f64; 3] {
        [p.x, p.y, p.z]
    }
}

impl TryFrom<[f64; 3]> for Point {
    type Error = Error;

    fn try_from(c: [f64; 3]) -> Result<Point> {
        Point::new(c[0], c[1], c[2])
    }
}
