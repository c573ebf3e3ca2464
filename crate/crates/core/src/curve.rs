//! Sampled curves, parameter partitions and length reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// A finite, strictly increasing sequence of parameter knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Partition {
    knots: Vec<f64>,
}

impl Partition {
    /// Validates strict monotonicity, finiteness and at least two knots.
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid(format!(
                "a partition needs at least 2 knots, got {}",
                knots.len()
            )));
        }
        for w in knots.windows(2) {
            if !(w[0].is_finite() && w[1].is_finite()) {
                return Err(Error::invalid("partition knots must be finite"));
            }
            if w[1] <= w[0] {
                return Err(Error::invalid(format!(
                    "partition knots must strictly increase, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Partition { knots })
    }

    /// Uniform partition of `[a, b]` into `intervals` pieces. The first and
    /// last knot are exactly `a` and `b`.
    pub fn uniform(a: f64, b: f64, intervals: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("need finite a < b, got [{a}, {b}]")));
        }
        if intervals == 0 {
            return Err(Error::invalid("need at least one interval"));
        }
        let n = intervals;
        let mut knots = Vec::with_capacity(n + 1);
        for i in 0..=n {
            knots.push(a + (b - a) * (i as f64) / (n as f64));
        }
        knots[0] = a;
        knots[n] = b;
        Partition::new(knots)
    }

    /// New partition with the midpoint of every interval inserted.
    #[must_use]
    pub fn refine_midpoints(&self) -> Partition {
        let mut knots = Vec::with_capacity(2 * self.knots.len() - 1);
        for w in self.knots.windows(2) {
            knots.push(w[0]);
            knots.push(0.5 * (w[0] + w[1]));
        }
        knots.push(*self.knots.last().unwrap());
        Partition { knots }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    pub fn last(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Number of knots (one more than the number of intervals).
    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the interval `[t_i, t_{i+1}]` containing `t`, or a domain
    /// error outside `[first, last]`.
    pub fn locate(&self, t: f64) -> Result<usize> {
        if !(t >= self.first() && t <= self.last()) {
            return Err(Error::domain(format!(
                "parameter {t} outside [{}, {}]",
                self.first(),
                self.last()
            )));
        }
        let i = self.knots.partition_point(|&k| k <= t);
        Ok(i.saturating_sub(1).min(self.knots.len() - 2))
    }
}

impl TryFrom<Vec<f64>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<f64> {
    fn from(p: Partition) -> Vec<f64> {
        p.knots
    }
}

/// A curve known through samples on a partition, with optional velocity
/// samples. Between knots the curve is evaluated by linear interpolation of
/// the coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub grid: Partition,
    pub points: Vec<Point>,
    pub derivatives: Option<Vec<Point>>,
}

impl SampledCurve {
    pub fn new(grid: Partition, points: Vec<Point>, derivatives: Option<Vec<Point>>) -> Result<Self> {
        if points.len() != grid.len() {
            return Err(Error::invalid(format!(
                "sample count {} does not match knot count {}",
                points.len(),
                grid.len()
            )));
        }
        if let Some(d) = &derivatives {
            if d.len() != grid.len() {
                return Err(Error::invalid(format!(
                    "derivative count {} does not match knot count {}",
                    d.len(),
                    grid.len()
                )));
            }
        }
        Ok(SampledCurve { grid, points, derivatives })
    }

    pub fn first_point(&self) -> Point {
        self.points[0]
    }

    pub fn last_point(&self) -> Point {
        *self.points.last().unwrap()
    }

    /// Evaluates the curve at `t`. Knot values are returned exactly as
    /// stored; other parameters interpolate linearly.
    pub fn evaluate(&self, t: f64) -> Result<Point> {
        let i = self.grid.locate(t)?;
        let (t0, t1) = (self.grid.knots()[i], self.grid.knots()[i + 1]);
        if t == t0 {
            return Ok(self.points[i]);
        }
        if t == t1 {
            return Ok(self.points[i + 1]);
        }
        let w = (t - t0) / (t1 - t0);
        let (p, q) = (self.points[i], self.points[i + 1]);
        Ok(Point {
            x: p.x + w * (q.x - p.x),
            y: p.y + w * (q.y - p.y),
            z: p.z + w * (q.z - p.z),
        })
    }

    /// Same curve with velocity samples from three-point finite differences
    /// on the (possibly non-uniform) grid.
    pub fn with_difference_derivatives(&self) -> Result<SampledCurve> {
        let d = difference_derivatives(self.grid.knots(), &self.points)?;
        SampledCurve::new(self.grid.clone(), self.points.clone(), Some(d))
    }
}

/// A planar curve `(x(t), y(t))` known through samples, the input of the
/// horizontal lift.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    pub grid: Partition,
    pub points: Vec<(f64, f64)>,
    pub derivatives: Option<Vec<(f64, f64)>>,
}

impl PlanarCurve {
    pub fn new(
        grid: Partition,
        points: Vec<(f64, f64)>,
        derivatives: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        if points.len() != grid.len() {
            return Err(Error::invalid(format!(
                "sample count {} does not match knot count {}",
                points.len(),
                grid.len()
            )));
        }
        if let Some(d) = &derivatives {
            if d.len() != grid.len() {
                return Err(Error::invalid(format!(
                    "derivative count {} does not match knot count {}",
                    d.len(),
                    grid.len()
                )));
            }
        }
        Ok(PlanarCurve { grid, points, derivatives })
    }
}

/// Three-point finite-difference velocities on a non-uniform grid, second
/// order accurate in the interior and at both ends.
pub fn difference_derivatives(knots: &[f64], points: &[Point]) -> Result<Vec<Point>> {
    let n = knots.len();
    if n < 3 {
        return Err(Error::invalid(
            "finite-difference derivatives need at least 3 samples",
        ));
    }
    let scalar = |f: &dyn Fn(Point) -> f64, i: usize| -> f64 {
        if i == 0 {
            let (h1, h2) = (knots[1] - knots[0], knots[2] - knots[1]);
            let (f0, f1, f2) = (f(points[0]), f(points[1]), f(points[2]));
            -f0 * (2.0 * h1 + h2) / (h1 * (h1 + h2)) + f1 * (h1 + h2) / (h1 * h2)
                - f2 * h1 / (h2 * (h1 + h2))
        } else if i == n - 1 {
            let (h1, h2) = (knots[n - 2] - knots[n - 3], knots[n - 1] - knots[n - 2]);
            let (f0, f1, f2) = (f(points[n - 3]), f(points[n - 2]), f(points[n - 1]));
            f0 * h2 / (h1 * (h1 + h2)) - f1 * (h1 + h2) / (h1 * h2)
                + f2 * (2.0 * h2 + h1) / (h2 * (h1 + h2))
        } else {
            let (h1, h2) = (knots[i] - knots[i - 1], knots[i + 1] - knots[i]);
            let (f0, f1, f2) = (f(points[i - 1]), f(points[i]), f(points[i + 1]));
            -f0 * h2 / (h1 * (h1 + h2)) + f1 * (h2 - h1) / (h1 * h2)
                + f2 * h1 / (h2 * (h1 + h2))
        }
    };
    Ok((0..n)
        .map(|i| Point {
            x: scalar(&|p: Point| p.x, i),
            y: scalar(&|p: Point| p.y, i),
            z: scalar(&|p: Point| p.z, i),
        })
        .collect())
}

/// Result of an iteratively refined length computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthReport {
    /// Best polygonal length estimate.
    pub value: f64,
    /// Number of refinement levels actually evaluated.
    pub levels: usize,
    /// Increment gained by the last refinement.
    pub last_increment: f64,
    /// Whether the final increment dropped below the tolerance.
    pub converged: bool,
    /// The estimate after each level, in order.
    pub level_values: Vec<f64>,
}
