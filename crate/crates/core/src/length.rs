//! Metric-space curve lengths: partition sums, dyadic refinement,
//! length profiles and reparametrizations. Everything here is generic in
//! the metric; pass [`crate::heisenberg::koranyi_distance`] or
//! [`crate::heisenberg::euclidean_distance`].

use crate::curve::{LengthReport, Partition, SampledCurve};
use crate::error::{Error, Result};
use crate::point::Point;

/// Sum of consecutive metric distances of the curve sampled at the
/// partition knots. Knots between grid points evaluate by linear
/// interpolation; knots outside the curve's parameter range are a domain
/// error.
pub fn polygonal_length(
    curve: &SampledCurve,
    metric: impl Fn(Point, Point) -> f64,
    partition: &Partition,
) -> Result<f64> {
    let mut total = 0.0;
    let mut prev = curve.evaluate(partition.first())?;
    for &t in &partition.knots()[1..] {
        let next = curve.evaluate(t)?;
        total += metric(prev, next);
        prev = next;
    }
    Ok(total)
}

/// Metric length of an evaluator-defined curve on `[a, b]` by dyadic
/// refinement: level k sums consecutive distances over 2^k uniform
/// intervals, stopping when one refinement gains less than `tol` or after
/// `max_levels` refinements. The value never decreases across levels, so a
/// non-converged report means the supremum kept growing (vertical segments
/// have no finite length in the Koranyi metric).
pub fn curve_length(
    evaluator: impl Fn(f64) -> Result<Point>,
    a: f64,
    b: f64,
    metric: impl Fn(Point, Point) -> f64,
    tol: f64,
    max_levels: usize,
) -> Result<LengthReport> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(format!("need finite a < b, got [{a}, {b}]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if max_levels == 0 {
        return Err(Error::invalid("need at least one refinement level"));
    }

    let mut points = vec![evaluator(a)?, evaluator(b)?];
    let sum = |pts: &[Point]| -> f64 {
        pts.windows(2).map(|w| metric(w[0], w[1])).sum()
    };
    let mut level_values = vec![sum(&points)];
    let mut last_increment = f64::INFINITY;
    let mut converged = false;
    for level in 1..=max_levels {
        let intervals = 1usize << level;
        let mut refined = Vec::with_capacity(intervals + 1);
        for (i, &p) in points.iter().enumerate() {
            refined.push(p);
            if i + 1 < points.len() {
                let t = a + (b - a) * ((2 * i + 1) as f64) / (intervals as f64);
                refined.push(evaluator(t)?);
            }
        }
        points = refined;
        let value = sum(&points);
        last_increment = value - *level_values.last().unwrap();
        level_values.push(value);
        if last_increment < tol {
            converged = true;
            break;
        }
    }
    Ok(LengthReport {
        value: *level_values.last().unwrap(),
        levels: level_values.len() - 1,
        last_increment,
        converged,
        level_values,
    })
}

/// Cumulative polygonal length along a sampled curve's own grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthProfile {
    pub knots: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl LengthProfile {
    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }
}

/// Running sum of consecutive metric distances over the curve's grid.
/// Non-decreasing; flat exactly where the curve stalls.
pub fn length_profile(
    curve: &SampledCurve,
    metric: impl Fn(Point, Point) -> f64,
) -> LengthProfile {
    let mut cumulative = Vec::with_capacity(curve.points.len());
    cumulative.push(0.0);
    for w in curve.points.windows(2) {
        let d = metric(w[0], w[1]);
        cumulative.push(cumulative.last().unwrap() + d);
    }
    LengthProfile { knots: curve.grid.knots().to_vec(), cumulative }
}

/// Reparametrizes a sampled curve by normalized arclength on `[0, 1]`.
///
/// The output grid is the normalized length profile, so the curve becomes
/// Lipschitz with constant (close to) its total length. Samples are reused
/// untouched; where the profile stalls, only the first knot of the flat run
/// is kept (the smallest preimage). A curve of zero total length collapses
/// to a constant curve on `[0, 1]`.
pub fn arclength_reparametrize(
    curve: &SampledCurve,
    metric: impl Fn(Point, Point) -> f64,
) -> Result<SampledCurve> {
    let profile = length_profile(curve, metric);
    let total = profile.total();
    if total == 0.0 {
        let grid = Partition::new(vec![0.0, 1.0])?;
        let p = curve.first_point();
        return SampledCurve::new(grid, vec![p, p], None);
    }
    let mut knots = Vec::with_capacity(profile.cumulative.len());
    let mut points = Vec::with_capacity(profile.cumulative.len());
    for (i, &tau) in profile.cumulative.iter().enumerate() {
        let s = tau / total;
        // A stalled segment repeats the previous normalized length exactly;
        // keep the first knot of the run. (Sub-resolution increments that
        // vanish in the cumulative sum collapse the same way.)
        if i > 0 && s <= *knots.last().unwrap() {
            continue;
        }
        knots.push(s);
        points.push(curve.points[i]);
    }
    // The final cumulative value normalizes to exactly 1.0; it is only ever
    // skipped when the tail of the profile is below resolution, in which
    // case the kept point differs from the endpoint by less than one ulp of
    // the total length. Snap to the endpoint so it is preserved exactly.
    *points.last_mut().unwrap() = curve.last_point();
    let grid = Partition::new(knots)?;
    SampledCurve::new(grid, points, None)
}

/// Affine reparametrization of the grid onto `[c, d]`; samples untouched,
/// endpoint knots set exactly, velocity samples rescaled by the chain rule.
pub fn linear_reparametrize(curve: &SampledCurve, c: f64, d: f64) -> Result<SampledCurve> {
    if !(c.is_finite() && d.is_finite() && c < d) {
        return Err(Error::invalid(format!("need finite c < d, got [{c}, {d}]")));
    }
    let (a, b) = (curve.grid.first(), curve.grid.last());
    let scale = (d - c) / (b - a);
    let mut knots: Vec<f64> = curve
        .grid
        .knots()
        .iter()
        .map(|&t| c + (t - a) * scale)
        .collect();
    knots[0] = c;
    *knots.last_mut().unwrap() = d;
    let grid = Partition::new(knots)?;
    let derivatives = curve.derivatives.as_ref().map(|ds| {
        ds.iter()
            .map(|v| Point { x: v.x / scale, y: v.y / scale, z: v.z / scale })
            .collect()
    });
    SampledCurve::new(grid, curve.points.clone(), derivatives)
}
