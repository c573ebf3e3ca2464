//! Koranyi metric, horizontality, lifts and comparison estimates.

use serde::{Deserialize, Serialize};

use crate::curve::{PlanarCurve, SampledCurve};
use crate::error::{Error, Result};
use crate::point::Point;

/// Gauge norm: fourth root of (horizontal part squared)^2 + (vertical part)^2.
pub fn koranyi_norm(p: Point) -> f64 {
    let planar = p.x * p.x + p.y * p.y;
    (planar * planar + p.z * p.z).sqrt().sqrt()
}

/// Koranyi distance in closed form. Equals `koranyi_norm` of the group
/// quotient `p^{-1} * q`, see the consistency test below.
pub fn koranyi_distance(p: Point, q: Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let planar = dx * dx + dy * dy;
    let vertical = p.z - q.z + 2.0 * (p.y * q.x - p.x * q.y);
    (planar * planar + vertical * vertical).sqrt().sqrt()
}

/// Euclidean distance of the coordinates, for comparison runs.
pub fn euclidean_distance(p: Point, q: Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// The two vector fields spanning the horizontal plane at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalFrame {
    pub first: [f64; 3],
    pub second: [f64; 3],
}

impl HorizontalFrame {
    pub fn at(p: Point) -> Self {
        HorizontalFrame {
            first: [1.0, 0.0, 2.0 * p.y],
            second: [0.0, 1.0, -2.0 * p.x],
        }
    }

    /// Coefficients of a velocity in this frame. They are just the two
    /// horizontal velocity components.
    pub fn coefficients(&self, velocity: Point) -> (f64, f64) {
        (velocity.x, velocity.y)
    }

    /// Distance of a velocity from the span of the frame, measured on the
    /// vertical component: |v_z - (v_x * first_z + v_y * second_z)|.
    pub fn residual(&self, velocity: Point) -> f64 {
        (velocity.z - velocity.x * self.first[2] - velocity.y * self.second[2]).abs()
    }
}

/// Horizontality defect of a velocity at a point:
/// |z' + 2 (x y' - y x')|, zero exactly on horizontal curves.
pub fn pointwise_horizontality_residual(p: Point, velocity: Point) -> f64 {
    (velocity.z + 2.0 * (p.x * velocity.y - p.y * velocity.x)).abs()
}

/// Per-sample horizontality residuals of a curve with velocity data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizontalityReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Evaluates the horizontality residual at every sample. Fails when the
/// curve carries no velocity data.
pub fn horizontality_residuals(curve: &SampledCurve) -> Result<HorizontalityReport> {
    let derivatives = curve.derivatives.as_ref().ok_or_else(|| {
        Error::invalid("horizontality residuals need velocity samples")
    })?;
    let residuals: Vec<f64> = curve
        .points
        .iter()
        .zip(derivatives)
        .map(|(&p, &v)| pointwise_horizontality_residual(p, v))
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(HorizontalityReport { residuals, max_residual })
}

/// Horizontality threshold used by [`cc_length`]: a fixed base scaled by
/// one plus the largest sampled speed.
pub fn horizontality_threshold(max_speed: f64) -> f64 {
    1e-6 * (1.0 + max_speed)
}

/// Length of a horizontal curve as the integral of the horizontal speed
/// sqrt(x'^2 + y'^2), by the trapezoidal rule on the sample grid.
///
/// Fails when velocity samples are missing or when the curve is not
/// horizontal within the speed-scaled threshold.
pub fn cc_length(curve: &SampledCurve) -> Result<f64> {
    let derivatives = curve.derivatives.as_ref().ok_or_else(|| {
        Error::invalid("the horizontal length needs velocity samples")
    })?;
    let speeds: Vec<f64> = derivatives
        .iter()
        .map(|v| (v.x * v.x + v.y * v.y).sqrt())
        .collect();
    let max_speed = speeds.iter().cloned().fold(0.0, f64::max);
    let threshold = horizontality_threshold(max_speed);
    let report = horizontality_residuals(curve)?;
    if report.max_residual > threshold {
        return Err(Error::NotHorizontal {
            max_residual: report.max_residual,
            threshold,
        });
    }
    let knots = curve.grid.knots();
    let mut total = 0.0;
    for i in 0..knots.len() - 1 {
        total += (knots[i + 1] - knots[i]) * 0.5 * (speeds[i] + speeds[i + 1]);
    }
    Ok(total)
}

/// Horizontal lift of a planar curve: integrates
/// z' = -2 (x y' - y x') by the trapezoidal rule, with velocities taken
/// from the input when present and from three-point finite differences
/// otherwise. The returned curve carries velocities with the vertical
/// component given by the lift equation.
pub fn horizontal_lift(planar: &PlanarCurve, z0: f64) -> Result<SampledCurve> {
    if !z0.is_finite() {
        return Err(Error::invalid("initial height must be finite"));
    }
    let derivatives: Vec<(f64, f64)> = match &planar.derivatives {
        Some(d) => d.clone(),
        None => {
            let as_points: Vec<Point> = planar
                .points
                .iter()
                .map(|&(x, y)| Point { x, y, z: 0.0 })
                .collect();
            crate::curve::difference_derivatives(planar.grid.knots(), &as_points)?
                .into_iter()
                .map(|p| (p.x, p.y))
                .collect()
        }
    };
    let knots = planar.grid.knots();
    let rate: Vec<f64> = planar
        .points
        .iter()
        .zip(&derivatives)
        .map(|(&(x, y), &(dx, dy))| -2.0 * (x * dy - y * dx))
        .collect();
    let mut z = Vec::with_capacity(knots.len());
    z.push(z0);
    for i in 0..knots.len() - 1 {
        let dz = (knots[i + 1] - knots[i]) * 0.5 * (rate[i] + rate[i + 1]);
        z.push(z[i] + dz);
    }
    let points: Vec<Point> = planar
        .points
        .iter()
        .zip(&z)
        .map(|(&(x, y), &z)| Point { x, y, z })
        .collect();
    let velocities: Vec<Point> = derivatives
        .iter()
        .zip(&rate)
        .map(|(&(dx, dy), &r)| Point { x: dx, y: dy, z: r })
        .collect();
    SampledCurve::new(planar.grid.clone(), points, Some(velocities))
}

/// The closing circle lift joining the origin to its vertical translate:
/// a full planar circle of radius 1/(4 pi) through the origin, traversed
/// once, with the horizontal lift chosen so the height climbs monotonically.
/// Constant speed 1/2, so the horizontal length is exactly 1/2, strictly
/// larger than the Koranyi distance (1/(4 pi))^(1/2) of its endpoints.
pub fn example_geodesic(t: f64) -> Result<Point> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("parameter {t} outside [0, 1]")));
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    let angle = 2.0 * std::f64::consts::PI * t;
    Ok(Point {
        x: (1.0 - angle.cos()) / four_pi,
        y: angle.sin() / four_pi,
        z: (t - angle.sin() / (2.0 * std::f64::consts::PI)) / four_pi,
    })
}

/// Velocity of [`example_geodesic`]; horizontal with constant speed 1/2.
pub fn example_geodesic_velocity(t: f64) -> Result<Point> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("parameter {t} outside [0, 1]")));
    }
    let angle = 2.0 * std::f64::consts::PI * t;
    let four_pi = 4.0 * std::f64::consts::PI;
    Ok(Point {
        x: angle.sin() / 2.0,
        y: angle.cos() / 2.0,
        z: (1.0 - angle.cos()) / four_pi,
    })
}

/// The example geodesic sampled with velocities on a uniform grid.
pub fn sample_example_geodesic(intervals: usize) -> Result<SampledCurve> {
    let grid = crate::curve::Partition::uniform(0.0, 1.0, intervals)?;
    let points: Result<Vec<Point>> = grid.knots().iter().map(|&t| example_geodesic(t)).collect();
    let derivatives: Result<Vec<Point>> =
        grid.knots().iter().map(|&t| example_geodesic_velocity(t)).collect();
    SampledCurve::new(grid, points?, Some(derivatives?))
}

/// Koranyi difference quotient d(c(t), c(s)) / |t - s| of a curve
/// evaluator. Fails for `s == t`.
pub fn difference_quotient(
    curve: impl Fn(f64) -> Result<Point>,
    t: f64,
    s: f64,
) -> Result<f64> {
    if s == t {
        return Err(Error::invalid("difference quotient needs distinct parameters"));
    }
    Ok(koranyi_distance(curve(t)?, curve(s)?) / (t - s).abs())
}

/// Axis-aligned box used by the Euclidean comparison bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(min.x <= max.x && min.y <= max.y && min.z <= max.z) {
            return Err(Error::invalid("box corners must satisfy min <= max"));
        }
        Ok(BoundingBox { min, max })
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    /// Largest coordinate magnitude over the box.
    pub fn coordinate_bound(&self) -> f64 {
        self.min.max_abs_coordinate().max(self.max.max_abs_coordinate())
    }
}

/// Upper bound for the Koranyi distance of two points of a box in terms of
/// their coordinate differences and the box's coordinate bound:
///
/// ((dx^2 + dy^2)^2 + 2 dz^2 + 8 ((|dy| + |dx|) L)^2)^(1/4).
///
/// Fails when either point lies outside the box.
pub fn euclidean_comparison_bound(k: &BoundingBox, p: Point, q: Point) -> Result<f64> {
    if !k.contains(p) || !k.contains(q) {
        return Err(Error::domain("comparison bound needs both points inside the box"));
    }
    let l = k.coordinate_bound();
    let dx = (p.x - q.x).abs();
    let dy = (p.y - q.y).abs();
    let dz = (p.z - q.z).abs();
    let planar = dx * dx + dy * dy;
    let cross = (dy + dx) * l;
    Ok((planar * planar + 2.0 * dz * dz + 8.0 * cross * cross).sqrt().sqrt())
}

/// Euclidean radius beyond which every point is Koranyi-far from `q`:
/// |p - q| > Theta implies d(p, q) > Lambda. Closed form
/// sqrt(3) * max(Lambda, Lambda^2 + 2 Gamma Lambda) * (1 + 1e-6) with
/// Gamma = |q_x| + |q_y|.
pub fn escape_radius(q: Point, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "escape radius needs a positive finite bound, got {lambda}"
        )));
    }
    let gamma = q.x.abs() + q.y.abs();
    let theta = 3.0_f64.sqrt() * lambda.max(lambda * lambda + 2.0 * gamma * lambda);
    Ok(theta * (1.0 + 1e-6))
}
