//! Piecewise-constant horizontal control curves and the feasible
//! segment-plus-loop initialization.
//!
//! A control curve stores the horizontal velocity on each step of a uniform
//! grid over [0, 1]. The planar path is then piecewise linear, and within a
//! step the lift rate -2 (x y' - y x') is constant, so the forward
//! recursion below integrates the horizontality equation exactly: control
//! curves are horizontal by construction.

use serde::{Deserialize, Serialize};

use crate::curve::{Partition, SampledCurve};
use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizontalControlCurve {
    pub start: Point,
    pub controls: Vec<[f64; 2]>,
}

impl HorizontalControlCurve {
    pub fn new(start: Point, controls: Vec<[f64; 2]>) -> Result<Self> {
        if controls.is_empty() {
            return Err(Error::invalid("a control curve needs at least one step"));
        }
        if controls.iter().any(|c| !(c[0].is_finite() && c[1].is_finite())) {
            return Err(Error::invalid("controls must be finite"));
        }
        Ok(HorizontalControlCurve { start, controls })
    }

    pub fn steps(&self) -> usize {
        self.controls.len()
    }

    /// States at the control knots from the exact step recursion.
    pub fn states(&self) -> Vec<Point> {
        let dt = 1.0 / self.controls.len() as f64;
        let mut out = Vec::with_capacity(self.controls.len() + 1);
        let mut p = self.start;
        out.push(p);
        for c in &self.controls {
            let next = Point {
                x: p.x + c[0] * dt,
                y: p.y + c[1] * dt,
                z: p.z - 2.0 * (p.x * c[1] - p.y * c[0]) * dt,
            };
            out.push(next);
            p = next;
        }
        out
    }

    pub fn endpoint(&self) -> Point {
        *self.states().last().unwrap()
    }

    /// Horizontal length: the sum of control speeds times the step width.
    pub fn cc_length(&self) -> f64 {
        let dt = 1.0 / self.controls.len() as f64;
        self.controls
            .iter()
            .map(|c| (c[0] * c[0] + c[1] * c[1]).sqrt() * dt)
            .sum()
    }

    /// Samples the curve at `intervals + 1` uniform parameters. All three
    /// coordinates are piecewise linear in time, so sampling is exact.
    pub fn sampled(&self, intervals: usize) -> Result<SampledCurve> {
        let states = self.states();
        let n = self.controls.len();
        let grid = Partition::uniform(0.0, 1.0, intervals)?;
        let points = grid
            .knots()
            .iter()
            .map(|&t| {
                let scaled = t * n as f64;
                let i = (scaled.floor() as usize).min(n - 1);
                let frac = scaled - i as f64;
                let (p, q) = (states[i], states[i + 1]);
                Point {
                    x: p.x + frac * (q.x - p.x),
                    y: p.y + frac * (q.y - p.y),
                    z: p.z + frac * (q.z - p.z),
                }
            })
            .collect();
        SampledCurve::new(grid, points, None)
    }

    /// Each control repeated `factor` times on the finer grid; the same
    /// path and the same length.
    pub fn upsampled(&self, factor: usize) -> Result<HorizontalControlCurve> {
        if factor == 0 {
            return Err(Error::invalid("upsampling factor must be at least 1"));
        }
        let mut controls = Vec::with_capacity(self.controls.len() * factor);
        for c in &self.controls {
            for _ in 0..factor {
                controls.push(*c);
            }
        }
        HorizontalControlCurve::new(self.start, controls)
    }
}

/// Height reached by lifting the straight planar segment from `p` to `q`;
/// the remaining vertical gap at `q` is what a closing loop must supply.
pub fn segment_lift_height(p: Point, q: Point) -> f64 {
    p.z + 2.0 * (p.y * q.x - p.x * q.y)
}

/// A horizontal control curve from `p` to `q`: a straight planar segment
/// lifted horizontally, followed by a closed regular polygon through the
/// target's planar position whose enclosed area supplies exactly the
/// remaining vertical gap. Both pieces reconstruct the target to rounding
/// accuracy under the exact step recursion.
pub fn initial_feasible_curve(p: Point, q: Point, steps: usize) -> Result<HorizontalControlCurve> {
    if steps == 0 {
        return Err(Error::invalid("need at least one step"));
    }
    let dt = 1.0 / steps as f64;
    let dx = q.x - p.x;
    let dy = q.y - p.y;
    let planar = (dx * dx + dy * dy).sqrt();
    let gap = q.z - segment_lift_height(p, q);

    if planar == 0.0 && gap == 0.0 {
        return HorizontalControlCurve::new(p, vec![[0.0, 0.0]; steps]);
    }
    if gap == 0.0 {
        let velocity = [dx, dy];
        return HorizontalControlCurve::new(p, vec![velocity; steps]);
    }

    let loop_length = (std::f64::consts::PI * gap.abs()).sqrt();
    let (segment_steps, loop_steps) = if planar == 0.0 {
        if steps < 3 {
            return Err(Error::invalid(format!(
                "{steps} steps cannot close a vertical gap; need at least 3"
            )));
        }
        (0, steps)
    } else {
        if steps < 4 {
            return Err(Error::invalid(format!(
                "{steps} steps cannot fit a segment and a closing loop; need at least 4"
            )));
        }
        let share = planar / (planar + loop_length);
        let seg = ((steps as f64 * share).round() as usize).clamp(1, steps - 3);
        (seg, steps - seg)
    };

    let mut controls = Vec::with_capacity(steps);
    if segment_steps > 0 {
        let duration = segment_steps as f64 * dt;
        let velocity = [dx / duration, dy / duration];
        controls.extend(std::iter::repeat_n(velocity, segment_steps));
    }

    // Regular polygon with `loop_steps` sides through (q.x, q.y), oriented
    // so the discrete shoelace area equals gap / 4: clockwise loops raise
    // the lift, counterclockwise loops lower it.
    let sides = loop_steps as f64;
    let central = 2.0 * std::f64::consts::PI / sides;
    let radius = (gap.abs() / (2.0 * sides * central.sin())).sqrt();
    let orientation = if gap > 0.0 { 1.0 } else { -1.0 };
    let vertex = |j: usize| -> (f64, f64) {
        if j == 0 || j == loop_steps {
            return (q.x, q.y);
        }
        let angle = central * j as f64;
        (
            q.x + radius * (1.0 - angle.cos()),
            q.y + orientation * radius * angle.sin(),
        )
    };
    for j in 0..loop_steps {
        let (ax, ay) = vertex(j);
        let (bx, by) = vertex(j + 1);
        controls.push([(bx - ax) / dt, (by - ay) / dt]);
    }

    HorizontalControlCurve::new(p, controls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{euclidean_distance, horizontality_residuals};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

    #[test]
    fn straight_target_needs_no_vertical_correction() {
        let q = Point { x: 1.0, y: 0.0, z: 0.0 };
        let c = initial_feasible_curve(Point::ORIGIN, q, 64).unwrap();
        assert!((c.cc_length() - 1.0).abs() < 1e-12);
        assert!(euclidean_distance(c.endpoint(), q) < 1e-12);
        for ctrl in &c.controls {
            assert_eq!(*ctrl, [1.0, 0.0]);
        }
    }

    #[test]
    fn vertical_target_is_a_pure_loop_of_length_near_half() {
        let q = Point { x: 0.0, y: 0.0, z: 1.0 / FOUR_PI };
        let c = initial_feasible_curve(Point::ORIGIN, q, 256).unwrap();
        assert!((c.cc_length() - 0.5).abs() < 1e-3, "length {}", c.cc_length());
        assert!(euclidean_distance(c.endpoint(), q) < 1e-12);
        let finer = initial_feasible_curve(Point::ORIGIN, q, 1024).unwrap();
        assert!((finer.cc_length() - 0.5).abs() < (c.cc_length() - 0.5).abs());
    }

    #[test]
    fn random_endpoints_reconstruct_to_rounding_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let draw = |rng: &mut ChaCha8Rng| Point {
                x: rng.gen_range(-2.0..2.0),
                y: rng.gen_range(-2.0..2.0),
                z: rng.gen_range(-2.0..2.0),
            };
            let p = draw(&mut rng);
            let q = draw(&mut rng);
            let c = initial_feasible_curve(p, q, 32).unwrap();
            worst = worst.max(euclidean_distance(c.endpoint(), q));
        }
        assert!(worst < 1e-9, "worst reconstruction error {worst}");
    }

    #[test]
    fn identical_endpoints_give_the_zero_curve() {
        let p = Point { x: 0.4, y: -0.1, z: 0.7 };
        let c = initial_feasible_curve(p, p, 8).unwrap();
        assert_eq!(c.cc_length(), 0.0);
        assert_eq!(c.endpoint(), p);
    }

    #[test]
    fn too_few_steps_for_a_loop_is_rejected() {
        let q = Point { x: 0.0, y: 0.0, z: 0.5 };
        assert!(initial_feasible_curve(Point::ORIGIN, q, 2).is_err());
        let mixed = Point { x: 1.0, y: 0.0, z: 0.5 };
        assert!(initial_feasible_curve(Point::ORIGIN, mixed, 3).is_err());
        assert!(initial_feasible_curve(Point::ORIGIN, mixed, 4).is_ok());
    }

    #[test]
    fn reconstruction_is_horizontal_under_difference_derivatives() {
        let q = Point { x: 0.7, y: -0.3, z: 0.2 };
        let c = initial_feasible_curve(Point::ORIGIN, q, 64).unwrap();
        let sampled = c.sampled(64).unwrap().with_difference_derivatives().unwrap();
        let report = horizontality_residuals(&sampled).unwrap();
        // Central differences at interior knots are exactly consistent with
        // the step recursion; the one-sided end stencils straddle a control
        // kink and are only O(1/steps), so check the interior.
        let interior = &report.residuals[1..report.residuals.len() - 1];
        let worst = interior.iter().cloned().fold(0.0, f64::max);
        assert!(worst < 1e-12, "interior residual {worst}");
    }

    #[test]
    fn sampling_and_upsampling_preserve_the_path() {
        let q = Point { x: 0.5, y: 0.5, z: 0.3 };
        let c = initial_feasible_curve(Point::ORIGIN, q, 16).unwrap();
        let fine = c.upsampled(4).unwrap();
        assert_eq!(fine.steps(), 64);
        assert!((fine.cc_length() - c.cc_length()).abs() < 1e-14);
        assert!(euclidean_distance(fine.endpoint(), c.endpoint()) < 1e-13);
        let states = c.states();
        let sampled = c.sampled(16).unwrap();
        for (a, b) in states.iter().zip(&sampled.points) {
            assert!(euclidean_distance(*a, *b) < 1e-15);
        }
    }
}
