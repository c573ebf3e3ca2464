//! Analytic horizontal curves built from planar trigonometric polynomials.
//!
//! The planar part is a degree-bounded trigonometric polynomial, so the
//! lift rate -2 (x y' - y x') is itself band-limited and integrates in
//! closed form once its Fourier coefficients are projected out. That gives
//! smooth curves that satisfy the horizontality equation exactly, with
//! exactly known horizontal speed: the reference family for verification.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::{Partition, SampledCurve};
use crate::error::Result;
use crate::point::Point;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Planar trigonometric polynomial
/// `x(t) = sum_k axc_k cos(2 pi k t) + axs_k sin(2 pi k t)`, same for y.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPlanarCurve {
    pub x_cos: Vec<f64>,
    pub x_sin: Vec<f64>,
    pub y_cos: Vec<f64>,
    pub y_sin: Vec<f64>,
}

impl TrigPlanarCurve {
    pub fn degree(&self) -> usize {
        self.x_cos.len() - 1
    }

    pub fn position(&self, t: f64) -> (f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        for k in 0..self.x_cos.len() {
            let (s, c) = (TAU * k as f64 * t).sin_cos();
            x += self.x_cos[k] * c + self.x_sin[k] * s;
            y += self.y_cos[k] * c + self.y_sin[k] * s;
        }
        (x, y)
    }

    pub fn velocity(&self, t: f64) -> (f64, f64) {
        let mut dx = 0.0;
        let mut dy = 0.0;
        for k in 1..self.x_cos.len() {
            let w = TAU * k as f64;
            let (s, c) = (w * t).sin_cos();
            dx += w * (-self.x_cos[k] * s + self.x_sin[k] * c);
            dy += w * (-self.y_cos[k] * s + self.y_sin[k] * c);
        }
        (dx, dy)
    }

    pub fn speed(&self, t: f64) -> f64 {
        let (dx, dy) = self.velocity(t);
        (dx * dx + dy * dy).sqrt()
    }
}

/// A planar trigonometric polynomial together with the closed form of its
/// horizontal lift.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalTrigCurve {
    pub planar: TrigPlanarCurve,
    pub z0: f64,
    rate_mean: f64,
    rate_cos: Vec<f64>,
    rate_sin: Vec<f64>,
}

impl HorizontalTrigCurve {
    /// Lifts the planar curve starting at height `z0`. The lift rate is
    /// band-limited of twice the planar degree; its Fourier coefficients
    /// are recovered exactly by discrete projection.
    pub fn lift(planar: TrigPlanarCurve, z0: f64) -> Self {
        let band = 2 * planar.degree();
        let samples = (4 * band.max(1)).max(64);
        let w: Vec<f64> = (0..samples)
            .map(|j| {
                let t = j as f64 / samples as f64;
                let (x, y) = planar.position(t);
                let (dx, dy) = planar.velocity(t);
                x * dy - y * dx
            })
            .collect();
        let rate_mean = w.iter().sum::<f64>() / samples as f64;
        let mut rate_cos = Vec::with_capacity(band);
        let mut rate_sin = Vec::with_capacity(band);
        for m in 1..=band {
            let mut c = 0.0;
            let mut s = 0.0;
            for (j, &wj) in w.iter().enumerate() {
                let phase = TAU * m as f64 * j as f64 / samples as f64;
                c += wj * phase.cos();
                s += wj * phase.sin();
            }
            rate_cos.push(2.0 * c / samples as f64);
            rate_sin.push(2.0 * s / samples as f64);
        }
        HorizontalTrigCurve { planar, z0, rate_mean, rate_cos, rate_sin }
    }

    /// Height from the closed-form antiderivative of the lift rate.
    pub fn height(&self, t: f64) -> f64 {
        let mut integral = self.rate_mean * t;
        for m in 1..=self.rate_cos.len() {
            let w = TAU * m as f64;
            let (s, c) = (w * t).sin_cos();
            integral += self.rate_cos[m - 1] * s / w + self.rate_sin[m - 1] * (1.0 - c) / w;
        }
        self.z0 - 2.0 * integral
    }

    pub fn point(&self, t: f64) -> Point {
        let (x, y) = self.planar.position(t);
        Point { x, y, z: self.height(t) }
    }

    /// Velocity with the vertical component from the horizontality
    /// equation.
    pub fn velocity(&self, t: f64) -> Point {
        let (x, y) = self.planar.position(t);
        let (dx, dy) = self.planar.velocity(t);
        Point { x: dx, y: dy, z: -2.0 * (x * dy - y * dx) }
    }

    /// Horizontal length over `[0, 1]` by composite Simpson quadrature,
    /// accurate far beyond the verification tolerances.
    pub fn cc_length(&self) -> f64 {
        composite_simpson(|t| self.planar.speed(t), 0.0, 1.0, 1 << 14)
    }

    pub fn sample(&self, intervals: usize) -> Result<SampledCurve> {
        let grid = Partition::uniform(0.0, 1.0, intervals)?;
        let points = grid.knots().iter().map(|&t| self.point(t)).collect();
        let derivatives = grid.knots().iter().map(|&t| self.velocity(t)).collect();
        SampledCurve::new(grid, points, Some(derivatives))
    }
}

/// Composite Simpson rule with `panels` even subintervals.
pub fn composite_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = if panels.is_multiple_of(2) { panels } else { panels + 1 };
    let h = (b - a) / n as f64;
    let mut total = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        total += w * f(a + h * i as f64);
    }
    total * h / 3.0
}

/// Draws one well-conditioned planar trigonometric polynomial: a dominant
/// first harmonic plus k^-2-damped perturbations, redrawn until the speed
/// never drops below a quarter of its maximum.
pub fn random_conditioned_planar(rng: &mut ChaCha8Rng, degree: usize) -> TrigPlanarCurve {
    loop {
        let radius = rng.gen_range(0.5..1.5);
        let phase = rng.gen_range(0.0..TAU);
        let mut curve = TrigPlanarCurve {
            x_cos: vec![0.0; degree + 1],
            x_sin: vec![0.0; degree + 1],
            y_cos: vec![0.0; degree + 1],
            y_sin: vec![0.0; degree + 1],
        };
        curve.x_cos[0] = rng.gen_range(-0.5..0.5);
        curve.y_cos[0] = rng.gen_range(-0.5..0.5);
        curve.x_cos[1] = radius * phase.cos();
        curve.x_sin[1] = radius * phase.sin();
        curve.y_cos[1] = -radius * phase.sin();
        curve.y_sin[1] = radius * phase.cos();
        let budget = 0.35 * radius;
        for k in 2..=degree {
            let scale = budget / (k * k * degree.saturating_sub(1).max(1)) as f64;
            curve.x_cos[k] = rng.gen_range(-1.0..1.0) * scale;
            curve.x_sin[k] = rng.gen_range(-1.0..1.0) * scale;
            curve.y_cos[k] = rng.gen_range(-1.0..1.0) * scale;
            curve.y_sin[k] = rng.gen_range(-1.0..1.0) * scale;
        }
        let speeds: Vec<f64> = (0..=512)
            .map(|j| curve.speed(j as f64 / 512.0))
            .collect();
        let min = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = speeds.iter().cloned().fold(0.0, f64::max);
        if min >= 0.25 * max {
            return curve;
        }
    }
}

/// The seeded family of lifted trigonometric curves used by the
/// verification suite.
pub fn verification_family(seed: u64, count: usize, degree: usize) -> Vec<HorizontalTrigCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| HorizontalTrigCurve::lift(random_conditioned_planar(&mut rng, degree), 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::pointwise_horizontality_residual;

    #[test]
    fn lift_height_satisfies_the_horizontality_equation() {
        let family = verification_family(11, 3, 4);
        for curve in &family {
            for t in [0.13, 0.5, 0.88] {
                let h = 1e-5;
                let numeric = (curve.height(t + h) - curve.height(t - h)) / (2.0 * h);
                let (x, y) = curve.planar.position(t);
                let (dx, dy) = curve.planar.velocity(t);
                let exact = -2.0 * (x * dy - y * dx);
                assert!((numeric - exact).abs() < 1e-6 * (1.0 + exact.abs()));
                let residual =
                    pointwise_horizontality_residual(curve.point(t), curve.velocity(t));
                assert!(residual < 1e-15);
            }
        }
    }

    #[test]
    fn trig_curves_are_closed_in_the_plane() {
        let family = verification_family(5, 3, 4);
        for curve in &family {
            let (x0, y0) = curve.planar.position(0.0);
            let (x1, y1) = curve.planar.position(1.0);
            assert!((x0 - x1).abs() < 1e-12 && (y0 - y1).abs() < 1e-12);
        }
    }

    #[test]
    fn polygonal_length_approaches_horizontal_length() {
        let curve = &verification_family(7, 1, 4)[0];
        let exact = curve.cc_length();
        let poly = |n: usize| {
            let s = curve.sample(n).unwrap();
            crate::length::length_profile(&s, crate::heisenberg::koranyi_distance).total()
        };
        let coarse = (exact - poly(512)).abs() / exact;
        let fine = (exact - poly(2048)).abs() / exact;
        assert!(fine < coarse);
        assert!(fine < 1e-5, "relative error {fine}");
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = composite_simpson(|t| (3.0 * t).sin(), 0.0, 1.0, 256);
        let exact = (1.0 - 3.0_f64.cos()) / 3.0;
        // Truncation is O(h^4): about 1e-10 with 256 panels.
        assert!((v - exact).abs() < 1e-9, "error {:.2e}", (v - exact).abs());
        let finer = composite_simpson(|t| (3.0 * t).sin(), 0.0, 1.0, 1024);
        assert!((finer - exact).abs() < (v - exact).abs());
    }

    #[test]
    fn family_is_deterministic_for_a_seed() {
        let a = verification_family(42, 4, 4);
        let b = verification_family(42, 4, 4);
        assert_eq!(a.len(), b.len());
        for (c1, c2) in a.iter().zip(&b) {
            assert_eq!(c1.planar, c2.planar);
        }
    }
}
