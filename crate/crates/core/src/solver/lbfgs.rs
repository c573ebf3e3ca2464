//! A compact limited-memory BFGS minimizer with Armijo backtracking.
//!
//! The objective callback fills the gradient slice and returns the value.
//! The minimizer is fully deterministic and allocation-light; it falls back
//! to steepest descent whenever the quasi-Newton direction stops being a
//! descent direction.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct Options {
    pub max_iterations: usize,
    pub memory: usize,
    pub gradient_tolerance: f64,
    pub value_tolerance: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_iterations: 200,
            memory: 8,
            gradient_tolerance: 1e-10,
            value_tolerance: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn minimize<F>(mut objective: F, x0: Vec<f64>, options: &Options) -> Outcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut gradient = vec![0.0; n];
    let mut value = objective(&x, &mut gradient);

    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut direction = vec![0.0; n];
    let mut candidate = vec![0.0; n];
    let mut candidate_gradient = vec![0.0; n];
    let mut small_steps = 0usize;
    let mut iterations = 0usize;

    for _ in 0..options.max_iterations {
        let gnorm = norm(&gradient);
        if gnorm <= options.gradient_tolerance * (1.0 + value.abs()) {
            break;
        }

        // Two-loop recursion.
        direction.copy_from_slice(&gradient);
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let alpha = rho * dot(s, &direction);
            for (d, yi) in direction.iter_mut().zip(y) {
                *d -= alpha * yi;
            }
            alphas.push(alpha);
        }
        if let Some((s, y, _)) = history.back() {
            let yy = dot(y, y);
            if yy > 0.0 {
                let gamma = dot(s, y) / yy;
                for d in direction.iter_mut() {
                    *d *= gamma;
                }
            }
        }
        for ((s, y, rho), alpha) in history.iter().zip(alphas.into_iter().rev()) {
            let beta = rho * dot(y, &direction);
            for (d, si) in direction.iter_mut().zip(s) {
                *d += (alpha - beta) * si;
            }
        }
        for d in direction.iter_mut() {
            *d = -*d;
        }

        let mut slope = dot(&gradient, &direction);
        if !slope.is_finite() || slope >= -1e-14 * gnorm * norm(&direction) {
            // Not a descent direction; restart from steepest descent.
            history.clear();
            for (d, g) in direction.iter_mut().zip(&gradient) {
                *d = -g;
            }
            slope = -gnorm * gnorm;
        }

        // Armijo backtracking line search.
        let mut step = if history.is_empty() {
            1.0 / gnorm.max(1.0)
        } else {
            1.0
        };
        let mut accepted = false;
        let mut candidate_value = value;
        for _ in 0..60 {
            for ((c, xi), d) in candidate.iter_mut().zip(&x).zip(&direction) {
                *c = xi + step * d;
            }
            candidate_value = objective(&candidate, &mut candidate_gradient);
            if candidate_value.is_finite() && candidate_value <= value + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        iterations += 1;

        // Curvature update.
        let mut s = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            s[i] = candidate[i] - x[i];
            y[i] = candidate_gradient[i] - gradient[i];
        }
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if history.len() == options.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }

        let decrease = value - candidate_value;
        x.copy_from_slice(&candidate);
        gradient.copy_from_slice(&candidate_gradient);
        value = candidate_value;

        if decrease <= options.value_tolerance * (1.0 + value.abs()) {
            small_steps += 1;
            if small_steps >= 2 {
                break;
            }
        } else {
            small_steps = 0;
        }
    }

    Outcome {
        x,
        value,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_quadratic_bowl() {
        let outcome = minimize(
            |x, g| {
                g[0] = 2.0 * (x[0] - 3.0);
                g[1] = 8.0 * (x[1] + 1.0);
                (x[0] - 3.0).powi(2) + 4.0 * (x[1] + 1.0).powi(2)
            },
            vec![0.0, 0.0],
            &Options::default(),
        );
        assert!((outcome.x[0] - 3.0).abs() < 1e-7, "{:?}", outcome.x);
        assert!((outcome.x[1] + 1.0).abs() < 1e-7, "{:?}", outcome.x);
        assert!(outcome.value < 1e-12);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let outcome = minimize(
            |x, g| {
                let (a, b) = (x[0], x[1]);
                g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
                g[1] = 200.0 * (b - a * a);
                (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
            },
            vec![-1.2, 1.0],
            &Options {
                max_iterations: 500,
                ..Options::default()
            },
        );
        assert!((outcome.x[0] - 1.0).abs() < 1e-5, "{:?}", outcome);
        assert!((outcome.x[1] - 1.0).abs() < 1e-5, "{:?}", outcome);
    }

    #[test]
    fn stops_immediately_at_a_critical_point() {
        let outcome = minimize(
            |x, g| {
                g[0] = 2.0 * x[0];
                x[0] * x[0]
            },
            vec![0.0],
            &Options::default(),
        );
        assert_eq!(outcome.iterations, 0);
        assert_eq!(outcome.value, 0.0);
    }
}
