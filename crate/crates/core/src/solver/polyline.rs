//! Shortest polyline in the Koranyi metric with fixed endpoints.
//!
//! The objective sum_i d(v_i, v_{i+1}) is piecewise smooth but its
//! minimizers ride the non-smooth vertical directions, so instead of a
//! gradient method this uses pattern search: coordinate moves on the
//! interior vertices with a step that halves whenever a full sweep makes
//! no progress. Moving one vertex only changes its two adjacent terms, so
//! sweeps are cheap. Restart 0 starts from a horizontal segment-plus-loop
//! chain (pure coordinate moves cannot escape a straight vertical chain on
//! their own); later restarts perturb it.

use serde::{Deserialize, Serialize};

use super::control::initial_feasible_curve;
use crate::error::{Error, Result};
use crate::heisenberg::koranyi_distance;
use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylineConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Pattern search stops once the step drops below this size.
    pub min_step: f64,
    pub seed: u64,
}

impl Default for PolylineConfig {
    fn default() -> Self {
        PolylineConfig {
            restarts: 4,
            max_sweeps: 600,
            min_step: 1e-9,
            seed: crate::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylineReport {
    pub vertices: Vec<Point>,
    /// Sum of consecutive Koranyi distances, recomputed from the vertices.
    pub length: f64,
    pub sweeps: usize,
    pub converged: bool,
}

pub fn polyline_length(vertices: &[Point]) -> f64 {
    vertices
        .windows(2)
        .map(|w| koranyi_distance(w[0], w[1]))
        .sum()
}

fn initial_chain(p: Point, q: Point, vertices: usize) -> Result<Vec<Point>> {
    let intervals = vertices - 1;
    let steps = intervals.max(16);
    let curve = initial_feasible_curve(p, q, steps)?;
    let sampled = curve.sampled(intervals)?;
    let mut chain = sampled.points;
    chain[0] = p;
    let last = chain.len() - 1;
    chain[last] = q;
    Ok(chain)
}

fn descend(chain: &mut [Point], config: &PolylineConfig) -> (usize, bool) {
    let interior = chain.len() - 2;
    if interior == 0 {
        return (0, true);
    }
    let scale = polyline_length(chain).max(1e-6) / chain.len() as f64;
    let mut step = 0.5 * scale;
    let mut sweeps = 0;
    while sweeps < config.max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for i in 1..chain.len() - 1 {
            let (prev, next) = (chain[i - 1], chain[i + 1]);
            let local = |v: Point| koranyi_distance(prev, v) + koranyi_distance(v, next);
            let mut best = chain[i];
            let mut best_value = local(best);
            for axis in 0..3 {
                for sign in [1.0, -1.0] {
                    let mut candidate = chain[i];
                    match axis {
                        0 => candidate.x += sign * step,
                        1 => candidate.y += sign * step,
                        _ => candidate.z += sign * step,
                    }
                    let value = local(candidate);
                    if value < best_value {
                        best_value = value;
                        best = candidate;
                    }
                }
            }
            if best != chain[i] {
                chain[i] = best;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
            if step < config.min_step {
                return (sweeps, true);
            }
        }
    }
    (sweeps, step < config.min_step)
}

/// Approximates the shortest `vertices`-point polyline from `p` to `q` in
/// the Koranyi metric (endpoints pinned, interior vertices free).
pub fn solve_koranyi_polyline(
    p: Point,
    q: Point,
    vertices: usize,
    config: &PolylineConfig,
) -> Result<PolylineReport> {
    use rand::Rng;
    use rand::SeedableRng;

    if vertices < 2 {
        return Err(Error::invalid("a polyline needs at least two vertices"));
    }
    if config.restarts == 0 {
        return Err(Error::invalid("need at least one restart"));
    }
    if vertices == 2 {
        return Ok(PolylineReport {
            vertices: vec![p, q],
            length: koranyi_distance(p, q),
            sweeps: 0,
            converged: true,
        });
    }

    let base = initial_chain(p, q, vertices)?;
    let mean_gap = base
        .windows(2)
        .map(|w| crate::heisenberg::euclidean_distance(w[0], w[1]))
        .sum::<f64>()
        / (vertices - 1) as f64;
    let amplitude = 0.5 * mean_gap.max(1e-6);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);

    let mut best: Option<PolylineReport> = None;
    let mut total_sweeps = 0;
    for restart in 0..config.restarts {
        let mut chain = base.clone();
        if restart > 0 {
            for vertex in chain.iter_mut().skip(1).take(vertices - 2) {
                vertex.x += rng.gen_range(-amplitude..=amplitude);
                vertex.y += rng.gen_range(-amplitude..=amplitude);
                vertex.z += rng.gen_range(-amplitude..=amplitude);
            }
        }
        let (sweeps, converged) = descend(&mut chain, config);
        total_sweeps += sweeps;
        let length = polyline_length(&chain);
        let replace = match &best {
            None => true,
            Some(current) => {
                (length, !converged) < (current.length, !current.converged)
            }
        };
        if replace {
            best = Some(PolylineReport {
                vertices: chain,
                length,
                sweeps: total_sweeps,
                converged,
            });
        }
    }

    let mut report = best.expect("at least one restart ran");
    report.sweeps = total_sweeps;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

    fn quick_config() -> PolylineConfig {
        PolylineConfig {
            restarts: 2,
            max_sweeps: 400,
            min_step: 1e-7,
            ..PolylineConfig::default()
        }
    }

    #[test]
    fn two_vertices_reproduce_the_distance() {
        let p = Point { x: 0.1, y: 0.2, z: 0.3 };
        let q = Point { x: -0.4, y: 0.5, z: 0.0 };
        let report = solve_koranyi_polyline(p, q, 2, &PolylineConfig::default()).unwrap();
        assert_eq!(report.length, koranyi_distance(p, q));
        assert_eq!(report.vertices, vec![p, q]);
    }

    #[test]
    fn endpoints_stay_pinned_and_length_is_consistent() {
        let p = Point::ORIGIN;
        let q = Point { x: 0.6, y: -0.2, z: 0.15 };
        let report = solve_koranyi_polyline(p, q, 12, &quick_config()).unwrap();
        assert_eq!(report.vertices[0], p);
        assert_eq!(*report.vertices.last().unwrap(), q);
        assert!((report.length - polyline_length(&report.vertices)).abs() < 1e-15);
        assert!(report.length >= koranyi_distance(p, q) - 1e-12);
    }

    #[test]
    fn straight_horizontal_target_matches_the_distance() {
        let q = Point { x: 1.0, y: 0.0, z: 0.0 };
        let report = solve_koranyi_polyline(Point::ORIGIN, q, 8, &quick_config()).unwrap();
        // The Koranyi distance along a horizontal line is additive, so the
        // optimal 8-vertex polyline achieves d(p, q) = 1 exactly.
        assert!((report.length - 1.0).abs() < 1e-4, "length {}", report.length);
    }

    #[test]
    fn vertical_target_length_lands_near_the_geodesic_value() {
        let q = Point { x: 0.0, y: 0.0, z: 1.0 / FOUR_PI };
        let report = solve_koranyi_polyline(Point::ORIGIN, q, 64, &quick_config()).unwrap();
        let direct = koranyi_distance(Point::ORIGIN, q);
        assert!(
            report.length > direct + 0.1,
            "polyline length {} should exceed the one-hop distance {direct}",
            report.length
        );
        assert!((report.length - 0.5).abs() <= 1e-2, "length {}", report.length);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let q = Point { x: 1.0, y: 0.0, z: 0.0 };
        assert!(solve_koranyi_polyline(Point::ORIGIN, q, 1, &PolylineConfig::default()).is_err());
        let bad = PolylineConfig {
            restarts: 0,
            ..PolylineConfig::default()
        };
        assert!(solve_koranyi_polyline(Point::ORIGIN, q, 8, &bad).is_err());
    }
}
