//! Integration tests for the geodesic solver: benchmark targets,
//! determinism, invariance under the group symmetries, and the direct
//! polyline optimizer.

use heisgeo::heisenberg::koranyi_distance;
use heisgeo::solver::{
    endpoint_miss, initial_feasible_curve, refine_and_compare, solve_cc_geodesic,
    solve_koranyi_polyline, PolylineConfig, SolveConfig,
};
use heisgeo::{Point, DEFAULT_SEED};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

fn config() -> SolveConfig {
    SolveConfig::with_seed(DEFAULT_SEED)
}

#[test]
fn straight_target_length_is_in_the_benchmark_band() {
    let q = Point { x: 1.0, y: 0.0, z: 0.0 };
    let report = solve_cc_geodesic(Point::ORIGIN, q, 64, &config()).unwrap();
    assert!(report.converged);
    assert!(
        (0.999..=1.001).contains(&report.length),
        "length {}",
        report.length
    );
}

#[test]
fn vertical_target_length_is_in_the_benchmark_band() {
    let q = Point { x: 0.0, y: 0.0, z: 1.0 / FOUR_PI };
    let report = solve_cc_geodesic(Point::ORIGIN, q, 256, &config()).unwrap();
    assert!(report.converged);
    assert!(
        (0.495..=0.505).contains(&report.length),
        "length {}",
        report.length
    );
    // Strictly longer than the direct distance: the witness that the
    // metric space is not a length space.
    assert!(report.length > koranyi_distance(Point::ORIGIN, q) + 0.1);
}

#[test]
fn reflected_vertical_target_matches_by_symmetry() {
    // z -> -z composed with a planar reflection is an isometry, so the
    // geodesic to the mirrored vertical target has the same length.
    let q = Point { x: 0.0, y: 0.0, z: -1.0 / FOUR_PI };
    let report = solve_cc_geodesic(Point::ORIGIN, q, 256, &config()).unwrap();
    assert!(report.converged);
    assert!(
        (report.length - 0.5).abs() <= 5e-3,
        "length {}",
        report.length
    );
}

#[test]
fn reported_numbers_match_the_reported_curve() {
    let q = Point { x: 0.4, y: -0.3, z: 0.25 };
    let report = solve_cc_geodesic(Point::ORIGIN, q, 48, &config()).unwrap();
    assert!((report.length - report.curve.cc_length()).abs() <= 1e-12 * (1.0 + report.length));
    assert!((report.endpoint_miss - endpoint_miss(&report.curve, q)).abs() <= 1e-15);
    assert!(report.endpoint_miss <= report.config.miss_tolerance);
    assert_eq!(report.target, q);
    assert_eq!(report.curve.start, Point::ORIGIN);
}

#[test]
fn same_seed_reproduces_the_solution_bit_for_bit() {
    let q = Point { x: 0.3, y: 0.5, z: -0.2 };
    let a = solve_cc_geodesic(Point::ORIGIN, q, 40, &config()).unwrap();
    let b = solve_cc_geodesic(Point::ORIGIN, q, 40, &config()).unwrap();
    assert_eq!(a.length.to_bits(), b.length.to_bits());
    assert_eq!(a.curve.controls, b.curve.controls);
    assert_eq!(a.trace.len(), b.trace.len());

    let c = solve_cc_geodesic(Point::ORIGIN, q, 40, &SolveConfig::with_seed(99)).unwrap();
    assert!(c.converged);
    assert!((c.length - a.length).abs() <= 1e-3 * (1.0 + a.length));
}

#[test]
fn solution_length_is_left_invariant() {
    let p = Point { x: 0.2, y: -0.4, z: 0.1 };
    let q = Point { x: 0.7, y: 0.3, z: 0.4 };
    let g = Point { x: -1.0, y: 2.0, z: 0.5 };
    let plain = solve_cc_geodesic(p, q, 48, &config()).unwrap();
    let moved = solve_cc_geodesic(g.group_mul(p), g.group_mul(q), 48, &config()).unwrap();
    assert!(plain.converged && moved.converged);
    // The solver works in a translation-normalized frame, so the two
    // problems differ only in the last few ulps of the normalized target;
    // agreement is limited by the solver's own length accuracy rather
    // than by the frame.
    assert!(
        (plain.length - moved.length).abs() <= 2e-3 * (1.0 + plain.length),
        "lengths {} vs {}",
        plain.length,
        moved.length
    );
}

#[test]
fn solution_length_is_one_homogeneous_under_dilation() {
    let q = Point { x: 0.5, y: 0.1, z: 0.2 };
    let lambda = 1.7;
    let plain = solve_cc_geodesic(Point::ORIGIN, q, 48, &config()).unwrap();
    let dilated =
        solve_cc_geodesic(Point::ORIGIN, q.dilate(lambda).unwrap(), 48, &config()).unwrap();
    assert!(
        (dilated.length - lambda * plain.length).abs() <= 1e-3 * lambda * plain.length,
        "lengths {} vs {}",
        dilated.length,
        lambda * plain.length
    );
}

#[test]
fn trace_is_nonincreasing_across_refinement() {
    let q = Point { x: 0.0, y: 0.0, z: 1.0 / FOUR_PI };
    let coarse = solve_cc_geodesic(Point::ORIGIN, q, 64, &config()).unwrap();
    let comparison = refine_and_compare(&coarse, 4).unwrap();
    assert_eq!(comparison.refined_steps, 256);
    assert!(comparison.nonincreasing);
    let mut lengths: Vec<f64> = coarse.trace.iter().map(|e| e.length).collect();
    lengths.extend(comparison.refined.trace.iter().map(|e| e.length));
    for pair in lengths.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "trace increased: {pair:?}");
    }
}

#[test]
fn solver_beats_or_matches_its_initialization() {
    for (target, steps) in [
        (Point { x: 1.0, y: 0.2, z: 0.0 }, 32),
        (Point { x: 0.0, y: 0.0, z: 0.4 }, 64),
        (Point { x: -0.5, y: 0.3, z: -0.2 }, 64),
    ] {
        let initial = initial_feasible_curve(Point::ORIGIN, target, steps).unwrap();
        let report = solve_cc_geodesic(Point::ORIGIN, target, steps, &config()).unwrap();
        assert!(report.converged);
        assert!(
            report.length <= initial.cc_length() + 1e-12,
            "solver returned {} against initialization {}",
            report.length,
            initial.cc_length()
        );
    }
}

#[test]
fn solve_report_round_trips_through_json() {
    let q = Point { x: 0.3, y: 0.1, z: 0.05 };
    let report = solve_cc_geodesic(Point::ORIGIN, q, 16, &config()).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: heisgeo::solver::SolveReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report, back);
    for key in ["length", "endpoint_miss", "trace", "converged", "curve", "controls"] {
        assert!(text.contains(key), "serialized report misses key {key}");
    }
}

#[test]
fn polyline_two_vertices_is_the_distance_and_more_vertices_never_hurt() {
    let p = Point { x: 0.1, y: 0.0, z: 0.0 };
    let q = Point { x: 0.9, y: 0.4, z: 0.1 };
    let two = solve_koranyi_polyline(p, q, 2, &PolylineConfig::default()).unwrap();
    assert_eq!(two.length, koranyi_distance(p, q));

    let quick = PolylineConfig {
        restarts: 2,
        max_sweeps: 300,
        min_step: 1e-7,
        ..PolylineConfig::default()
    };
    let eight = solve_koranyi_polyline(p, q, 8, &quick).unwrap();
    assert_eq!(eight.vertices[0], p);
    assert_eq!(*eight.vertices.last().unwrap(), q);
    assert!(eight.length >= koranyi_distance(p, q) - 1e-12);
}

#[test]
fn polyline_vertical_benchmark() {
    let q = Point { x: 0.0, y: 0.0, z: 1.0 / FOUR_PI };
    let report = solve_koranyi_polyline(Point::ORIGIN, q, 64, &PolylineConfig::default()).unwrap();
    assert!(
        (report.length - 0.5).abs() <= 1e-2,
        "polyline length {}",
        report.length
    );
    assert!(report.length > koranyi_distance(Point::ORIGIN, q) + 0.1);
}

#[test]
fn polyline_is_deterministic_for_a_seed() {
    let q = Point { x: 0.2, y: 0.3, z: 0.1 };
    let quick = PolylineConfig {
        restarts: 2,
        max_sweeps: 200,
        min_step: 1e-6,
        ..PolylineConfig::default()
    };
    let a = solve_koranyi_polyline(Point::ORIGIN, q, 10, &quick).unwrap();
    let b = solve_koranyi_polyline(Point::ORIGIN, q, 10, &quick).unwrap();
    assert_eq!(a.length.to_bits(), b.length.to_bits());
    assert_eq!(a.vertices, b.vertices);
}
