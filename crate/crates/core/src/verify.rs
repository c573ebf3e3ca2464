//! The numerical verification suite.
//!
//! Nine seeded, deterministic checks covering the metric structure, the
//! length theory and the geodesic solver. Every tolerance is pinned here
//! as a constant next to the check that uses it. `run_all` returns one
//! [`CheckResult`] per check; the CLI renders them as a table and maps
//! "any failure" to a dedicated exit code.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::Partition;
use crate::heisenberg::{
    cc_length, difference_quotient, escape_radius, euclidean_comparison_bound,
    euclidean_distance, example_geodesic, koranyi_distance, sample_example_geodesic,
    BoundingBox,
};
use crate::length::{arclength_reparametrize, curve_length, polygonal_length};
use crate::point::Point;
use crate::solver::{
    gradient_check, refine_and_compare, solve_cc_geodesic, SolveConfig,
};
use crate::trig::verification_family;
use crate::Result;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub index: usize,
    pub name: &'static str,
    pub expected: String,
    pub got: String,
    pub tolerance: String,
    pub passed: bool,
    pub seconds: f64,
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// Fixed-width table of the results (name, expected, got, tolerance, pass).
pub fn format_table(results: &[CheckResult]) -> String {
    let headers = ["#", "check", "expected", "got", "tolerance", "pass", "secs"];
    let rows: Vec<[String; 7]> = results
        .iter()
        .map(|r| {
            [
                r.index.to_string(),
                r.name.to_string(),
                r.expected.clone(),
                r.got.clone(),
                r.tolerance.clone(),
                if r.passed { "ok".into() } else { "FAIL".into() },
                format!("{:.2}", r.seconds),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = String::new();
    for (w, h) in widths.iter().zip(headers) {
        line.push_str(&format!("{h:<w$}  "));
    }
    out.push_str(line.trim_end());
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in &rows {
        let mut line = String::new();
        for (w, cell) in widths.iter().zip(row) {
            line.push_str(&format!("{cell:<w$}  "));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn stream(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn timed(
    index: usize,
    name: &'static str,
    run: impl FnOnce() -> Result<(String, String, String, bool)>,
) -> CheckResult {
    let clock = Instant::now();
    let outcome = run();
    let seconds = clock.elapsed().as_secs_f64();
    match outcome {
        Ok((expected, got, tolerance, passed)) => CheckResult {
            index,
            name,
            expected,
            got,
            tolerance,
            passed,
            seconds,
        },
        Err(e) => CheckResult {
            index,
            name,
            expected: "check to run without errors".into(),
            got: format!("error: {e}"),
            tolerance: "-".into(),
            passed: false,
            seconds,
        },
    }
}

/// 1. The space is not a length space: the shortest-curve length between
///    the model endpoints strictly exceeds their distance.
fn check_length_gap() -> Result<(String, String, String, bool)> {
    const LENGTH_TOL: f64 = 1e-3;
    const CC_TOL: f64 = 1e-9;
    const DIST_TOL: f64 = 1e-9;

    let report = curve_length(example_geodesic, 0.0, 1.0, koranyi_distance, 1e-5, 16)?;
    let cc = cc_length(&sample_example_geodesic(4096)?)?;
    let d = koranyi_distance(example_geodesic(0.0)?, example_geodesic(1.0)?);
    let d_exact = (1.0 / FOUR_PI).sqrt();

    let passed = report.converged
        && (report.value - 0.5).abs() <= LENGTH_TOL
        && (cc - 0.5).abs() <= CC_TOL
        && (d - d_exact).abs() <= DIST_TOL
        && report.value > d;
    Ok((
        format!("L=0.5, Lcc=0.5, d={d_exact:.10}, L>d"),
        format!(
            "L={:.6} ({}), Lcc={:.10}, d={:.10}, L>d={}",
            report.value,
            if report.converged { "converged" } else { "not converged" },
            cc,
            d,
            report.value > d
        ),
        format!("{LENGTH_TOL:.0e}/{CC_TOL:.0e}/{DIST_TOL:.0e}"),
        passed,
    ))
}

/// 2. Metric length equals horizontal length on smooth horizontal curves,
///    with the partition-sum error shrinking as samples double.
fn check_length_equality(seed: u64) -> Result<(String, String, String, bool)> {
    const REL_TOL: f64 = 1e-3;
    const DOUBLING_SLACK: f64 = 1.1;
    const SAMPLES: [usize; 4] = [512, 1024, 2048, 4096];

    let mut worst_final: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut passed = true;
    for curve in verification_family(seed, 20, 4) {
        let exact = curve.cc_length();
        let mut previous = f64::NAN;
        for (i, &samples) in SAMPLES.iter().enumerate() {
            let sampled = curve.sample(samples)?;
            let poly = polygonal_length(&sampled, koranyi_distance, &sampled.grid)?;
            let err = (poly - exact).abs() / exact;
            if i + 1 == SAMPLES.len() {
                worst_final = worst_final.max(err);
                passed &= err < REL_TOL;
            }
            if i > 0 {
                let ratio = err / previous;
                worst_ratio = worst_ratio.max(ratio);
                passed &= ratio <= DOUBLING_SLACK;
            }
            previous = err;
        }
    }
    Ok((
        "rel err < 1e-3 at 4096; errors shrink when doubling".into(),
        format!("worst rel err {worst_final:.2e}, worst doubling ratio {worst_ratio:.3}"),
        format!("{REL_TOL:.0e}, ratio <= {DOUBLING_SLACK}"),
        passed,
    ))
}

/// 3. Metric axioms plus left-invariance and dilation homogeneity on 10^5
///    seeded triples.
fn check_metric_axioms(seed: u64) -> Result<(String, String, String, bool)> {
    const TRIPLES: usize = 100_000;
    const TRIANGLE_SLACK: f64 = 1e-9;
    const REL_TOL: f64 = 1e-9;
    const ABS_GUARD: f64 = 1e-12;

    let mut rng = stream(seed, 3);
    let draw = |rng: &mut ChaCha8Rng| Point {
        x: rng.gen_range(-10.0..10.0),
        y: rng.gen_range(-10.0..10.0),
        z: rng.gen_range(-10.0..10.0),
    };
    let mut violations = 0usize;
    for _ in 0..TRIPLES {
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        let r = draw(&mut rng);
        let lambda = rng.gen_range(0.1..10.0);

        let dpq = koranyi_distance(p, q);
        let ok_symmetry = dpq.to_bits() == koranyi_distance(q, p).to_bits();
        let ok_identity = koranyi_distance(p, p) == 0.0 && dpq > 0.0;
        let ok_triangle =
            koranyi_distance(p, r) <= dpq + koranyi_distance(q, r) + TRIANGLE_SLACK;
        let translated = koranyi_distance(r.group_mul(p), r.group_mul(q));
        let ok_invariance = (translated - dpq).abs() <= REL_TOL * dpq + ABS_GUARD;
        let dilated = koranyi_distance(p.dilate(lambda)?, q.dilate(lambda)?);
        let ok_dilation = (dilated - lambda * dpq).abs() <= REL_TOL * lambda * dpq + ABS_GUARD;

        if !(ok_symmetry && ok_identity && ok_triangle && ok_invariance && ok_dilation) {
            violations += 1;
        }
    }
    Ok((
        format!("0 violations in {TRIPLES} triples"),
        format!("{violations} violations"),
        format!("triangle +{TRIANGLE_SLACK:.0e}; invariances {REL_TOL:.0e} rel"),
        violations == 0,
    ))
}

/// 4. Beyond the escape radius, the distance exceeds the prescribed level.
fn check_escape_radius(seed: u64) -> Result<(String, String, String, bool)> {
    const PAIRS: usize = 10;
    const SAMPLES: usize = 10_000;

    let mut rng = stream(seed, 4);
    let mut inside = 0usize;
    let total = PAIRS * SAMPLES;
    for _ in 0..PAIRS {
        let q = Point {
            x: rng.gen_range(-5.0..5.0),
            y: rng.gen_range(-5.0..5.0),
            z: rng.gen_range(-5.0..5.0),
        };
        let lambda = rng.gen_range(0.2..5.0);
        let theta = escape_radius(q, lambda)?;
        for _ in 0..SAMPLES {
            // Uniform direction by rejection from the cube.
            let direction = loop {
                let v: [f64; 3] = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n > 1e-3 && n <= 1.0 {
                    break [v[0] / n, v[1] / n, v[2] / n];
                }
            };
            let radius = theta * rng.gen_range(1.01..4.0);
            let p = Point {
                x: q.x + radius * direction[0],
                y: q.y + radius * direction[1],
                z: q.z + radius * direction[2],
            };
            if koranyi_distance(p, q) <= lambda {
                inside += 1;
            }
        }
    }
    Ok((
        format!("all {total} samples beyond the radius exceed the level"),
        format!("{inside} samples at or below the level"),
        "strict inequality, no slack".into(),
        inside == 0,
    ))
}

/// 5. The closed-form Euclidean comparison bound dominates the distance on
///    the unit box.
fn check_comparison_bound(seed: u64) -> Result<(String, String, String, bool)> {
    const PAIRS: usize = 100_000;

    let bounds = BoundingBox::new(
        Point { x: 0.0, y: 0.0, z: 0.0 },
        Point { x: 1.0, y: 1.0, z: 1.0 },
    )?;
    let mut rng = stream(seed, 5);
    let draw = |rng: &mut ChaCha8Rng| Point {
        x: rng.gen_range(0.0..1.0),
        y: rng.gen_range(0.0..1.0),
        z: rng.gen_range(0.0..1.0),
    };
    let mut violations = 0usize;
    for _ in 0..PAIRS {
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        if euclidean_comparison_bound(&bounds, p, q)? < koranyi_distance(p, q) {
            violations += 1;
        }
    }
    Ok((
        format!("bound >= distance on all {PAIRS} pairs"),
        format!("{violations} violations"),
        "zero violations".into(),
        violations == 0,
    ))
}

/// 6. The geodesic solver reproduces the two analytic benchmarks and its
///    adjoint gradient matches central differences.
fn check_solver(seed: u64) -> Result<(String, String, String, bool)> {
    const STRAIGHT_BAND: (f64, f64) = (0.999, 1.001);
    const VERTICAL_BAND: (f64, f64) = (0.495, 0.505);
    const GRADIENT_TOL: f64 = 1e-5;

    let config = SolveConfig::with_seed(seed);
    let straight = solve_cc_geodesic(
        Point::ORIGIN,
        Point { x: 1.0, y: 0.0, z: 0.0 },
        64,
        &config,
    )?;
    let vertical = solve_cc_geodesic(
        Point::ORIGIN,
        Point { x: 0.0, y: 0.0, z: 1.0 / FOUR_PI },
        256,
        &config,
    )?;

    let mut rng = stream(seed, 6);
    let controls: Vec<[f64; 2]> = (0..16)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    let grad_err = gradient_check(
        Point { x: 0.1, y: -0.2, z: 0.05 },
        Point { x: 0.7, y: 0.4, z: -0.3 },
        &controls,
        1e3,
        1e-6,
    );

    let passed = straight.converged
        && vertical.converged
        && (STRAIGHT_BAND.0..=STRAIGHT_BAND.1).contains(&straight.length)
        && (VERTICAL_BAND.0..=VERTICAL_BAND.1).contains(&vertical.length)
        && grad_err < GRADIENT_TOL;
    Ok((
        "straight in [0.999, 1.001], vertical in [0.495, 0.505], grad err < 1e-5".into(),
        format!(
            "straight {:.6}, vertical {:.6}, grad err {grad_err:.2e}",
            straight.length, vertical.length
        ),
        format!("bands as stated; {GRADIENT_TOL:.0e}"),
        passed,
    ))
}

/// 7. Arclength reparametrization: exact endpoints, preserved length, and
///    the Lipschitz bound on every knot pair.
fn check_reparametrization(seed: u64) -> Result<(String, String, String, bool)> {
    const LENGTH_REL_TOL: f64 = 1e-9;
    const LIPSCHITZ_SLACK: f64 = 1e-9;
    const INTERVALS: usize = 256;

    let mut worst_length_err: f64 = 0.0;
    let mut worst_excess: f64 = 0.0;
    let mut endpoints_exact = true;
    let mut passed = true;
    for curve in verification_family(seed, 20, 4) {
        let sampled = curve.sample(INTERVALS)?;
        let length = polygonal_length(&sampled, koranyi_distance, &sampled.grid)?;
        let reparam = arclength_reparametrize(&sampled, koranyi_distance)?;

        endpoints_exact &= reparam.first_point() == sampled.first_point()
            && reparam.last_point() == sampled.last_point();

        let new_length = polygonal_length(&reparam, koranyi_distance, &reparam.grid)?;
        let rel = (new_length - length).abs() / length;
        worst_length_err = worst_length_err.max(rel);
        passed &= rel <= LENGTH_REL_TOL;

        let lipschitz = length * (1.0 + LIPSCHITZ_SLACK);
        let knots = reparam.grid.knots();
        for i in 0..knots.len() {
            for j in i + 1..knots.len() {
                let d = koranyi_distance(reparam.points[i], reparam.points[j]);
                let allowed = lipschitz * (knots[j] - knots[i]);
                worst_excess = worst_excess.max(d - allowed);
                passed &= d <= allowed;
            }
        }
    }
    passed &= endpoints_exact;
    Ok((
        "exact endpoints; length preserved; Lipschitz bound on all knot pairs".into(),
        format!(
            "endpoints exact: {endpoints_exact}; worst length err {worst_length_err:.2e}; worst Lipschitz excess {worst_excess:.2e}"
        ),
        format!("{LENGTH_REL_TOL:.0e} rel; constant L(1+{LIPSCHITZ_SLACK:.0e})"),
        passed,
    ))
}

/// 8. Lower semicontinuity: a zigzag family converging to a segment never
///    undercuts the limit's polygonal length, and grid refinement of a
///    solved geodesic does not increase the incumbent length.
fn check_lower_semicontinuity(seed: u64) -> Result<(String, String, String, bool)> {
    const SLACK: f64 = 1e-12;
    const FINE: usize = 1024;
    const PARTITIONS: [usize; 4] = [2, 4, 16, 64];
    const TEETH: [usize; 5] = [4, 8, 16, 32, 64];

    // Planar zigzags: y is a triangle wave with `n` teeth and height 1/n,
    // so the family converges uniformly to the segment (t, 0, 0).
    let zigzag = |n: usize, t: f64| -> Point {
        let phase = (t * n as f64).fract();
        let tri = if phase < 0.5 { 2.0 * phase } else { 2.0 * (1.0 - phase) };
        Point { x: t, y: tri / n as f64, z: 0.0 }
    };
    let sample = |f: &dyn Fn(f64) -> Point| -> Result<crate::curve::SampledCurve> {
        let grid = Partition::uniform(0.0, 1.0, FINE)?;
        let points = grid.knots().iter().map(|&t| f(t)).collect();
        crate::curve::SampledCurve::new(grid, points, None)
    };

    let segment = sample(&|t| Point { x: t, y: 0.0, z: 0.0 })?;
    let mut passed = true;
    let mut worst_gap: f64 = f64::NEG_INFINITY;
    for metric in [koranyi_distance, euclidean_distance] {
        let mut family_lengths = Vec::new();
        for &n in &TEETH {
            let curve = sample(&|t| zigzag(n, t))?;
            family_lengths.push(polygonal_length(&curve, metric, &curve.grid)?);
        }
        let liminf = family_lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        for &intervals in &PARTITIONS {
            let partition = Partition::uniform(0.0, 1.0, intervals)?;
            let limit_poly = polygonal_length(&segment, metric, &partition)?;
            worst_gap = worst_gap.max(limit_poly - liminf);
            passed &= limit_poly <= liminf + SLACK;
        }
    }

    let config = SolveConfig {
        starts: 2,
        ..SolveConfig::with_seed(seed)
    };
    let coarse = solve_cc_geodesic(
        Point::ORIGIN,
        Point { x: 0.0, y: 0.0, z: 1.0 / FOUR_PI },
        64,
        &config,
    )?;
    let comparison = refine_and_compare(&coarse, 2)?;
    let mut trace = coarse.trace.clone();
    trace.extend(comparison.refined.trace.iter().cloned());
    let trace_ok = trace
        .windows(2)
        .all(|w| w[1].length <= w[0].length + 1e-12);
    passed &= comparison.nonincreasing && trace_ok;

    Ok((
        "limit polygonal length <= liminf; refinement trace nonincreasing".into(),
        format!(
            "worst (limit - liminf) gap {worst_gap:.2e}; refine {:.6} -> {:.6}; trace nonincreasing: {trace_ok}",
            comparison.coarse_length, comparison.refined_length
        ),
        format!("{SLACK:.0e}"),
        passed,
    ))
}

/// 9. Difference quotients of the model geodesic converge uniformly to the
///    constant speed 1/2.
fn check_difference_quotients() -> Result<(String, String, String, bool)> {
    const GRID: usize = 256;
    const CASES: [(f64, f64); 2] = [(1e-3, 0.02), (1e-4, 0.002)];

    let mut got = Vec::new();
    let mut passed = true;
    for (h, tol) in CASES {
        let mut worst: f64 = 0.0;
        for i in 0..GRID {
            let t = (1.0 - h) * i as f64 / (GRID - 1) as f64;
            let dq = difference_quotient(example_geodesic, t, t + h)?;
            worst = worst.max((dq - 0.5).abs());
        }
        got.push(format!("h={h:.0e}: max dev {worst:.2e}"));
        passed &= worst < tol;
    }
    Ok((
        "max |DQ - 1/2| < 0.02 at h=1e-3 and < 0.002 at h=1e-4".into(),
        got.join("; "),
        "0.02 / 0.002".into(),
        passed,
    ))
}

/// Runs the full verification suite with the given seed.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    vec![
        timed(1, "length exceeds distance", check_length_gap),
        timed(2, "horizontal length equality", || check_length_equality(seed)),
        timed(3, "metric axioms and invariances", || check_metric_axioms(seed)),
        timed(4, "escape radius", || check_escape_radius(seed)),
        timed(5, "euclidean comparison bound", || check_comparison_bound(seed)),
        timed(6, "geodesic solver vs oracle", || check_solver(seed)),
        timed(7, "arclength reparametrization", || check_reparametrization(seed)),
        timed(8, "length lower semicontinuity", || check_lower_semicontinuity(seed)),
        timed(9, "difference quotient convergence", check_difference_quotients),
    ]
}
