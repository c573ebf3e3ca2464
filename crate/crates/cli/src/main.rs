//! Command-line front end for the Heisenberg-group toolkit: distance and
//! length queries, horizontal lifts, Lipschitz reparametrization, geodesic
//! solving, the verification suite, and SVG/CSV plot emission.
//!
//! Exit codes: 0 success, 1 I/O or file-content failure, 2 usage error,
//! 3 non-convergence (the report is still printed), 4 verification failure.

mod svg;

use clap::{Parser, Subcommand, ValueEnum};
use heisgeo::heisenberg::{euclidean_distance, horizontal_lift, koranyi_distance};
use heisgeo::length::{arclength_reparametrize, curve_length};
use heisgeo::solver::{
    solve_cc_geodesic, solve_koranyi_polyline, PolylineConfig, SolveConfig, SolveReport,
};
use heisgeo::verify::{all_passed, format_table, run_all};
use heisgeo::{io, Error, PlanarCurve, Point, SampledCurve, DEFAULT_SEED};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NON_CONVERGENCE: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "heisgeo",
    version,
    about = "Numerical toolkit for the first Heisenberg group",
    after_help = "Points on the command line are comma-separated triples, e.g. 0,0,0.0795775.\n\
                  The HEISGEO_SEED environment variable overrides the built-in default seed;\n\
                  an explicit --seed overrides both."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Koranyi,
    Euclidean,
}

impl Metric {
    fn distance(self) -> fn(Point, Point) -> f64 {
        match self {
            Metric::Koranyi => koranyi_distance,
            Metric::Euclidean => euclidean_distance,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Koranyi distance between two points
    Dist { p: String, q: String },

    /// Measure a sampled curve's metric length by dyadic refinement
    Length {
        /// Curve file (.json or .csv)
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Koranyi)]
        metric: Metric,
        /// Stop once one refinement gains less than this
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Cap on the number of dyadic refinements
        #[arg(long, default_value_t = 16)]
        max_levels: usize,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Lift the planar part of a curve to a horizontal curve
    Lift {
        /// Curve file (.json or .csv); only x and y are read
        input: PathBuf,
        /// Initial height (defaults to the input's first z)
        #[arg(long)]
        z0: Option<f64>,
        /// Write the lifted curve here (format from the extension)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stdout format when --out is not given
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },

    /// Reparametrize a curve by arclength onto [0, 1]
    Reparam {
        /// Curve file (.json or .csv)
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Koranyi)]
        metric: Metric,
        /// Write the reparametrized curve here (format from the extension)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stdout format when --out is not given
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },

    /// Approximate the Carnot-Caratheodory geodesic between two points
    Geodesic {
        p: String,
        q: String,
        /// Number of piecewise-constant control steps
        #[arg(long = "N", default_value_t = 48)]
        n: usize,
        /// Solve for the shortest Koranyi M-vertex polyline instead
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Endpoint miss tolerance for convergence
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run the full verification suite and print its table
    Verify {
        #[arg(long)]
        seed: Option<u64>,
    },

    /// Render a curve (or solver report) as SVG plus a convergence CSV
    Plot {
        /// Curve file (.json/.csv) or geodesic report JSON
        input: PathBuf,
        /// SVG output path
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
        /// CSV trace path (defaults to the SVG path with .csv)
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Sampling density when plotting a solver report
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Metric::Koranyi)]
        metric: Metric,
        /// Refinement tolerance for the curve-length trace
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Failure {
        let code = match &error {
            Error::Io(_) | Error::Parse(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        fail(code, error.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Dist { p, q } => cmd_dist(&p, &q),
        Command::Length { input, metric, tol, max_levels, out } => {
            cmd_length(&input, metric, tol, max_levels, out.as_deref())
        }
        Command::Lift { input, z0, out, format } => {
            cmd_lift(&input, z0, out.as_deref(), format)
        }
        Command::Reparam { input, metric, out, format } => {
            cmd_reparam(&input, metric, out.as_deref(), format)
        }
        Command::Geodesic { p, q, n, m, seed, tol, out } => {
            cmd_geodesic(&p, &q, n, m, seed, tol, out.as_deref())
        }
        Command::Verify { seed } => cmd_verify(seed),
        Command::Plot { input, out, trace, samples, metric, tol } => {
            cmd_plot(&input, &out, trace.as_deref(), samples, metric, tol)
        }
    }
}

fn parse_point(text: &str) -> Result<Point, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(fail(
            EXIT_USAGE,
            format!("point '{text}' must be three comma-separated numbers"),
        ));
    }
    let mut coords = [0.0; 3];
    for (slot, part) in coords.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|_| {
            fail(EXIT_USAGE, format!("point '{text}' has a malformed coordinate '{part}'"))
        })?;
    }
    Point::new(coords[0], coords[1], coords[2])
        .map_err(|e| fail(EXIT_USAGE, e.to_string()))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("HEISGEO_SEED") {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            fail(EXIT_USAGE, format!("HEISGEO_SEED must be an unsigned integer, got '{text}'"))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Formats with the given number of significant digits, in plain decimal
/// notation whenever that stays readable.
fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let exponent = value.abs().log10().floor() as i32;
    let decimals = digits as i32 - 1 - exponent;
    if (0..=17).contains(&decimals) {
        format!("{value:.*}", decimals as usize)
    } else {
        format!("{value:.*e}", digits - 1)
    }
}

/// Writes to stdout, exiting quietly when the downstream consumer has closed
/// the pipe (e.g. `heisgeo length curve.json | head`): truncation by the
/// reader is not a program failure.
fn print_stdout(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(i32::from(EXIT_IO));
    }
}

fn println_stdout(text: &str) {
    print_stdout(text);
    print_stdout("\n");
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| fail(EXIT_IO, e.to_string()))?;
            println_stdout(&format!("wrote {}", path.display()));
            Ok(())
        }
        None => {
            println_stdout(text);
            Ok(())
        }
    }
}

fn emit_curve(
    curve: &SampledCurve,
    out: Option<&std::path::Path>,
    format: Format,
) -> Result<(), Failure> {
    match out {
        Some(path) => {
            io::write_curve(path, curve)?;
            println_stdout(&format!("wrote {}", path.display()));
            Ok(())
        }
        None => {
            let text = match format {
                Format::Json => io::curve_to_json_string(curve),
                Format::Csv => io::curve_to_csv_string(curve),
            };
            print_stdout(&text);
            if !text.ends_with('\n') {
                print_stdout("\n");
            }
            Ok(())
        }
    }
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| fail(EXIT_IO, e.to_string()))
}

fn cmd_dist(p: &str, q: &str) -> Result<(), Failure> {
    let (p, q) = (parse_point(p)?, parse_point(q)?);
    println_stdout(&format_significant(koranyi_distance(p, q), 12));
    Ok(())
}

fn cmd_length(
    input: &std::path::Path,
    metric: Metric,
    tol: f64,
    max_levels: usize,
    out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let curve = io::read_curve(input)?;
    let (a, b) = (curve.grid.first(), curve.grid.last());
    let report = curve_length(|t| curve.evaluate(t), a, b, metric.distance(), tol, max_levels)?;
    emit(&to_pretty_json(&report)?, out)?;
    if !report.converged {
        return Err(fail(
            EXIT_NON_CONVERGENCE,
            format!(
                "length did not converge after {} refinement levels (last increment {:.3e})",
                report.levels, report.last_increment
            ),
        ));
    }
    Ok(())
}

fn cmd_lift(
    input: &std::path::Path,
    z0: Option<f64>,
    out: Option<&std::path::Path>,
    format: Format,
) -> Result<(), Failure> {
    let curve = io::read_curve(input)?;
    let planar = PlanarCurve::new(
        curve.grid.clone(),
        curve.points.iter().map(|p| (p.x, p.y)).collect(),
        curve
            .derivatives
            .as_ref()
            .map(|ds| ds.iter().map(|d| (d.x, d.y)).collect()),
    )?;
    let lifted = horizontal_lift(&planar, z0.unwrap_or(curve.first_point().z))?;
    emit_curve(&lifted, out, format)
}

fn cmd_reparam(
    input: &std::path::Path,
    metric: Metric,
    out: Option<&std::path::Path>,
    format: Format,
) -> Result<(), Failure> {
    let curve = io::read_curve(input)?;
    let reparametrized = arclength_reparametrize(&curve, metric.distance())?;
    emit_curve(&reparametrized, out, format)
}

fn cmd_geodesic(
    p: &str,
    q: &str,
    n: usize,
    m: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let (p, q) = (parse_point(p)?, parse_point(q)?);
    let seed = resolve_seed(seed)?;

    let converged = if let Some(vertices) = m {
        let config = PolylineConfig { seed, ..PolylineConfig::default() };
        let report = solve_koranyi_polyline(p, q, vertices, &config)?;
        emit(&to_pretty_json(&report)?, out)?;
        report.converged
    } else {
        let mut config = SolveConfig::with_seed(seed);
        if let Some(tol) = tol {
            config.miss_tolerance = tol;
        }
        let report = solve_cc_geodesic(p, q, n, &config)?;
        emit(&to_pretty_json(&report)?, out)?;
        report.converged
    };

    if !converged {
        return Err(fail(EXIT_NON_CONVERGENCE, "solver did not converge; report above"));
    }
    Ok(())
}

fn cmd_verify(seed: Option<u64>) -> Result<(), Failure> {
    let seed = resolve_seed(seed)?;
    let results = run_all(seed);
    print_stdout(&format_table(&results));
    if all_passed(&results) {
        Ok(())
    } else {
        let failing: Vec<&str> = results
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name)
            .collect();
        Err(fail(
            EXIT_VERIFICATION,
            format!("verification failed: {}", failing.join(", ")),
        ))
    }
}

fn cmd_plot(
    input: &std::path::Path,
    out: &std::path::Path,
    trace: Option<&std::path::Path>,
    samples: usize,
    metric: Metric,
    tol: f64,
) -> Result<(), Failure> {
    // A geodesic report is also JSON; recognize it by its schema, and fall
    // back to the shared curve formats otherwise.
    let report: Option<SolveReport> = std::fs::read_to_string(input)
        .ok()
        .and_then(|text| serde_json::from_str(&text).ok());

    let (curve, trace_csv) = match report {
        Some(report) => {
            let mut csv = String::from("start_index,stage,penalty,length,endpoint_miss\n");
            for entry in &report.trace {
                csv.push_str(&format!(
                    "{},{},{:.16e},{:.16e},{:.16e}\n",
                    entry.start_index,
                    entry.stage,
                    entry.penalty,
                    entry.length,
                    entry.endpoint_miss
                ));
            }
            (report.curve.sampled(samples)?, csv)
        }
        None => {
            let curve = io::read_curve(input)?;
            let (a, b) = (curve.grid.first(), curve.grid.last());
            let lengths =
                curve_length(|t| curve.evaluate(t), a, b, metric.distance(), tol, 16)?;
            let mut csv = String::from("level,intervals,length\n");
            for (level, value) in lengths.level_values.iter().enumerate() {
                csv.push_str(&format!("{},{},{:.16e}\n", level, 1usize << level, value));
            }
            (curve, csv)
        }
    };

    std::fs::write(out, svg::render_curve(&curve)).map_err(|e| fail(EXIT_IO, e.to_string()))?;
    println_stdout(&format!("wrote {}", out.display()));
    let trace_path = trace
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| out.with_extension("csv"));
    std::fs::write(&trace_path, trace_csv).map_err(|e| fail(EXIT_IO, e.to_string()))?;
    println_stdout(&format!("wrote {}", trace_path.display()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::format_significant;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(std::f64::consts::SQRT_2, 12), "1.41421356237");
        assert_eq!(format_significant(0.2820947917738781, 12), "0.282094791774");
        assert_eq!(format_significant(1.0e-30, 12), "1.00000000000e-30");
        assert_eq!(format_significant(-2.5, 3), "-2.50");
    }
}
