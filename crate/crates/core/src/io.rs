//! Reading and writing sampled curves.
//!
//! Two interchangeable formats:
//!
//! * JSON: `{"grid": [...], "points": [[x, y, z], ...], "derivatives":
//!   [[x, y, z], ...]}` with `derivatives` optional.
//! * CSV: header `t,x,y,z` followed by one row per knot (no derivatives).
//!
//! Floats are written with 17 significant digits, so a write/read
//! round-trip reproduces every f64 bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::curve::{Partition, SampledCurve};
use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveFormat {
    Json,
    Csv,
}

impl CurveFormat {
    pub fn from_path(path: &Path) -> Result<CurveFormat> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(CurveFormat::Json),
            Some("csv") => Ok(CurveFormat::Csv),
            other => Err(Error::invalid(format!(
                "cannot infer curve format from extension {other:?}; use .json or .csv"
            ))),
        }
    }
}

/// 17 significant digits: enough to reproduce any f64 exactly.
fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn curve_to_json_string(curve: &SampledCurve) -> String {
    let mut out = String::new();
    out.push_str("{\n  \"grid\": [");
    for (i, t) in curve.grid.knots().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_f64(*t));
    }
    out.push_str("],\n  \"points\": [\n");
    let write_triples = |out: &mut String, points: &[Point]| {
        for (i, p) in points.iter().enumerate() {
            let _ = writeln!(
                out,
                "    [{}, {}, {}]{}",
                fmt_f64(p.x),
                fmt_f64(p.y),
                fmt_f64(p.z),
                if i + 1 < points.len() { "," } else { "" }
            );
        }
    };
    write_triples(&mut out, &curve.points);
    out.push_str("  ]");
    if let Some(derivatives) = &curve.derivatives {
        out.push_str(",\n  \"derivatives\": [\n");
        write_triples(&mut out, derivatives);
        out.push_str("  ]");
    }
    out.push_str("\n}\n");
    out
}

#[derive(Deserialize)]
struct RawCurve {
    grid: Vec<f64>,
    points: Vec<[f64; 3]>,
    #[serde(default)]
    derivatives: Option<Vec<[f64; 3]>>,
}

fn points_from_triples(triples: Vec<[f64; 3]>, what: &str) -> Result<Vec<Point>> {
    triples
        .into_iter()
        .enumerate()
        .map(|(i, [x, y, z])| {
            Point::new(x, y, z)
                .map_err(|_| Error::parse(format!("{what} entry {i} has a non-finite coordinate")))
        })
        .collect()
}

pub fn curve_from_json_str(text: &str) -> Result<SampledCurve> {
    let raw: RawCurve =
        serde_json::from_str(text).map_err(|e| Error::parse(format!("invalid curve JSON: {e}")))?;
    let grid = Partition::new(raw.grid)?;
    let points = points_from_triples(raw.points, "points")?;
    let derivatives = raw
        .derivatives
        .map(|d| points_from_triples(d, "derivatives"))
        .transpose()?;
    SampledCurve::new(grid, points, derivatives)
}

pub fn curve_to_csv_string(curve: &SampledCurve) -> String {
    let mut out = String::from("t,x,y,z\n");
    for (t, p) in curve.grid.knots().iter().zip(&curve.points) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(*t),
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(p.z)
        );
    }
    out
}

pub fn curve_from_csv_str(text: &str) -> Result<SampledCurve> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("empty CSV curve file"))?;
    let normalized: Vec<&str> = header.split(',').map(str::trim).collect();
    if normalized != ["t", "x", "y", "z"] {
        return Err(Error::parse(format!(
            "expected CSV header 't,x,y,z', found '{header}'"
        )));
    }
    let mut grid = Vec::new();
    let mut points = Vec::new();
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::parse(format!(
                "row {} has {} fields, expected 4",
                row + 1,
                fields.len()
            )));
        }
        let mut values = [0.0; 4];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.parse::<f64>().map_err(|_| {
                Error::parse(format!("row {}: '{}' is not a number", row + 1, field))
            })?;
        }
        grid.push(values[0]);
        points.push(Point::new(values[1], values[2], values[3]).map_err(|_| {
            Error::parse(format!("row {} has a non-finite coordinate", row + 1))
        })?);
    }
    SampledCurve::new(Partition::new(grid)?, points, None)
}

pub fn write_curve(path: &Path, curve: &SampledCurve) -> Result<()> {
    let format = CurveFormat::from_path(path)?;
    let text = match format {
        CurveFormat::Json => curve_to_json_string(curve),
        CurveFormat::Csv => curve_to_csv_string(curve),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_curve(path: &Path) -> Result<SampledCurve> {
    let format = CurveFormat::from_path(path)?;
    let text = std::fs::read_to_string(path)?;
    match format {
        CurveFormat::Json => curve_from_json_str(&text),
        CurveFormat::Csv => curve_from_csv_str(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::sample_example_geodesic;

    #[test]
    fn json_round_trip_is_bitwise_exact() {
        let curve = sample_example_geodesic(17).unwrap();
        let text = curve_to_json_string(&curve);
        let back = curve_from_json_str(&text).unwrap();
        assert_eq!(curve.grid.knots(), back.grid.knots());
        assert_eq!(curve.points, back.points);
        assert_eq!(curve.derivatives, back.derivatives);
    }

    #[test]
    fn csv_round_trip_is_bitwise_exact() {
        let curve = sample_example_geodesic(23).unwrap();
        let text = curve_to_csv_string(&curve);
        let back = curve_from_csv_str(&text).unwrap();
        assert_eq!(curve.grid.knots(), back.grid.knots());
        assert_eq!(curve.points, back.points);
        assert!(back.derivatives.is_none());
    }

    #[test]
    fn json_without_derivatives_parses() {
        let text = r#"{"grid": [0.0, 0.5, 1.0],
                       "points": [[0,0,0],[0.5,0,0],[1,0,0]]}"#;
        let curve = curve_from_json_str(text).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert!(curve.derivatives.is_none());
    }

    #[test]
    fn malformed_inputs_are_reported_as_parse_errors() {
        assert!(matches!(
            curve_from_json_str("{\"grid\": [0, 1]}"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            curve_from_json_str(
                "{\"grid\": [0, 1], \"points\": [[0,0,0],[1,0,\"a\"]]}"
            ),
            Err(Error::Parse(_))
        ));
        // Non-increasing grid is rejected by validation, NaN by parsing.
        assert!(curve_from_csv_str("t,x,y,z\n0,0,0,0\n0,1,0,0\n").is_err());
        assert!(curve_from_csv_str("t,x,y,z\n0,0,0,0\n1,nan,0,0\n").is_err());
        assert!(matches!(
            curve_from_csv_str("time,x,y,z\n0,0,0,0\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn file_round_trip_through_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let curve = sample_example_geodesic(8).unwrap();
        for name in ["curve.json", "curve.csv"] {
            let path = dir.path().join(name);
            write_curve(&path, &curve).unwrap();
            let back = read_curve(&path).unwrap();
            assert_eq!(curve.points, back.points);
        }
        assert!(CurveFormat::from_path(Path::new("curve.yaml")).is_err());
    }
}
