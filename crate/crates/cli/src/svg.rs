//! Minimal self-contained SVG rendering: the planar projection of a curve
//! next to its height profile z(t). No external assets, inline styling
//! only, so the output opens anywhere.

use heisgeo::SampledCurve;

const PANEL: f64 = 380.0;
const MARGIN: f64 = 50.0;
const GAP: f64 = 70.0;

#[derive(Clone, Copy)]
struct Range {
    min: f64,
    max: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Range {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            min = min.min(v);
            max = max.max(v);
        }
        // Degenerate (constant) data still needs a drawable span.
        if min >= max {
            let pad = min.abs().max(1.0) * 1e-3;
            min -= pad;
            max += pad;
        }
        Range { min, max }
    }

    fn span(&self) -> f64 {
        self.max - self.min
    }
}

/// Maps data coordinates into one square panel, y flipped to screen
/// orientation. `equal_aspect` keeps the two axes isometric (for the
/// planar projection); otherwise each axis fills the panel.
struct Frame {
    left: f64,
    top: f64,
    x: Range,
    y: Range,
    scale_x: f64,
    scale_y: f64,
}

impl Frame {
    fn new(left: f64, x: Range, y: Range, equal_aspect: bool) -> Frame {
        let (mut scale_x, mut scale_y) = (PANEL / x.span(), PANEL / y.span());
        if equal_aspect {
            let s = scale_x.min(scale_y);
            scale_x = s;
            scale_y = s;
        }
        Frame { left, top: MARGIN, x, y, scale_x, scale_y }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        // Center the used area inside the panel.
        let used_w = self.x.span() * self.scale_x;
        let used_h = self.y.span() * self.scale_y;
        let px = self.left + (PANEL - used_w) / 2.0 + (x - self.x.min) * self.scale_x;
        let py = self.top + (PANEL + used_h) / 2.0 - (y - self.y.min) * self.scale_y;
        (px, py)
    }
}

fn polyline(frame: &Frame, data: impl Iterator<Item = (f64, f64)>) -> String {
    let points: Vec<String> = data
        .map(|(x, y)| {
            let (px, py) = frame.map(x, y);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1.5\" points=\"{}\"/>",
        points.join(" ")
    )
}

fn panel_chrome(out: &mut String, left: f64, title: &str, x: &Range, y: &Range) {
    out.push_str(&format!(
        "<rect x=\"{left}\" y=\"{MARGIN}\" width=\"{PANEL}\" height=\"{PANEL}\" \
         fill=\"none\" stroke=\"#999\" stroke-width=\"1\"/>"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{title}</text>",
        left + PANEL / 2.0,
        MARGIN - 14.0
    ));
    let labels = [
        (left, MARGIN + PANEL + 18.0, format!("{:.4}", x.min), "start"),
        (left + PANEL, MARGIN + PANEL + 18.0, format!("{:.4}", x.max), "end"),
        (left - 6.0, MARGIN + PANEL, format!("{:.4}", y.min), "min"),
        (left - 6.0, MARGIN + 12.0, format!("{:.4}", y.max), "max"),
    ];
    for (x, y, value, kind) in labels {
        let anchor = if kind == "min" || kind == "max" { "end" } else { "middle" };
        out.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" \
             font-size=\"11\" fill=\"#555\" text-anchor=\"{anchor}\">{value}</text>"
        ));
    }
}

/// Renders the curve as a standalone SVG document with two square panels:
/// the planar projection (x, y), drawn isometrically, and the height z as
/// a function of the parameter t.
pub fn render_curve(curve: &SampledCurve) -> String {
    let width = 2.0 * PANEL + 2.0 * MARGIN + GAP;
    let height = PANEL + 2.0 * MARGIN;

    let planar_x = Range::of(curve.points.iter().map(|p| p.x));
    let planar_y = Range::of(curve.points.iter().map(|p| p.y));
    let t_range = Range::of(curve.grid.knots().iter().copied());
    let z_range = Range::of(curve.points.iter().map(|p| p.z));

    let left_frame = Frame::new(MARGIN, planar_x, planar_y, true);
    let right_frame = Frame::new(MARGIN + PANEL + GAP, t_range, z_range, false);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" \
         height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    panel_chrome(&mut out, MARGIN, "planar projection", &planar_x, &planar_y);
    out.push_str(&polyline(
        &left_frame,
        curve.points.iter().map(|p| (p.x, p.y)),
    ));

    panel_chrome(&mut out, MARGIN + PANEL + GAP, "z(t)", &t_range, &z_range);
    out.push_str(&polyline(
        &right_frame,
        curve
            .grid
            .knots()
            .iter()
            .zip(curve.points.iter())
            .map(|(&t, p)| (t, p.z)),
    ));

    out.push_str("</svg>");
    out
}
