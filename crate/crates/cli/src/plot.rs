//! Static SVG line charts of a trajectory table.

use std::f64::consts::PI;
use std::fmt::Write as _;

use clap::ValueEnum;

use crate::table::TrajectoryTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
/// Polylines are thinned to at most this many vertices.
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Every coordinate of every agent.
    States,
    /// `½ Σ‖x_i‖²`.
    V2,
    /// `max_i ‖x_i‖`, with the π chart boundary marked.
    #[value(name = "max_norm", alias = "max-norm")]
    MaxNorm,
}

impl PlotKind {
    pub fn file_suffix(self) -> &'static str {
        match self {
            PlotKind::States => "states",
            PlotKind::V2 => "v2",
            PlotKind::MaxNorm => "max_norm",
        }
    }
}

struct Series {
    label: String,
    color: &'static str,
    points: Vec<(f64, f64)>,
}

fn thin(t: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let stride = t.len().div_ceil(MAX_POINTS).max(1);
    let mut pts: Vec<_> = (0..t.len()).step_by(stride).map(|k| (t[k], y[k])).collect();
    if let (Some(&last_t), Some(&last_y)) = (t.last(), y.last()) {
        if pts.last() != Some(&(last_t, last_y)) {
            pts.push((last_t, last_y));
        }
    }
    pts
}

fn series(table: &TrajectoryTable, kind: PlotKind) -> Vec<Series> {
    let t = table.column("t").unwrap_or_default();
    match kind {
        PlotKind::States => (0..table.agents())
            .flat_map(|i| (0..3).map(move |k| (i, k)))
            .map(|(i, k)| Series {
                label: format!("x_{}_{}", i + 1, k + 1),
                color: PALETTE[i % PALETTE.len()],
                points: thin(&t, &table.coordinate(i, k)),
            })
            .collect(),
        PlotKind::V2 => vec![Series {
            label: "V2".into(),
            color: PALETTE[0],
            points: thin(&t, &table.column("v2").unwrap_or_default()),
        }],
        PlotKind::MaxNorm => vec![Series {
            label: "max_norm".into(),
            color: PALETTE[0],
            points: thin(&t, &table.column("max_norm").unwrap_or_default()),
        }],
    }
}

/// Round-number tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn render(table: &TrajectoryTable, kind: PlotKind) -> String {
    let data = series(table, kind);
    let all = data.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = all.fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if kind == PlotKind::MaxNorm {
        y0 = y0.min(PI);
        y1 = y1.max(PI);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * plot_h;

    let title = match kind {
        PlotKind::States => "Agent states",
        PlotKind::V2 => "V2 = 1/2 sum |x_i|^2",
        PlotKind::MaxNorm => "max_i |x_i|",
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{b2}" stroke="black"/><text x="{x:.2}" y="{ty}" text-anchor="middle">{}</text>"#,
            fmt_tick(t),
            b = MARGIN_TOP + plot_h,
            b2 = MARGIN_TOP + plot_h + 5.0,
            ty = MARGIN_TOP + plot_h + 18.0,
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{a}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{}</text>"#,
            fmt_tick(t),
            a = MARGIN_LEFT - 5.0,
            tx = MARGIN_LEFT - 8.0,
            ty = y + 4.0,
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    if kind == PlotKind::MaxNorm {
        let y = sy(PI);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#555" stroke-dasharray="6 4"/><text x="{}" y="{:.2}" text-anchor="end" fill="#555">π</text>"##,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT + plot_w - 4.0,
            y - 4.0
        );
    }
    for s in &data {
        let mut pts = String::with_capacity(16 * s.points.len());
        for &(x, y) in &s.points {
            let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"><title>{}</title></polyline>"#,
            s.color,
            pts.trim_end(),
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_examples() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(ticks(0.05, 0.33), vec![0.1, 0.2, 0.30000000000000004]);
        assert_eq!(fmt_tick(0.30000000000000004), "0.3");
        assert_eq!(fmt_tick(-0.0), "0");
    }

    #[test]
    fn thinning_keeps_the_last_point() {
        let t: Vec<f64> = (0..5001).map(|k| k as f64).collect();
        let pts = thin(&t, &t);
        assert!(pts.len() <= MAX_POINTS + 1);
        assert_eq!(pts.last(), Some(&(5000.0, 5000.0)));
        assert_eq!(pts[0], (0.0, 0.0));
    }
}
