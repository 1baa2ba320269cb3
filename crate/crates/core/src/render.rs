//! Standalone SVG rendering of cumulative plots and reliability diagrams.
//!
//! Output is a pure function of the inputs: no timestamps, no random ids,
//! fixed coordinate precision. Elements carry `class` attributes
//! (`curve`, `triangle`, `diagonal`, `diagram`, `point`, `replicate`, ...)
//! so the structure can be inspected by tools and tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::binning::ReliabilityDiagram;
use crate::bootstrap::BootstrapEnsemble;
use crate::cumulative::CumulativeCurve;
use crate::{Error, Result};

/// Stroke for bootstrap replicates: 50% luminance gray.
pub const REPLICATE_STROKE: &str = "#808080";

const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 64.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// Fractions of `n` at which the cumulative plot places its axis ticks.
pub const CUMULATIVE_TICKS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Cumulative,
    Reliability,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub width_px: u32,
    pub height_px: u32,
    pub output_path: PathBuf,
    pub kind: PlotKind,
}

impl PlotSpec {
    /// A 640x480 plot.
    pub fn new(kind: PlotKind, title: impl Into<String>, output_path: impl Into<PathBuf>) -> Self {
        Self {
            title: title.into(),
            width_px: 640,
            height_px: 480,
            output_path: output_path.into(),
            kind,
        }
    }

    fn check(&self, kind: PlotKind) -> Result<()> {
        if self.width_px == 0 || self.height_px == 0 {
            return Err(Error::InvalidSample("plot dimensions must be positive".into()));
        }
        if self.kind != kind {
            return Err(Error::InvalidSample(format!(
                "plot spec is for {:?}, not {kind:?}",
                self.kind
            )));
        }
        Ok(())
    }
}

/// Affine map from data coordinates to canvas pixels.
#[derive(Debug, Clone, Copy)]
struct Frame {
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(spec: &PlotSpec, (x_min, x_max): (f64, f64), (y_min, y_max): (f64, f64)) -> Self {
        let w = spec.width_px as f64;
        let h = spec.height_px as f64;
        // tiny canvases still get a non-degenerate box
        let left = MARGIN_LEFT.min(w * 0.25);
        let right = (w - MARGIN_RIGHT.min(w * 0.1)).max(left + 1.0);
        let top = MARGIN_TOP.min(h * 0.25);
        let bottom = (h - MARGIN_BOTTOM.min(h * 0.25)).max(top + 1.0);
        Self {
            left,
            right,
            top,
            bottom,
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    fn x(&self, x: f64) -> f64 {
        self.left + (x - self.x_min) / (self.x_max - self.x_min) * (self.right - self.left)
    }

    fn y(&self, y: f64) -> f64 {
        self.bottom - (y - self.y_min) / (self.y_max - self.y_min) * (self.bottom - self.top)
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

// Coordinates are printed with three decimals; -0.000 is folded to 0.000.
fn c(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn points_attr(points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = String::new();
    for (i, (x, y)) in points.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", c(x), c(y));
    }
    out
}

/// Short human label for a tick value.
fn tick_label(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.to_string()
        }
    } else {
        format!("{v:.2e}")
    }
}

/// Roughly five round-valued ticks covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if span.is_nan() || span <= 0.0 {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn svg_open(out: &mut String, spec: &PlotSpec) {
    let (w, h) = (spec.width_px, spec.height_px);
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text class="title" x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        c(w as f64 / 2.0),
        escape(&spec.title)
    );
}

fn frame_rect(out: &mut String, f: &Frame) {
    let _ = writeln!(
        out,
        r#"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        c(f.left),
        c(f.top),
        c(f.right - f.left),
        c(f.bottom - f.top)
    );
}

fn y_axis(out: &mut String, f: &Frame, ticks: &[f64], label: &str) {
    for &t in ticks {
        let y = f.y(t);
        let _ = writeln!(
            out,
            r#"<line class="tick-left" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            c(f.left - 5.0),
            c(y),
            c(f.left),
            c(y)
        );
        let _ = writeln!(
            out,
            r#"<text class="tick-label-left" x="{}" y="{}" text-anchor="end">{}</text>"#,
            c(f.left - 8.0),
            c(y + 4.0),
            escape(&tick_label(t))
        );
    }
    let mid = (f.top + f.bottom) / 2.0;
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        c(mid),
        c(mid),
        escape(label)
    );
}

/// Index `k` (1-based) nearest to the fraction `t` of `n`.
pub fn nearest_index(t: f64, n: usize) -> usize {
    ((t * n as f64).round() as usize).clamp(1, n)
}

/// SVG text of the cumulative difference plot.
pub fn cumulative_svg(curve: &CumulativeCurve, spec: &PlotSpec) -> Result<String> {
    spec.check(PlotKind::Cumulative)?;
    let n = curve.len();
    let h = curve.triangle_half_height();
    let d_min = curve.ordinates().iter().copied().fold(0.0, f64::min);
    let d_max = curve.ordinates().iter().copied().fold(0.0, f64::max);
    let (mut lo, mut hi) = (d_min - h, d_max + h);
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        lo = -1.0 / n as f64;
        hi = 1.0 / n as f64;
    }
    let f = Frame::new(spec, (0.0, 1.0), (lo, hi));

    let mut out = String::new();
    svg_open(&mut out, spec);
    frame_rect(&mut out, &f);

    // upper axis: k/n, linear
    for t in CUMULATIVE_TICKS {
        let x = f.x(t);
        let _ = writeln!(
            out,
            r#"<line class="tick-upper" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            c(x),
            c(f.top - 5.0),
            c(x),
            c(f.top)
        );
        let _ = writeln!(
            out,
            r#"<text class="tick-label-upper" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            c(x),
            c(f.top - 9.0),
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">k/n</text>"#,
        c((f.left + f.right) / 2.0),
        c(f.top - 28.0)
    );

    // lower axis: the score at the index nearest each upper tick
    for t in CUMULATIVE_TICKS {
        let k = nearest_index(t, n);
        let x = f.x(k as f64 / n as f64);
        let score = curve.scores()[k - 1];
        let _ = writeln!(
            out,
            r#"<line class="tick-lower" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            c(x),
            c(f.bottom),
            c(x),
            c(f.bottom + 5.0)
        );
        let _ = writeln!(
            out,
            r#"<text class="tick-label-lower" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            c(x),
            c(f.bottom + 18.0),
            escape(&tick_label(score))
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">score</text>"#,
        c((f.left + f.right) / 2.0),
        c(f.bottom + 40.0)
    );

    y_axis(&mut out, &f, &nice_ticks(lo, hi), "cumulative difference");

    let _ = writeln!(
        out,
        r##"<line class="zero" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c0c0c0" stroke-width="1"/>"##,
        c(f.left),
        c(f.y(0.0)),
        c(f.right),
        c(f.y(0.0))
    );

    // triangle: vertical base from -h to +h at the origin, apex on the axis
    let base_px = f.y(-h) - f.y(h);
    let apex_px = (base_px / 2.0).min(0.1 * (f.right - f.left));
    let _ = writeln!(
        out,
        r#"<polygon class="triangle" points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        points_attr([
            (f.x(0.0), f.y(h)),
            (f.x(0.0) + apex_px, f.y(0.0)),
            (f.x(0.0), f.y(-h)),
        ])
    );

    let pts = std::iter::once((f.x(0.0), f.y(0.0))).chain(
        curve
            .abscissas()
            .iter()
            .zip(curve.ordinates())
            .map(|(&x, &d)| (f.x(x), f.y(d))),
    );
    let _ = writeln!(
        out,
        r#"<polyline class="curve" points="{}" fill="none" stroke="black" stroke-width="1.25"/>"#,
        points_attr(pts)
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// SVG text of a reliability diagram, with optional bootstrap replicates
/// drawn beneath the main series.
pub fn reliability_svg(
    diagram: &ReliabilityDiagram,
    ensemble: Option<&BootstrapEnsemble>,
    spec: &PlotSpec,
) -> Result<String> {
    spec.check(PlotKind::Reliability)?;
    let f = Frame::new(spec, (0.0, 1.0), (0.0, 1.0));

    let mut out = String::new();
    svg_open(&mut out, spec);
    frame_rect(&mut out, &f);

    let ticks = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    for t in ticks {
        let x = f.x(t);
        let _ = writeln!(
            out,
            r#"<line class="tick-lower" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            c(x),
            c(f.bottom),
            c(x),
            c(f.bottom + 5.0)
        );
        let _ = writeln!(
            out,
            r#"<text class="tick-label-lower" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            c(x),
            c(f.bottom + 18.0),
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">mean score</text>"#,
        c((f.left + f.right) / 2.0),
        c(f.bottom + 40.0)
    );
    y_axis(&mut out, &f, &ticks, "observed frequency");

    let _ = writeln!(
        out,
        r#"<line class="diagonal" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1" stroke-dasharray="4 4"/>"#,
        c(f.x(0.0)),
        c(f.y(0.0)),
        c(f.x(1.0)),
        c(f.y(1.0))
    );

    if let Some(ensemble) = ensemble {
        for replicate in &ensemble.replicates {
            let _ = writeln!(
                out,
                r#"<polyline class="replicate" points="{}" fill="none" stroke="{REPLICATE_STROKE}" stroke-width="1"/>"#,
                points_attr(replicate.points().map(|(a, b)| (f.x(a), f.y(b))))
            );
        }
    }

    let pts: Vec<(f64, f64)> = diagram.points().map(|(a, b)| (f.x(a), f.y(b))).collect();
    if pts.len() > 1 {
        let _ = writeln!(
            out,
            r#"<polyline class="diagram" points="{}" fill="none" stroke="black" stroke-width="1.25"/>"#,
            points_attr(pts.iter().copied())
        );
    }
    for (x, y) in pts {
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{}" cy="{}" r="2" fill="black"/>"#,
            c(x),
            c(y)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Renders the cumulative plot to `spec.output_path`.
pub fn render_cumulative(curve: &CumulativeCurve, spec: &PlotSpec) -> Result<()> {
    write_file(&spec.output_path, &cumulative_svg(curve, spec)?)
}

/// Renders the reliability diagram to `spec.output_path`.
pub fn render_reliability(
    diagram: &ReliabilityDiagram,
    ensemble: Option<&BootstrapEnsemble>,
    spec: &PlotSpec,
) -> Result<()> {
    write_file(&spec.output_path, &reliability_svg(diagram, ensemble, spec)?)
}
