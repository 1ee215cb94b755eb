//! Minimal deterministic SVG line plots.

use std::fmt::Write;

use crate::error::{Error, Result};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dashed,
    /// Thin grey reference line.
    Guide,
    /// Unconnected dots.
    Markers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub style: LineStyle,
    /// `None` breaks the line.
    pub points: Vec<Option<(f64, f64)>>,
}

impl Series {
    pub fn new(label: impl Into<String>, style: LineStyle) -> Self {
        Self {
            label: label.into(),
            style,
            points: Vec::new(),
        }
    }

    pub fn from_points(label: impl Into<String>, style: LineStyle, pts: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self {
            label: label.into(),
            style,
            points: pts.into_iter().map(Some).collect(),
        }
    }

    fn runs(&self) -> Vec<Vec<(f64, f64)>> {
        let mut runs = Vec::new();
        let mut current = Vec::new();
        for p in &self.points {
            match p {
                Some((x, y)) if x.is_finite() && y.is_finite() => current.push((*x, *y)),
                _ => {
                    if !current.is_empty() {
                        runs.push(std::mem::take(&mut current));
                    }
                }
            }
        }
        if !current.is_empty() {
            runs.push(current);
        }
        runs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Round `raw` up to 1, 2 or 5 times a power of ten.
fn nice_step(raw: f64) -> f64 {
    let magnitude = 10f64.powf(raw.log10().floor());
    let fraction = raw / magnitude;
    let nice = if fraction <= 1.0 {
        1.0
    } else if fraction <= 2.0 {
        2.0
    } else if fraction <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = nice_step((hi - lo) / 6.0);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    let values = (first..=last).map(|i| i as f64 * step).collect();
    (values, decimals)
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render `figure` on an 800×600 canvas.
pub fn emit_svg(figure: &Figure) -> Result<String> {
    let runs: Vec<Vec<Vec<(f64, f64)>>> = figure.series.iter().map(Series::runs).collect();
    let all = runs.iter().flatten().flatten();
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut any = false;
    for &(x, y) in all {
        any = true;
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !any {
        return Err(Error::EmptyTable);
    }
    let (x_lo, x_hi) = padded(x_lo, x_hi);
    let (y_lo, y_hi) = padded(y_lo, y_hi);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="28" font-family="sans-serif" font-size="18" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(&figure.title)
    );

    // axes frame
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let (xt, xd) = ticks(x_lo, x_hi);
    for v in xt {
        let px = sx(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
            TOP + plot_h,
            TOP + plot_h + 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{:.*}</text>"#,
            TOP + plot_h + 20.0,
            xd,
            v + 0.0
        );
    }
    let (yt, yd) = ticks(y_lo, y_hi);
    for v in yt {
        let py = sy(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="black" stroke-width="1"/>"#,
            LEFT - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{:.*}</text>"#,
            LEFT - 9.0,
            py + 4.0,
            yd,
            v + 0.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(&figure.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&figure.y_label)
    );

    let _ = writeln!(
        svg,
        r#"<clipPath id="plot-area"><rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}"/></clipPath>"#
    );
    let _ = writeln!(svg, r#"<g clip-path="url(#plot-area)">"#);
    let mut colour = 0;
    for (series, series_runs) in figure.series.iter().zip(&runs) {
        let stroke = match series.style {
            LineStyle::Guide => "#888888",
            _ => {
                colour += 1;
                PALETTE[(colour - 1) % PALETTE.len()]
            }
        };
        let _ = writeln!(svg, r#"<g class="series"><title>{}</title>"#, escape(&series.label));
        for run in series_runs {
            if series.style == LineStyle::Markers {
                for &(x, y) in run {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{stroke}"/>"#,
                        sx(x),
                        sy(y)
                    );
                }
                continue;
            }
            let coords: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let extra = match series.style {
                LineStyle::Dashed => r#" stroke-dasharray="8 5""#,
                LineStyle::Guide => r#" stroke-dasharray="2 3""#,
                _ => "",
            };
            let width = if series.style == LineStyle::Guide { 1.0 } else { 1.5 };
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{stroke}" stroke-width="{width}"{extra} points="{}"/>"#,
                coords.join(" ")
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure(series: Vec<Series>) -> Figure {
        Figure {
            title: "test".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series,
        }
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(emit_svg(&figure(vec![])), Err(Error::EmptyTable));
        let only_breaks = Series {
            label: "s".into(),
            style: LineStyle::Solid,
            points: vec![None, None],
        };
        assert_eq!(emit_svg(&figure(vec![only_breaks])), Err(Error::EmptyTable));
    }

    #[test]
    fn breaks_split_polylines() {
        let s = Series {
            label: "s".into(),
            style: LineStyle::Dashed,
            points: vec![
                Some((0.0, 0.0)),
                Some((1.0, 1.0)),
                None,
                Some((2.0, 0.0)),
                Some((3.0, 1.0)),
            ],
        };
        let svg = emit_svg(&figure(vec![s])).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("stroke-dasharray=\"8 5\"").count(), 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("width=\"800\" height=\"600\""));
    }

    #[test]
    fn nice_ticks() {
        assert_eq!(nice_step(0.13), 0.2);
        assert_eq!(nice_step(3.0), 5.0);
        let (t, d) = ticks(-0.05, 1.05);
        assert_eq!(d, 1);
        assert_eq!(t.len(), 6);
    }
}
