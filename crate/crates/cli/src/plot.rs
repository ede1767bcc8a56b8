//! Minimal deterministic SVG plots: line overlays and stick spectra.
//!
//! Hand-rolled on purpose — the artifacts are simple static curves, and
//! emitting the SVG directly keeps the output byte-stable across runs and
//! toolchains.

use nucavity::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 58.0;
const PALETTE: [&str; 4] = ["#1f6feb", "#d73a49", "#2da44e", "#8250df"];

pub struct Curve {
    pub label: String,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    log_y: bool,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let t = if self.log_y { v.log10() } else { v };
        HEIGHT
            - MARGIN_B
            - (t - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    /// Clamp a raw y value into the plottable domain (log floors at y_min).
    fn clamp_y(&self, v: f64) -> f64 {
        if self.log_y {
            let floor = 10f64.powf(self.y_min);
            if v > floor {
                v
            } else {
                floor
            }
        } else {
            v
        }
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn axes(out: &mut String, frame: &Frame, title: &str, x_label: &str, y_label: &str) {
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<rect x=\"{x0}\" y=\"{y1}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        x1 - x0,
        y0 - y1
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        0.5 * (x0 + x1),
        escape(title)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
        0.5 * (x0 + x1),
        HEIGHT - 14.0,
        escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 {})\">{}</text>\n",
        0.5 * (y0 + y1),
        0.5 * (y0 + y1),
        escape(y_label)
    ));
    // Ticks: 6 per axis in the transformed coordinates.
    for k in 0..=5 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * k as f64 / 5.0;
        let px = frame.x(fx);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{y0}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            y0 + 19.0,
            fmt_tick(fx)
        ));
        let fy = frame.y_min + (frame.y_max - frame.y_min) * k as f64 / 5.0;
        let label = if frame.log_y {
            format!("1e{}", fmt_tick(fy))
        } else {
            fmt_tick(fy)
        };
        let py = HEIGHT - MARGIN_B - (fy - frame.y_min) / (frame.y_max - frame.y_min) * (HEIGHT - MARGIN_T - MARGIN_B);
        out.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{py:.2}\" x2=\"{}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            x0 - 9.0,
            py + 4.0,
            label
        ));
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_points(curves: &[Curve]) -> Vec<(f64, f64)> {
    curves
        .iter()
        .flat_map(|c| c.points.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .copied()
        .collect()
}

/// Overlayed line curves; `log_y` plots decades of intensity.
pub fn line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    curves: &[Curve],
    log_y: bool,
) -> Result<String> {
    let all = finite_points(curves);
    if all.is_empty() {
        return Err(Error::validation("plot needs at least one finite data point"));
    }
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, _) in &all {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
    }
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let (y_min, y_max) = if log_y {
        let top = all.iter().map(|&(_, y)| y).fold(f64::MIN, f64::max);
        if !(top > 0.0) {
            return Err(Error::validation("log-scale plot needs positive values"));
        }
        // Nine decades below the maximum is the display floor.
        (top.log10().ceil() - 9.0, top.log10().ceil())
    } else {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(_, y) in &all {
            lo = lo.min(y);
            hi = hi.max(y);
        }
        if hi <= lo {
            hi = lo + 1.0;
        }
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    };
    let frame = Frame {
        x_min,
        x_max,
        y_min,
        y_max,
        log_y,
    };

    let mut out = svg_open();
    axes(&mut out, &frame, title, x_label, y_label);
    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if curve.dashed {
            " stroke-dasharray=\"7,4\""
        } else {
            ""
        };
        let pts: Vec<String> = curve
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.x(x), frame.y(frame.clamp_y(y))))
            .collect();
        if pts.is_empty() {
            continue;
        }
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"{dash} points=\"{}\"/>\n",
            pts.join(" ")
        ));
        // Legend entry.
        let ly = MARGIN_T + 16.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_R - 150.0;
        out.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"1.6\"{dash}/>\n",
            lx + 26.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            lx + 32.0,
            ly + 4.0,
            escape(&curve.label)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Vertical sticks from zero, for discrete line spectra.
pub fn stick_plot(title: &str, x_label: &str, y_label: &str, sticks: &[(f64, f64)]) -> Result<String> {
    let finite: Vec<(f64, f64)> = sticks
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .copied()
        .collect();
    if finite.is_empty() {
        return Err(Error::validation("plot needs at least one finite data point"));
    }
    let (mut x_min, mut x_max, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in &finite {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_hi = y_hi.max(y);
    }
    let span = (x_max - x_min).max(1.0);
    let frame = Frame {
        x_min: x_min - 0.08 * span,
        x_max: x_max + 0.08 * span,
        y_min: 0.0,
        y_max: if y_hi > 0.0 { 1.1 * y_hi } else { 1.0 },
        log_y: false,
    };
    let mut out = svg_open();
    axes(&mut out, &frame, title, x_label, y_label);
    for &(x, y) in &finite {
        out.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"{3}\" stroke-width=\"2.2\"/>\n",
            frame.x(x),
            frame.y(0.0),
            frame.y(y),
            PALETTE[0]
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn svg_open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    )
}
