//! Convergence plots as standalone SVG: best-so-far value against
//! evaluation index, one polyline per trace.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::trace::read_trace_file;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub title: Option<String>,
    /// Plot log10 of the values; ignored unless every value is positive.
    pub log_scale: bool,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            title: None,
            log_scale: false,
            width: 800.0,
            height: 500.0,
        }
    }
}

/// Line colors, cycled.
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders labelled series of (iteration, value) points.
pub fn render_svg(series: &[(String, Vec<(f64, f64)>)], opts: &PlotOptions) -> String {
    let all = || series.iter().flat_map(|(_, pts)| pts.iter());
    let log = opts.log_scale && all().all(|&(_, v)| v > 0.0);
    let tf = |v: f64| if log { v.log10() } else { v };

    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(i, v) in all() {
        x0 = x0.min(i);
        x1 = x1.max(i);
        y0 = y0.min(tf(v));
        y1 = y1.max(tf(v));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        let pad = if y0 == 0.0 { 1.0 } else { y0.abs() * 0.1 };
        y0 -= pad;
        y1 += pad;
    }

    let pw = opts.width - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = opts.height - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |i: f64| MARGIN_LEFT + (i - x0) / (x1 - x0) * pw;
    let sy = |v: f64| MARGIN_TOP + (y1 - tf(v)) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = opts.width,
        h = opts.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(t) = &opts.title {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            escape(t)
        );
    }
    // Axes and ticks.
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/></g>"#,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + pw,
        t = MARGIN_TOP,
        b = MARGIN_TOP + ph
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let ylabel = if log {
            format!("1e{yv:.1}")
        } else {
            format!("{yv:.3e}")
        };
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.0}</text>"#,
            MARGIN_LEFT + f * pw,
            MARGIN_TOP + ph + 18.0,
            xv
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            MARGIN_TOP + (1.0 - f) * ph + 4.0,
            ylabel
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">evaluation</text>"#,
        MARGIN_LEFT + pw / 2.0,
        opts.height - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">best value{}</text>"#,
        MARGIN_TOP + ph / 2.0,
        MARGIN_TOP + ph / 2.0,
        if log { " (log10)" } else { "" }
    );

    for (n, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(i, v)| format!("{:.3},{:.3}", sx(i), sy(v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-label="{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            escape(label),
            color,
            coords.join(" ")
        );
    }

    let lx = MARGIN_LEFT + pw + 15.0;
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (n, (label, _)) in series.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 18.0 * n as f64;
        let color = PALETTE[n % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            y + 4.0,
            escape(label)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

/// Reads each trace and writes a plot of its `y_best` column to `out`,
/// labelling lines by file stem. Writes nothing when `traces` is empty or
/// any trace fails to parse.
pub fn emit_convergence_plot(
    traces: &[PathBuf],
    out: &Path,
    opts: &PlotOptions,
) -> Result<(), HarnessError> {
    if traces.is_empty() {
        return Err(HarnessError::Config("no trace files given to plot".into()));
    }
    let mut series = Vec::with_capacity(traces.len());
    for p in traces {
        let t = read_trace_file(p)?;
        let label = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string());
        let pts = t
            .records
            .iter()
            .filter(|r| r.y_best.is_finite())
            .map(|r| (r.iter as f64, r.y_best))
            .collect();
        series.push((label, pts));
    }
    std::fs::write(out, render_svg(&series, opts)).map_err(|e| HarnessError::io(out, e))
}
