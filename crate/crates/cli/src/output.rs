//! CSV, SVG and PGM writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use krr_core::analysis::SpectrumReport;

use crate::error::{config, io_error, Result};
use crate::experiment::ExperimentRecord;

pub const CSV_HEADER: [&str; 12] = [
    "problem",
    "solver",
    "shift",
    "noise_percent",
    "assumed_noise_percent",
    "seed",
    "iterations",
    "stop_reason",
    "final_error",
    "final_residual",
    "min_error_iteration",
    "min_error",
];

/// Scientific notation with six significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.5e}")
}

fn csv_writer<W: std::io::Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> Result<Vec<u8>> {
    let mut w = csv_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.problem.clone(),
            r.solver.clone(),
            r.shift.to_string(),
            format_real(r.noise_percent),
            format_real(r.assumed_noise_percent),
            r.seed.to_string(),
            r.iterations.to_string(),
            r.stop_reason.as_str().to_string(),
            format_real(r.final_error),
            format_real(r.final_residual),
            r.min_error_iteration.to_string(),
            format_real(r.min_error),
        ])?;
    }
    into_bytes(w)
}

/// Long format: one row per singular value.
pub fn spectra_to_csv(reports: &[SpectrumReport]) -> Result<Vec<u8>> {
    let mut w = csv_writer(Vec::new());
    w.write_record(["method", "shift", "index", "sigma", "relative_sigma"])?;
    for r in reports {
        let first = r.singular_values.first().copied().unwrap_or(1.0);
        for (i, &s) in r.singular_values.iter().enumerate() {
            w.write_record([
                r.method.clone(),
                r.shift.to_string(),
                (i + 1).to_string(),
                format_real(s),
                format_real(s / first),
            ])?;
        }
    }
    into_bytes(w)
}

fn into_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| io_error("flush", Path::new("<csv buffer>"), e.into_error()))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_error("write", path, e))
}

/// Binary PGM bytes for a row-major `h x w` image with values in `[0, 1]`.
///
/// Values outside the range are clamped; NaN maps to 0. Quantization is
/// `round(255 v)` with halves rounded up.
pub fn encode_pgm(image: &[f64], (h, w): (usize, usize)) -> Result<Vec<u8>> {
    if image.len() != h * w {
        return Err(config(format!(
            "image has {} pixels, expected {h}x{w} = {}",
            image.len(),
            h * w
        )));
    }
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.extend(image.iter().map(|&v| {
        let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        (255.0 * v + 0.5).floor() as u8
    }));
    Ok(out)
}

pub fn emit_pgm(image: &[f64], dims: (usize, usize), path: &Path) -> Result<()> {
    write_file(path, &encode_pgm(image, dims)?)
}

/// Reorders a column-major `h x w` image into row-major order.
pub fn column_major_to_row_major(image: &[f64], (h, w): (usize, usize)) -> Vec<f64> {
    debug_assert_eq!(image.len(), h * w);
    (0..h)
        .flat_map(|r| (0..w).map(move |c| image[r + c * h]))
        .collect()
}

pub struct Series<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

/// Line chart with a log10 y-axis. Series share the x-axis `1..=len`;
/// non-positive or non-finite points are left out.
pub fn line_chart_svg(title: &str, x_label: &str, series: &[Series<'_>]) -> String {
    let usable = |v: &f64| v.is_finite() && *v > 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in series
        .iter()
        .flat_map(|s| s.values.iter())
        .filter(|v| usable(v))
    {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if lo > hi {
        (lo, hi) = (0.0, 1.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil().max(lo.floor() + 1.0));
    let x_max = series
        .iter()
        .map(|s| s.values.len())
        .max()
        .unwrap_or(1)
        .max(2) as f64;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |i: f64| LEFT + (i - 1.0) / (x_max - 1.0) * plot_w;
    let py = |v: f64| TOP + (hi - v.log10()) / (hi - lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    let decades = (hi - lo) as i32;
    let stride = (decades / 8 + 1).max(1);
    for k in (0..=decades).step_by(stride as usize) {
        let e = lo as i32 + k;
        let y = py(10f64.powi(e));
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let x_step = ((x_max / 8.0).ceil() as usize).max(1);
    let mut tick = 1;
    while tick as f64 <= x_max {
        let x = px(tick as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{tick}</text>"#,
            TOP + plot_h + 16.0
        );
        tick += x_step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut segments: Vec<Vec<String>> = vec![Vec::new()];
        for (i, v) in s.values.iter().enumerate() {
            if usable(v) {
                segments.last_mut().expect("non-empty").push(format!(
                    "{:.2},{:.2}",
                    px(i as f64 + 1.0),
                    py(*v)
                ));
            } else if !segments.last().expect("non-empty").is_empty() {
                segments.push(Vec::new());
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                seg.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
