//! Minimal deterministic SVG line charts from sweep CSVs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

/// Smallest value drawn on a log axis; lower values are clamped to it.
pub const LOG_FLOOR: f64 = 1e-12;

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Reads `x_col` and each of `y_cols`; empty or non-numeric cells are skipped.
pub fn read_series(csv_path: &Path, x_col: &str, y_cols: &[String]) -> CliResult<Vec<Series>> {
    let mut rdr = csv::Reader::from_path(csv_path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => CliError::io(csv_path, std::io::Error::other(e.to_string())),
        _ => CliError::Csv(e),
    })?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| CliError::Config(format!("missing column '{name}'")))
    };
    let xi = col(x_col)?;
    let yi: Vec<usize> = y_cols.iter().map(|c| col(c)).collect::<CliResult<_>>()?;
    let mut series: Vec<Series> = y_cols.iter().map(|n| Series { name: n.clone(), points: Vec::new() }).collect();
    for rec in rdr.records() {
        let rec = rec?;
        let Some(x) = rec.get(xi).and_then(|s| s.parse::<f64>().ok()) else { continue };
        for (s, &i) in series.iter_mut().zip(&yi) {
            if let Some(y) = rec.get(i).and_then(|s| s.parse::<f64>().ok()).filter(|y| y.is_finite()) {
                s.points.push((x, y));
            }
        }
    }
    Ok(series)
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-300);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

/// Renders the chart; returns warnings (e.g. clamped values).
pub fn render(series: &[Series], x_label: &str, log_y: bool) -> (String, Vec<String>) {
    let mut warnings = Vec::new();
    let map_y = |y: f64, warnings: &mut Vec<String>, name: &str| {
        if log_y {
            if y < LOG_FLOOR {
                warnings.push(format!("{name}: value {y:e} clamped to {LOG_FLOOR:e} on log axis"));
            }
            y.max(LOG_FLOOR).log10()
        } else {
            y
        }
    };
    let mut mapped: Vec<Vec<(f64, f64)>> = Vec::new();
    for s in series {
        mapped.push(s.points.iter().map(|&(x, y)| (x, map_y(y, &mut warnings, &s.name))).collect());
    }
    let all: Vec<(f64, f64)> = mapped.iter().flatten().copied().collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if log_y {
        (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    } else if y1 - y0 <= 0.0 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for t in nice_ticks(x0, x1) {
        let x = px(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{t}</text>"#, TOP + ph + 18.0);
    }
    let yticks: Vec<f64> = if log_y { (y0 as i64..=y1 as i64).map(|k| k as f64).collect() } else { nice_ticks(y0, y1) };
    for t in yticks {
        let y = py(t);
        let label = if log_y { format!("1e{t}") } else { format!("{t}") };
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{label}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{x_label}</text>"#, LEFT + pw / 2.0, H - 10.0);
    for (k, (ser, pts)) in series.iter().zip(&mapped).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if pts.len() >= 2 {
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        } else {
            for &(x, y) in pts {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(x), py(y));
            }
        }
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let lx = LEFT + pw + 10.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11">{}</text>"#, lx + 24.0, ly + 4.0, ser.name);
    }
    s.push_str("</svg>\n");
    (s, warnings)
}

/// Reads the CSV, renders, and writes `out`.
pub fn render_svg(csv_path: &Path, x_col: &str, y_cols: &[String], log_y: bool, out: &Path) -> CliResult<Vec<String>> {
    let series = read_series(csv_path, x_col, y_cols)?;
    let (svg, warnings) = render(&series, x_col, log_y);
    std::fs::write(out, svg).map_err(|e| CliError::io(out, e))?;
    Ok(warnings)
}
