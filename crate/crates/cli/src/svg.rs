//! Minimal SVG 1.1 line plots of CSV columns.
//!
//! Output depends only on the input table and the plot spec; every number is
//! printed with a fixed precision, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub x: String,
    pub y: Vec<String>,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub log_x: bool,
    #[serde(default)]
    pub log_y: bool,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub x_label: String,
    #[serde(default)]
    pub y_label: String,
}

impl PlotSpec {
    pub fn lines(x: &str, y: &[&str]) -> Self {
        PlotSpec {
            x: x.to_string(),
            y: y.iter().map(|s| s.to_string()).collect(),
            group: None,
            log_x: false,
            log_y: false,
            title: String::new(),
            x_label: x.to_string(),
            y_label: y.join(", "),
        }
    }

    pub fn grouped(mut self, column: &str) -> Self {
        self.group = Some(column.to_string());
        self
    }

    pub fn log_x(mut self) -> Self {
        self.log_x = true;
        self
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn titled(mut self, title: &str) -> Self {
        self.title = title.to_string();
        self
    }

    pub fn labelled(mut self, x: &str, y: &str) -> Self {
        self.x_label = x.to_string();
        self.y_label = y.to_string();
        self
    }
}

/// A CSV file with `#` comment lines and a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| CliError::Csv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()
            .map_err(|e| CliError::Csv(e.to_string()))?;
        Ok(Table { headers, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Table::parse(&text)
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::MissingColumn(name.to_string()))
    }

    /// Numeric values of a column; unparsable cells become NaN.
    pub fn numbers(&self, name: &str) -> Result<Vec<f64>> {
        let c = self.column(name)?;
        Ok(self
            .rows
            .iter()
            .map(|r| r.get(c).and_then(|s| s.parse().ok()).unwrap_or(f64::NAN))
            .collect())
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn collect_series(table: &Table, spec: &PlotSpec) -> Result<Vec<Series>> {
    let xs = table.numbers(&spec.x)?;
    let groups: Option<Vec<String>> = match &spec.group {
        Some(g) => {
            let c = table.column(g)?;
            Some(table.rows.iter().map(|r| r.get(c).cloned().unwrap_or_default()).collect())
        }
        None => None,
    };
    let mut out: Vec<Series> = Vec::new();
    for y in &spec.y {
        let ys = table.numbers(y)?;
        for (i, (&x, &v)) in xs.iter().zip(&ys).enumerate() {
            if !(x.is_finite() && v.is_finite()) || (spec.log_x && x <= 0.0) || (spec.log_y && v <= 0.0) {
                continue;
            }
            let label = match (&groups, spec.y.len()) {
                (Some(g), 1) => format!("{} = {}", spec.group.as_deref().unwrap_or(""), g[i]),
                (Some(g), _) => format!("{y}, {} = {}", spec.group.as_deref().unwrap_or(""), g[i]),
                (None, _) => y.clone(),
            };
            match out.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((x, v)),
                None => out.push(Series {
                    label,
                    points: vec![(x, v)],
                }),
            }
        }
    }
    Ok(out)
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-300 {
            let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
            (lo, hi) = (lo - pad, hi + pad);
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        } else {
            let step = nice_step((hi - lo) / 5.0);
            (lo, hi) = ((lo / step).floor() * step, (hi / step).ceil() * step);
        }
        Axis { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let span = (self.hi - self.lo) as i64;
            let stride = (span / 8).max(1);
            (self.lo as i64..=self.hi as i64)
                .filter(|e| (e - self.lo as i64) % stride == 0)
                .map(|e| 10f64.powi(e as i32))
                .collect()
        } else {
            let step = nice_step((self.hi - self.lo) / 5.0);
            let n = ((self.hi - self.lo) / step).round() as i64;
            (0..=n).map(|i| self.lo + step * i as f64).collect()
        }
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `spec` from an in-memory table.
pub fn render(table: &Table, spec: &PlotSpec) -> Result<String> {
    let series = collect_series(table, spec)?;
    let xa = Axis::fit(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), spec.log_x);
    let ya = Axis::fit(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), spec.log_y);
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + pw * xa.frac(x);
    let py = |y: f64| MARGIN_T + ph * (1.0 - ya.frac(y));

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !spec.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            MARGIN_L + pw / 2.0,
            escape(&spec.title)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L:.2}" y="{MARGIN_T:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    for t in xa.ticks() {
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_T + ph,
            MARGIN_T + ph + 5.0,
            MARGIN_T + ph + 19.0,
            tick_label(t)
        );
    }
    for t in ya.ticks() {
        let y = py(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_L - 5.0,
            MARGIN_L - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 15.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0,
        escape(&spec.y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN_T + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Reads a CSV artifact and renders it.
pub fn emit_svg(csv_path: &Path, spec: &PlotSpec) -> Result<String> {
    render(&Table::read(csv_path)?, spec)
}
