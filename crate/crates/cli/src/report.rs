//! Rendering of command results: CSV, JSON with manifest, and plot data.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::args::Format;

pub const SCHEMA: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Everything a command produces.
pub struct Report {
    pub command: String,
    pub provenance: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub result: Value,
    pub plot: Vec<(f64, f64)>,
    /// One human-readable line, written to stderr.
    pub summary: String,
    /// Set when the result itself breaks a checked invariant (exit code 2).
    pub violation: Option<String>,
}

/// `%.17g`: 17 significant digits, trailing zeros trimmed, C-style exponent.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn render_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => fmt_g17(*v),
        Cell::Text(t) => {
            if t.contains([',', '"', '\n']) {
                format!("\"{}\"", t.replace('"', "\"\""))
            } else {
                t.clone()
            }
        }
        Cell::Empty => String::new(),
    }
}

pub fn render_csv(report: &Report) -> String {
    let mut out = report.header.join(",");
    out.push('\n');
    for row in &report.rows {
        let line: Vec<String> = row.iter().map(render_cell).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn render_plot(report: &Report) -> String {
    let mut out = String::new();
    for (n, v) in &report.plot {
        let _ = writeln!(out, "{}\t{}", fmt_g17(*n), fmt_g17(*v));
    }
    out
}

/// Run metadata. The timestamp honours `SOURCE_DATE_EPOCH` for reproducible files.
pub fn manifest(report: &Report, parameters: Map<String, Value>, seed: Option<u64>) -> Value {
    let timestamp = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|t| chrono::DateTime::from_timestamp(t, 0))
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    json!({
        "command": report.command,
        "parameters": parameters,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "timestamp": timestamp,
        "provenance": report.provenance,
    })
}

pub fn render_json(report: &Report, manifest: Value) -> String {
    let doc = json!({
        "schema": SCHEMA,
        "manifest": manifest,
        "result": report.result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes the rendered report to `out` (plus a manifest sidecar for CSV files) or stdout.
pub fn emit(
    report: &Report,
    format: Format,
    plot: bool,
    out: Option<&Path>,
    manifest: Value,
) -> std::io::Result<()> {
    let body = if plot {
        render_plot(report)
    } else {
        match format {
            Format::Csv => render_csv(report),
            Format::Json => render_json(report, manifest.clone()),
        }
    };
    match out {
        Some(path) => {
            std::fs::write(path, body)?;
            if plot || format == Format::Csv {
                let mut side = path.as_os_str().to_owned();
                side.push(".manifest.json");
                let doc = json!({ "schema": SCHEMA, "manifest": manifest });
                let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
                s.push('\n');
                std::fs::write(side, s)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
