//! Run reports and the files they are written to.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use riselab_core::StepFunction;
use serde::Serialize;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{LabError, LabResult};
use crate::records::CheckRecord;

pub const CHECKS_HEADER: &str = "scenario,seed,check,max_violation,tolerance,pass";
pub const VALUES_HEADER: &str = "scenario,seed,L_variant,value,bound,pass";

/// A computed quantity next to the bound it is compared with.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueRecord {
    pub seed: u64,
    pub variant: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    /// The graph of a left-continuous step function on `(0, V]`.
    pub fn step(label: impl Into<String>, f: &StepFunction) -> Self {
        let mut points = Vec::with_capacity(2 * f.values().len());
        for (w, v) in f.breakpoints().windows(2).zip(f.values()) {
            points.push((w[0], *v));
            points.push((w[1], *v));
        }
        Series { label: label.into(), points }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    /// File stem under the output directory.
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: Scenario,
    pub checks: Vec<CheckRecord>,
    pub values: Vec<ValueRecord>,
    pub figures: Vec<Figure>,
}

impl RunReport {
    pub fn new(scenario: Scenario) -> Self {
        RunReport { scenario, checks: Vec::new(), values: Vec::new(), figures: Vec::new() }
    }

    /// True iff every per-seed check passed; exploratory runs always pass.
    pub fn passed(&self) -> bool {
        self.scenario.is_exploratory() || self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }
}

/// Floats print in their shortest round-trip form.
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn checks_csv(report: &RunReport) -> String {
    let mut out = String::from(CHECKS_HEADER);
    out.push('\n');
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            report.scenario,
            c.seed,
            c.check,
            num(c.max_violation),
            num(c.tolerance),
            c.pass
        );
    }
    out
}

pub fn values_csv(report: &RunReport) -> String {
    let mut out = String::from(VALUES_HEADER);
    out.push('\n');
    for v in &report.values {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            report.scenario,
            v.seed,
            v.variant,
            num(v.value),
            num(v.bound),
            v.pass
        );
    }
    out
}

/// Reads back the output of [`checks_csv`].
pub fn parse_checks_csv(text: &str) -> Result<(Option<Scenario>, Vec<CheckRecord>), String> {
    let mut lines = text.lines();
    if lines.next() != Some(CHECKS_HEADER) {
        return Err("missing or unexpected header".into());
    }
    let mut scenario = None;
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let [sc, seed, check, violation, tolerance, pass] = fields[..] else {
            return Err(format!("line {}: expected 6 fields", i + 2));
        };
        let err = |what: &str| format!("line {}: bad {what}", i + 2);
        scenario = Some(sc.parse::<Scenario>()?);
        records.push(CheckRecord {
            check: check.to_string(),
            seed: seed.parse().map_err(|_| err("seed"))?,
            max_violation: violation.parse().map_err(|_| err("max_violation"))?,
            tolerance: tolerance.parse().map_err(|_| err("tolerance"))?,
            pass: pass.parse().map_err(|_| err("pass"))?,
        });
    }
    Ok((scenario, records))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A static line chart.
pub fn render_svg(fig: &Figure) -> String {
    let all = fig.series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        x1 = x0 + 1.0;
    }
    if !(y0 < y1) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(&fig.title));
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#);
    for (v, x, y, anchor) in [
        (x0, left, bottom + 15.0, "start"),
        (x1, right, bottom + 15.0, "end"),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" font-size="11" text-anchor="{anchor}">{}</text>"#, short(v));
    }
    for (v, y) in [(y0, bottom), (y1, top)] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="11" text-anchor="end">{}</text>"#, left - 4.0, short(v));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(&fig.x_label)
    );
    for (k, series) in fig.series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = top + 14.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" font-size="11" fill="{colour}" text-anchor="end">{}</text>"#,
            right,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn short(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Serialize)]
struct RunStamp<'a> {
    program: &'static str,
    version: &'static str,
    scenario: &'a str,
    dim: usize,
    grid: usize,
    base_seed: u64,
    seeds: u64,
    dt: f64,
    config: &'a ScenarioConfig,
    checks: usize,
    failures: usize,
    pass: bool,
}

/// Writes `checks.csv`, `values.csv` (when there are values), `run.json`
/// and one SVG per figure. Returns the paths written.
pub fn write_report(report: &RunReport, config: &ScenarioConfig, dir: &Path) -> LabResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> LabResult<()> {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| LabError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put("checks.csv", checks_csv(report))?;
    if !report.values.is_empty() {
        put("values.csv", values_csv(report))?;
    }
    let stamp = RunStamp {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: report.scenario.name(),
        dim: config.dim,
        grid: config.grid,
        base_seed: config.base_seed,
        seeds: config.seeds,
        dt: config.dt,
        config,
        checks: report.checks.len(),
        failures: report.failures(),
        pass: report.passed(),
    };
    let mut json = serde_json::to_string_pretty(&stamp).expect("stamp serializes");
    json.push('\n');
    put("run.json", json)?;
    for fig in &report.figures {
        put(&format!("{}.svg", fig.name), render_svg(fig))?;
    }
    Ok(written)
}
