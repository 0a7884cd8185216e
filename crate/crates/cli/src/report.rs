//! Run reports and their two renderings.
//!
//! The structured rendering is pretty-printed JSON with the top-level fields
//! `scenario`, `seed`, `steps`, `verdicts` and `tables`. Maps are ordered by
//! key and every float is rounded to 12 significant digits, so a report is
//! byte-identical across runs of the same scenario.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Formats with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor();
    if !(-4.0..12.0).contains(&magnitude) {
        return format!("{x:.11e}");
    }
    let decimals = (11.0 - magnitude) as usize;
    format!("{x:.decimals$}")
}

/// `re + im i` with 12 significant digits per part.
pub fn fmt12_complex(re: f64, im: f64) -> String {
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{} {sign} {}i", fmt12(re), fmt12(im.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn float(x: f64) -> Self {
        Cell::Float(round12(x))
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt12(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub action: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub steps: Vec<Step>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub tables: BTreeMap<String, Table>,
}

impl RunReport {
    pub fn new(scenario: &Scenario) -> Self {
        Self {
            scenario: scenario.clone(),
            seed: scenario.seed,
            steps: Vec::new(),
            verdicts: BTreeMap::new(),
            tables: BTreeMap::new(),
        }
    }

    pub fn step(&mut self, action: &str, detail: impl Into<String>) {
        self.steps.push(Step {
            action: action.to_string(),
            detail: detail.into(),
        });
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.insert(
            name.to_string(),
            Verdict {
                pass,
                detail: detail.into(),
            },
        );
    }

    pub fn table(&mut self, name: &str, table: Table) {
        self.tables.insert(name.to_string(), table);
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }
}

pub fn emit_report(report: &RunReport, format: Format) -> String {
    match format {
        Format::Structured => {
            let mut out = serde_json::to_string_pretty(report).expect("reports serialize");
            out.push('\n');
            out
        }
        Format::Text => render_text(report),
    }
}

fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {} (seed {})",
        report.scenario.kind, report.seed
    );
    let parameters = toml::to_string(&report.scenario.parameters).unwrap_or_default();
    for line in parameters.lines().filter(|l| !l.is_empty()) {
        let _ = writeln!(out, "  {line}");
    }

    let _ = writeln!(out, "\nsteps");
    for (i, step) in report.steps.iter().enumerate() {
        let _ = writeln!(out, "  {:>3}. {}: {}", i + 1, step.action, step.detail);
    }

    for (name, table) in &report.tables {
        let _ = writeln!(out, "\ntable {name}");
        let cells: Vec<Vec<String>> = table
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::render).collect())
            .collect();
        let widths: Vec<usize> = table
            .columns
            .iter()
            .enumerate()
            .map(|(c, title)| {
                cells
                    .iter()
                    .map(|r| r[c].len())
                    .fold(title.len(), usize::max)
            })
            .collect();
        let line = |row: &[String]| {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            format!("  {}", padded.join("  "))
        };
        let _ = writeln!(out, "{}", line(&table.columns));
        for row in &cells {
            let _ = writeln!(out, "{}", line(row));
        }
    }

    let _ = writeln!(out, "\nverdicts");
    for (name, v) in &report.verdicts {
        let mark = if v.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "  {mark} {name}: {}", v.detail);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioKind;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(0.5), "0.500000000000");
        assert_eq!(fmt12(0.5392), "0.539200000000");
        assert_eq!(fmt12(7.0), "7.00000000000");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(2.5e-17), "2.50000000000e-17");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12_complex(0.6, -0.8), "0.600000000000 - 0.800000000000i");
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(0.1 + 0.2), 0.3);
    }

    #[test]
    fn structured_fields_are_fixed() {
        let mut r = RunReport::new(&Scenario::new(ScenarioKind::LeakageSweep, 9));
        r.step("deal", "3 parties");
        r.verdict("ok", true, "fine");
        let mut t = Table::new(&["subset_size", "purity"]);
        t.push(vec![1usize.into(), 0.1f64.into()]);
        r.table("leakage", t);
        let json: serde_json::Value =
            serde_json::from_str(&emit_report(&r, Format::Structured)).unwrap();
        let keys: Vec<&str> = json
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(keys, ["scenario", "seed", "steps", "tables", "verdicts"]);
        assert_eq!(json["tables"]["leakage"]["rows"][0][1], 0.1);
        assert_eq!(json["scenario"]["kind"], "leakage-sweep");
    }

    #[test]
    fn text_lists_verdicts() {
        let mut r = RunReport::new(&Scenario::new(ScenarioKind::HidingTest, 1));
        r.verdict("hiding-perfect", false, "difference 0.7");
        let text = emit_report(&r, Format::Text);
        assert!(text.starts_with("scenario hiding-test (seed 1)"));
        assert!(text.contains("FAIL hiding-perfect: difference 0.7"));
        assert!(!r.all_pass());
    }
}
