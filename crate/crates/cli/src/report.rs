//! Validation report: named checks with measured deviations and tolerances,
//! rendered as a text table and as JSON.

use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// Canonical rendering of the resolved configuration the checks ran
    /// under, for replayability.
    pub config: String,
    pub rows: Vec<CheckRow>,
    pub overall_pass: bool,
}

/// Collects check rows; `tolerance_scale` is 1.0 in normal operation and 0.0
/// under the hidden corruption hook used to exercise the failure path.
pub struct ReportBuilder {
    rows: Vec<CheckRow>,
    tolerance_scale: f64,
}

impl ReportBuilder {
    pub fn new(tolerance_scale: f64) -> Self {
        Self {
            rows: Vec::new(),
            tolerance_scale,
        }
    }

    pub fn check(&mut self, name: &str, measured: f64, tolerance: f64) {
        let tolerance = tolerance * self.tolerance_scale;
        self.rows.push(CheckRow {
            name: name.to_string(),
            measured,
            tolerance,
            pass: measured <= tolerance,
        });
    }

    pub fn finish(self, config: String) -> ValidationReport {
        let overall_pass = self.rows.iter().all(|r| r.pass);
        ValidationReport {
            config,
            rows: self.rows,
            overall_pass,
        }
    }
}

impl ValidationReport {
    pub fn render_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.name.len())
            .max()
            .unwrap_or(8)
            .max("check".len());
        let mut out = String::new();
        writeln!(out, "{:<width$}  {:>13}  {:>13}  status", "check", "measured", "tolerance").unwrap();
        for row in &self.rows {
            writeln!(
                out,
                "{:<width$}  {:>13.6e}  {:>13.6e}  {}",
                row.name,
                row.measured,
                row.tolerance,
                if row.pass { "pass" } else { "FAIL" }
            )
            .unwrap();
        }
        writeln!(
            out,
            "overall: {}",
            if self.overall_pass { "PASS" } else { "FAIL" }
        )
        .unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
