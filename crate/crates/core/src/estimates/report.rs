//! Scan reports: checks against targets, verdicts, provenance and exports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::time::Duration;

use serde::Serialize;

use crate::error::Result;
use crate::serde_util::{serialize_extended, serialize_extended_vec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The numerics could not settle the question (tail too large, cutoff
    /// doubling not converged).
    Inconclusive,
    /// A pass at coarse resolution turned into a fail after refinement.
    Unstable,
    /// Recorded for reference, no claim is tested.
    ReportOnly,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Unstable => "unstable",
            Verdict::ReportOnly => "report-only",
        }
    }

    /// Combines a coarse and a refined verdict of the same scan.
    pub fn refine(coarse: Verdict, fine: Verdict) -> Verdict {
        match (coarse, fine) {
            (Verdict::Pass, Verdict::Fail) => Verdict::Unstable,
            (_, f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `|observed − target| ≤ tolerance`.
    Within,
    /// `observed ≤ target`.
    AtMost,
    /// `observed ≥ target`.
    AtLeast,
}

/// One numeric comparison inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    #[serde(serialize_with = "serialize_extended")]
    pub observed: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn within(name: &str, observed: f64, target: f64, tolerance: f64) -> Self {
        Self::make(name, CheckKind::Within, observed, target, tolerance)
    }

    pub fn at_most(name: &str, observed: f64, bound: f64) -> Self {
        Self::make(name, CheckKind::AtMost, observed, bound, 0.0)
    }

    pub fn at_least(name: &str, observed: f64, bound: f64) -> Self {
        Self::make(name, CheckKind::AtLeast, observed, bound, 0.0)
    }

    fn make(name: &str, kind: CheckKind, observed: f64, target: f64, tolerance: f64) -> Self {
        let pass = observed.is_finite()
            && match kind {
                CheckKind::Within => (observed - target).abs() <= tolerance,
                CheckKind::AtMost => observed <= target,
                CheckKind::AtLeast => observed >= target,
            };
        Self {
            name: name.to_string(),
            kind,
            observed,
            target,
            tolerance,
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamRange {
    pub name: String,
    #[serde(serialize_with = "serialize_extended_vec")]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub name: String,
    pub scan: String,
    pub scenario: String,
    pub ranges: Vec<ParamRange>,
    /// Headline number: a supremum or a fitted slope.
    #[serde(serialize_with = "serialize_extended")]
    pub observed: f64,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub provenance: BTreeMap<String, serde_json::Value>,
    pub columns: Vec<String>,
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
    /// Wall time, kept out of the JSON so reports stay reproducible.
    #[serde(skip)]
    pub runtime: Duration,
    #[serde(skip)]
    inconclusive: bool,
    #[serde(skip)]
    report_only: bool,
}

impl ScanReport {
    pub fn new(name: &str, scan: &str, scenario: &str) -> Self {
        Self {
            name: name.to_string(),
            scan: scan.to_string(),
            scenario: scenario.to_string(),
            ranges: Vec::new(),
            observed: f64::NAN,
            checks: Vec::new(),
            verdict: Verdict::Fail,
            notes: Vec::new(),
            provenance: BTreeMap::new(),
            columns: Vec::new(),
            samples: Vec::new(),
            runtime: Duration::ZERO,
            inconclusive: false,
            report_only: false,
        }
    }

    pub fn range(&mut self, name: &str, values: &[f64]) -> &mut Self {
        self.ranges.push(ParamRange {
            name: name.to_string(),
            values: values.to_vec(),
        });
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn provenance(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.provenance.insert(key.to_string(), v);
        self
    }

    pub fn mark_inconclusive(&mut self, why: impl Into<String>) -> &mut Self {
        self.inconclusive = true;
        self.note(why)
    }

    pub fn mark_report_only(&mut self) -> &mut Self {
        self.report_only = true;
        self
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Sets the verdict from the checks and flags. Deterministic in the
    /// recorded numbers.
    pub fn finish(&mut self) -> &mut Self {
        self.verdict = if self.report_only {
            Verdict::ReportOnly
        } else if self.inconclusive {
            Verdict::Inconclusive
        } else if !self.checks.is_empty() && self.checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass | Verdict::ReportOnly)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.samples {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Aligned text table, one row per check.
pub fn text_table(reports: &[ScanReport]) -> String {
    let mut rows = vec![[
        "scan".to_string(),
        "check".to_string(),
        "observed".to_string(),
        "target".to_string(),
        "tol".to_string(),
        "verdict".to_string(),
    ]];
    for r in reports {
        if r.checks.is_empty() {
            rows.push([
                r.name.clone(),
                "-".into(),
                format!("{:.6e}", r.observed),
                "-".into(),
                "-".into(),
                r.verdict.as_str().into(),
            ]);
        }
        for c in &r.checks {
            let target = match c.kind {
                CheckKind::Within => format!("{:.6e}", c.target),
                CheckKind::AtMost => format!("<= {:.6e}", c.target),
                CheckKind::AtLeast => format!(">= {:.6e}", c.target),
            };
            rows.push([
                r.name.clone(),
                c.name.clone(),
                format!("{:.6e}", c.observed),
                target,
                format!("{:.1e}", c.tolerance),
                if c.pass { r.verdict.as_str().into() } else { "fail".into() },
            ]);
        }
    }
    let mut widths = [0usize; 6];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
