//! Reproduction report and charge-budget runs, with tolerances taken from a
//! bundled manifest so every verdict can be audited.

mod budget;
mod paper;

use std::fmt;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::{Error, Result, UncertainQuantity};

pub use budget::{run_budget, BudgetReport, BudgetTarget, Sweep};
pub use paper::{reproduce_paper, PaperReport, DOCUMENTED_MISMATCHES};

const MANIFEST: &str = include_str!("../../data/report_manifest.toml");

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRow {
    pub id: String,
    pub quantity: String,
    pub paper: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub range: Option<[f64; 2]>,
    #[serde(default)]
    pub documented: bool,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    row: Vec<ManifestRow>,
}

/// Declared tolerance of one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
    Range(f64, f64),
}

impl ManifestRow {
    pub fn tolerance(&self) -> Option<Tolerance> {
        match (self.rel_tol, self.abs_tol, self.range) {
            (Some(r), None, None) => Some(Tolerance::Relative(r)),
            (None, Some(a), None) => Some(Tolerance::Absolute(a)),
            (None, None, Some([lo, hi])) => Some(Tolerance::Range(lo, hi)),
            _ => None,
        }
    }
}

pub fn manifest() -> Result<Vec<ManifestRow>> {
    let m: Manifest = toml::from_str(MANIFEST).map_err(|e| Error::Schema(e.to_string()))?;
    for r in &m.row {
        if r.paper.is_some() && r.tolerance().is_none() {
            return Err(Error::Schema(format!(
                "manifest row {}: exactly one of rel_tol, abs_tol, range is required",
                r.id
            )));
        }
    }
    Ok(m.row)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Match,
    MismatchDocumented,
    /// Outside tolerance and not a known discrepancy.
    Mismatch,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Match => "MATCH",
            Status::MismatchDocumented => "MISMATCH-DOCUMENTED",
            Status::Mismatch => "MISMATCH",
            Status::NotApplicable => "N/A",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub id: String,
    pub quantity: String,
    pub computed: UncertainQuantity,
    pub paper: Option<f64>,
    /// `computed/paper − 1`.
    pub deviation: Option<f64>,
    pub status: Status,
    pub note: String,
}

impl ReportRow {
    pub fn evaluate(spec: &ManifestRow, computed: UncertainQuantity) -> Self {
        let v = computed.value();
        let (deviation, status) = match (spec.paper, spec.tolerance()) {
            (Some(p), Some(tol)) => {
                let within = match tol {
                    Tolerance::Relative(r) => (v / p - 1.0).abs() <= r,
                    Tolerance::Absolute(a) => (v - p).abs() <= a,
                    Tolerance::Range(lo, hi) => (lo..=hi).contains(&v),
                };
                let status = match (within, spec.documented) {
                    (true, _) => Status::Match,
                    (false, true) => Status::MismatchDocumented,
                    (false, false) => Status::Mismatch,
                };
                (Some(v / p - 1.0), status)
            }
            _ => (None, Status::NotApplicable),
        };
        ReportRow {
            id: spec.id.clone(),
            quantity: spec.quantity.clone(),
            computed,
            paper: spec.paper,
            deviation,
            status,
            note: spec.note.clone(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:e}"))
}

/// CSV with one row per quantity; values in SI units named in `unit`.
pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from("id,quantity,unit,computed,sigma,paper,rel_deviation,status,note\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{:e},{},{},{},{}",
            r.id,
            csv_field(&r.quantity),
            csv_field(r.computed.dimension().unit()),
            r.computed.value(),
            r.computed.sigma(),
            opt(r.paper),
            opt(r.deviation),
            r.status,
            csv_field(&r.note)
        );
    }
    out
}

/// Fixed-width text table.
pub fn rows_to_text(rows: &[ReportRow]) -> String {
    let width = rows.iter().map(|r| r.quantity.chars().count()).max().unwrap_or(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>24}  {:>11}  {:>9}  status",
        "quantity", "computed", "paper", "dev"
    );
    for r in rows {
        let unit = r.computed.dimension().unit();
        let computed = if r.computed.sigma() > 0.0 {
            format!("{:.4e}±{:.2e}", r.computed.value(), r.computed.sigma())
        } else {
            format!("{:.4e}", r.computed.value())
        };
        let pad = width - r.quantity.chars().count();
        let _ = writeln!(
            out,
            "{}{}  {:>24}  {:>11}  {:>9}  {} [{unit}]",
            r.quantity,
            " ".repeat(pad),
            computed,
            r.paper.map_or("-".into(), |p| format!("{p:.3e}")),
            r.deviation.map_or("-".into(), |d| format!("{:+.2}%", 100.0 * d)),
            r.status
        );
    }
    out
}
