//! Run reports and their emitters (json, csv, grid-tsv).
//!
//! The json layout is stable: field names and ordering never depend on the
//! scenario, inapplicable sections are null, and floats render in serde's
//! shortest round-trip form, so identical runs serialize byte-identically
//! (the wall-clock `timing_ms` field is the one exception).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ScenarioConfig;

/// Float rendering used across every emitter.
pub const FLOAT_FORMAT: &str = "shortest-roundtrip";

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("unsupported format `{format}` for scenario kind `{kind}` (grids are produced by frame-family and spin-monopole)")]
    Unsupported { format: String, kind: String },
}

/// One row of the per-state phase table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub j: usize,
    pub alpha: f64,
    pub dynamical: f64,
    pub geometric: f64,
}

/// Determinant verdict as reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub det_re: f64,
    pub det_im: f64,
    pub det_phase: f64,
    pub feasible: bool,
    pub tolerance: f64,
}

/// One named pass/fail measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Full structured result of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: ScenarioConfig,
    pub generator: String,
    pub float_format: String,
    pub phases: Option<Vec<PhaseRow>>,
    pub residual_theorem1: Option<f64>,
    pub residual_theorem1_refined: Option<f64>,
    pub refinement_ratio: Option<f64>,
    pub residual_theorem2: Option<f64>,
    pub mirror_residual: Option<f64>,
    pub bargmann: Option<f64>,
    pub charges: Option<Vec<i64>>,
    pub charge_sum: Option<i64>,
    pub gap_min: Option<f64>,
    pub max_charge_defect: Option<f64>,
    pub verdict: Option<VerdictReport>,
    pub degenerate: Option<bool>,
    pub checks: Vec<CheckLine>,
    pub pass: bool,
    pub timing_ms: u64,
}

/// Plot-ready grid attached to a report: `(a, b, value)` triples.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDoc {
    /// Short name, also the emitted file stem (e.g. `flux_state_0`).
    pub name: String,
    /// Column description for the value column.
    pub value_label: String,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Row-major values, one per (a, b) pair.
    pub values: Vec<f64>,
}

/// Report plus whatever grid data the scenario produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub grids: Vec<GridDoc>,
}

/// One emitted file: name plus full content.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub filename: String,
    pub content: String,
}

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    GridTsv,
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::GridTsv => "grid-tsv",
        }
    }
}

pub fn to_json(report: &RunReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

fn to_csv(report: &RunReport) -> String {
    let mut out = String::from("j,alpha,dynamical,geometric\n");
    if let Some(rows) = &report.phases {
        for row in rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.j, row.alpha, row.dynamical, row.geometric
            ));
        }
    }
    out
}

fn to_grid_tsv(doc: &GridDoc, scenario: &ScenarioConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("# scenario: {}\n", scenario.kind));
    out.push_str(&format!("# value: {}\n", doc.value_label));
    out.push_str("# columns: a\tb\tvalue\n");
    let nb = doc.b.len();
    for (idx, v) in doc.values.iter().enumerate() {
        let (i, k) = (idx / nb, idx % nb);
        out.push_str(&format!("{}\t{}\t{}\n", doc.a[i], doc.b[k], v));
    }
    out
}

/// Render the outcome into one or more documents.
pub fn emit(outcome: &RunOutcome, format: Format) -> Result<Vec<Document>, EmitError> {
    match format {
        Format::Json => Ok(vec![Document {
            filename: "report.json".into(),
            content: to_json(&outcome.report),
        }]),
        Format::Csv => Ok(vec![Document {
            filename: "phases.csv".into(),
            content: to_csv(&outcome.report),
        }]),
        Format::GridTsv => {
            if outcome.grids.is_empty() {
                return Err(EmitError::Unsupported {
                    format: format.name().into(),
                    kind: outcome.report.scenario.kind.name().into(),
                });
            }
            Ok(outcome
                .grids
                .iter()
                .map(|g| Document {
                    filename: format!("{}.tsv", g.name),
                    content: to_grid_tsv(g, &outcome.report.scenario),
                })
                .collect())
        }
    }
}
