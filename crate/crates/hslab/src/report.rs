//! JSON report envelopes and the CSV projections of each report type.
//!
//! JSON is canonical. Every report carries `"schema": "hslab/1"` and, unless
//! timestamps are disabled, the generation time in Unix seconds.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use hslab_core::neuron::{InterventionResult, RemovalReport, TauSweep};
use hslab_core::EvalReport;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::sweep::LayerReport;

pub const SCHEMA: &str = "hslab/1";

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
    pub result: &'a T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(command: &'a str, result: &'a T, timestamp: bool) -> Self {
        let generated_at_unix = timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        Self {
            schema: SCHEMA,
            command,
            generated_at_unix,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a header and rows, each row already formatted as strings.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Shortest round-trip representation; empty for absent values.
pub fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub const SCDI_HEADER: [&str; 7] = ["layer", "R", "O", "I_c", "I_e", "CDI", "SCDI"];

pub fn scdi_rows(layers: &[LayerReport]) -> impl Iterator<Item = Vec<String>> + '_ {
    layers.iter().map(|l| {
        let r = &l.report;
        vec![
            l.layer.to_string(),
            num(r.redundancy),
            num(r.orthogonality),
            num(r.intra_compactness),
            num(r.inter_entanglement),
            num(r.cdi),
            num(r.scdi),
        ]
    })
}

pub const INTERVENTION_HEADER: [&str; 9] = [
    "tau",
    "group",
    "count",
    "accuracy",
    "sensitivity",
    "specificity",
    "precision",
    "f1",
    "gic",
];

pub fn intervention_row(
    tau: Option<f64>,
    group: &str,
    count: usize,
    r: &EvalReport,
    gic: Option<f64>,
) -> Vec<String> {
    vec![
        opt(tau),
        group.to_string(),
        count.to_string(),
        num(r.accuracy),
        num(r.sensitivity),
        num(r.specificity),
        num(r.precision),
        num(r.f1),
        opt(gic),
    ]
}

pub fn result_row(tau: Option<f64>, r: &InterventionResult, gic: Option<f64>) -> Vec<String> {
    intervention_row(tau, &r.group_name, r.group_size, &r.report, gic)
}

pub fn sweep_rows(sweep: &TauSweep) -> impl Iterator<Item = Vec<String>> + '_ {
    sweep
        .rows
        .iter()
        .map(|r| intervention_row(Some(r.tau), &r.group, r.count, &r.report, r.gic))
}

pub const HEATMAP_HEADER: [&str; 4] = ["tau", "group", "count", "accuracy_drop"];

/// Long format, one row per (τ, group) cell.
pub fn heatmap_rows(sweep: &TauSweep) -> impl Iterator<Item = Vec<String>> + '_ {
    sweep.rows.iter().map(|r| {
        vec![
            num(r.tau),
            r.group.clone(),
            r.count.to_string(),
            num(r.accuracy_drop),
        ]
    })
}

pub const REMOVAL_HEADER: [&str; 9] = [
    "layer",
    "removed",
    "trials",
    "baseline_accuracy",
    "accuracy",
    "sensitivity",
    "specificity",
    "precision",
    "f1",
];

pub fn removal_rows(reports: &[RemovalReport]) -> impl Iterator<Item = Vec<String>> + '_ {
    reports.iter().map(|r| {
        vec![
            r.layer.to_string(),
            r.removed.to_string(),
            r.trials.to_string(),
            num(r.baseline.accuracy),
            num(r.mean.accuracy),
            num(r.mean.sensitivity),
            num(r.mean.specificity),
            num(r.mean.precision),
            num(r.mean.f1),
        ]
    })
}
