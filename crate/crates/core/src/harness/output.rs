//! Result tables: per-run CSV with mean rows, its JSON mirror, a summary of
//! means, and QSVC vs classical SVC deltas.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{ExperimentReport, Metrics, ModelSpec};
use crate::error::Result;

pub const RESULTS_HEADER: &str =
    "dataset,reduction,target_dim,model,ansatz,embedding,n_qubits,run,accuracy,precision,recall,f1,seed";
pub const SUMMARY_HEADER: &str =
    "dataset,reduction,target_dim,model,ansatz,embedding,n_qubits,accuracy,precision,recall,f1";
pub const COMPARISON_HEADER: &str = "dataset,reduction,target_dim,qsvc_embedding,n_qubits,qsvc_accuracy,svc_accuracy,delta";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub dataset: String,
    pub reduction: String,
    pub target_dim: usize,
    pub model: String,
    pub ansatz: Option<String>,
    pub embedding: Option<String>,
    pub n_qubits: Option<usize>,
    /// Run index, or `mean`.
    pub run: String,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub seed: u64,
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn model_columns(model: &ModelSpec) -> (Option<String>, Option<String>, Option<usize>) {
    match model {
        ModelSpec::Qnn(c) => (
            Some(c.ansatz.name().to_string()),
            Some(c.embedding.kind.name().to_string()),
            Some(c.n_qubits),
        ),
        ModelSpec::Qsvc { kernel, .. } => (
            None,
            Some(kernel.embedding.kind.name().to_string()),
            Some(kernel.n_qubits),
        ),
        ModelSpec::ClassicalSvc { .. } | ModelSpec::Cnn(_) => (None, None, None),
    }
}

fn row(rep: &ExperimentReport, run: String, m: &Metrics, seed: u64) -> ResultRow {
    let (ansatz, embedding, n_qubits) = model_columns(&rep.config.model);
    ResultRow {
        dataset: rep.config.dataset.name().to_string(),
        reduction: rep.config.reduction_label(),
        target_dim: rep.target_dim,
        model: rep.config.model.name().to_string(),
        ansatz,
        embedding,
        n_qubits,
        run,
        accuracy: round6(m.accuracy),
        precision: round6(m.precision),
        recall: round6(m.recall),
        f1: round6(m.f1),
        seed,
    }
}

/// One row per run followed by a `mean` row, per experiment in suite order.
pub fn result_rows(reports: &[ExperimentReport], master_seed: u64) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for rep in reports {
        for r in &rep.runs {
            rows.push(row(rep, r.run.to_string(), &r.metrics, r.seed));
        }
        rows.push(row(rep, "mean".into(), &rep.mean, master_seed));
    }
    rows
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, ToString::to_string)
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    for r in rows {
        out += &csv_line(&[
            r.dataset.clone(),
            r.reduction.clone(),
            r.target_dim.to_string(),
            r.model.clone(),
            opt(&r.ansatz),
            opt(&r.embedding),
            opt(&r.n_qubits),
            r.run.clone(),
            r.accuracy.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.f1.to_string(),
            r.seed.to_string(),
        ]);
    }
    out
}

pub fn summary_csv(rows: &[ResultRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows.iter().filter(|r| r.run == "mean") {
        out += &csv_line(&[
            r.dataset.clone(),
            r.reduction.clone(),
            r.target_dim.to_string(),
            r.model.clone(),
            opt(&r.ansatz),
            opt(&r.embedding),
            opt(&r.n_qubits),
            r.accuracy.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.f1.to_string(),
        ]);
    }
    out
}

/// Mean-accuracy delta (QSVC − classical) for each QSVC experiment whose
/// upstream settings match a classical SVC experiment in the same suite.
pub fn comparison_csv(reports: &[ExperimentReport]) -> String {
    let mut out = format!("{COMPARISON_HEADER}\n");
    let upstream = |r: &ExperimentReport| {
        let c = &r.config;
        (c.dataset.clone(), c.reduction.clone(), c.scaling(), c.train_fraction, r.runs.len())
    };
    for q in reports {
        let ModelSpec::Qsvc { kernel, .. } = &q.config.model else {
            continue;
        };
        let matched = reports
            .iter()
            .find(|c| matches!(c.config.model, ModelSpec::ClassicalSvc { .. }) && upstream(c) == upstream(q));
        if let Some(c) = matched {
            let (qa, ca) = (round6(q.mean.accuracy), round6(c.mean.accuracy));
            out += &csv_line(&[
                q.config.dataset.name().to_string(),
                q.config.reduction_label(),
                q.target_dim.to_string(),
                kernel.embedding.kind.name().to_string(),
                kernel.n_qubits.to_string(),
                qa.to_string(),
                ca.to_string(),
                round6(qa - ca).to_string(),
            ]);
        }
    }
    out
}

/// Write `results.csv`, `results.json`, `summary.csv` and `comparison.csv`.
pub fn write_outputs(reports: &[ExperimentReport], master_seed: u64, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let rows = result_rows(reports, master_seed);
    fs::write(dir.join("results.csv"), results_csv(&rows))?;
    fs::write(dir.join("results.json"), serde_json::to_string_pretty(&rows)? + "\n")?;
    fs::write(dir.join("summary.csv"), summary_csv(&rows))?;
    fs::write(dir.join("comparison.csv"), comparison_csv(reports))?;
    Ok(())
}
