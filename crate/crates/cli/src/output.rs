use std::io::Write;
use std::path::Path;

use pcut_core::evaluation::MetricReport;
use serde::{Deserialize, Serialize};

use crate::config::{Criterion, ExperimentConfig, Format, Init, Rounding};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub criterion: Criterion,
    pub rounding: Rounding,
    pub init: Init,
    pub beta: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(flatten)]
    pub metrics: MetricReport,
}

/// Statistics over the replicates of one (criterion, rounding, β).
/// Rand index fields are `None` without ground truth; `ri_std` is the
/// sample standard deviation (0 for a single replicate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub criterion: Criterion,
    pub rounding: Rounding,
    pub init: Init,
    pub beta: f64,
    pub runs: usize,
    pub ri_mean: Option<f64>,
    pub ri_min: Option<f64>,
    pub ri_max: Option<f64>,
    pub ri_std: Option<f64>,
    pub pcut_mean: f64,
    pub eigengap: f64,
    pub iterations_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub n: usize,
    pub classes: usize,
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Groups consecutive runs of the same cell; relies on plan order.
pub fn aggregate(runs: &[RunRecord]) -> Vec<Aggregate> {
    let key = |r: &RunRecord| (r.criterion, r.rounding, r.beta.to_bits());
    let mut out = Vec::new();
    let mut start = 0;
    while start < runs.len() {
        let k = key(&runs[start]);
        let end = runs[start..]
            .iter()
            .position(|r| key(r) != k)
            .map_or(runs.len(), |p| start + p);
        let group = &runs[start..end];
        let ri: Option<Vec<f64>> = group.iter().map(|r| r.metrics.rand_index).collect();
        let pcut: Vec<f64> = group.iter().map(|r| r.metrics.pcut_value).collect();
        let iters: Vec<f64> = group.iter().map(|r| r.iterations as f64).collect();
        let first = &group[0];
        out.push(Aggregate {
            criterion: first.criterion,
            rounding: first.rounding,
            init: first.init,
            beta: first.beta,
            runs: group.len(),
            ri_mean: ri.as_deref().map(mean),
            ri_min: ri.as_deref().map(|v| v.iter().copied().fold(f64::INFINITY, f64::min)),
            ri_max: ri.as_deref().map(|v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            ri_std: ri.as_deref().map(sample_std),
            pcut_mean: mean(&pcut),
            eigengap: first.metrics.eigengap,
            iterations_mean: mean(&iters),
        });
        start = end;
    }
    out
}

pub const CSV_HEADER: [&str; 16] = [
    "criterion",
    "rounding",
    "init",
    "beta",
    "replicate",
    "seed",
    "rand_index",
    "pcut",
    "eigengap",
    "iterations",
    "minvar_trace",
    "converged",
    "ri_min",
    "ri_max",
    "ri_std",
    "row",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes per-replicate rows followed by one aggregate row per cell. In
/// aggregate rows `rand_index`, `pcut` and `iterations` hold means.
pub fn write_csv<W: Write>(summary: &RunSummary, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &summary.runs {
        let m = &r.metrics;
        w.write_record([
            r.criterion.to_string(),
            r.rounding.to_string(),
            r.init.to_string(),
            r.beta.to_string(),
            m.replicate_id.to_string(),
            m.seed.to_string(),
            opt(m.rand_index),
            m.pcut_value.to_string(),
            m.eigengap.to_string(),
            r.iterations.to_string(),
            m.minvar_trace.to_string(),
            r.converged.to_string(),
            String::new(),
            String::new(),
            String::new(),
            "run".into(),
        ])?;
    }
    for a in &summary.aggregates {
        w.write_record([
            a.criterion.to_string(),
            a.rounding.to_string(),
            a.init.to_string(),
            a.beta.to_string(),
            String::new(),
            String::new(),
            opt(a.ri_mean),
            a.pcut_mean.to_string(),
            a.eigengap.to_string(),
            a.iterations_mean.to_string(),
            String::new(),
            String::new(),
            opt(a.ri_min),
            opt(a.ri_max),
            opt(a.ri_std),
            "aggregate".into(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn write_to<W: Write>(summary: &RunSummary, format: Format, mut out: W) -> Result<(), EmitError> {
    match format {
        Format::Csv => write_csv(summary, out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, summary)?;
            writeln!(out).map_err(|source| EmitError::Io {
                path: "<output>".into(),
                source,
            })?;
        }
    }
    Ok(())
}

/// Writes the summary to `path`, or standard output when `path` is `None`.
pub fn emit(summary: &RunSummary, format: Format, path: Option<&Path>) -> Result<(), EmitError> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|source| EmitError::Io {
                path: p.display().to_string(),
                source,
            })?;
            write_to(summary, format, std::io::BufWriter::new(file))
        }
        None => write_to(summary, format, std::io::stdout().lock()),
    }
}
