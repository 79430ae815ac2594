use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use pcut_core::InitStrategy;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Normalized cut: `L = D − W`, `Π = D`.
    Ncut,
    /// Ratio cut on the SAR Laplacian, `Π = I`.
    Rcut,
    /// Minimum-variance criterion on the centered affinity kernel, `Π = I`.
    Minvar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Procrustes,
    Kmeans,
    Yushi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    Orthogonal,
    Identity,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl From<Init> for InitStrategy {
    fn from(i: Init) -> Self {
        match i {
            Init::Orthogonal => InitStrategy::Orthogonal,
            Init::Identity => InitStrategy::Identity,
            Init::Random => InitStrategy::Random,
        }
    }
}

macro_rules! display_as_value {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let v = self.to_possible_value().expect("no skipped variants");
                f.write_str(v.get_name())
            }
        }
    )*};
}
display_as_value!(Criterion, Rounding, Init, Format);

/// Command-line flags.
#[derive(Debug, Clone, Parser)]
#[command(name = "pcut", version, about = "Penalized-cut spectral clustering experiments")]
pub struct Args {
    /// Comma-separated numeric table, optionally with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Zero-based column holding ground-truth labels.
    #[arg(long = "label-col")]
    pub label_col: Option<usize>,
    /// One or more criteria, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "ncut")]
    pub criterion: Vec<Criterion>,
    /// One or more rounding schemes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "procrustes")]
    pub rounding: Vec<Rounding>,
    #[arg(long, value_enum, default_value_t = Init::Orthogonal)]
    pub init: Init,
    /// Affinity bandwidths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub beta: Vec<f64>,
    /// Number of classes; defaults to the number of ground-truth classes.
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-iter", default_value_t = pcut_core::rounding::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// A validated experiment. `classes` may still be `None` here; it is
/// resolved against the ground truth when the data is loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: PathBuf,
    pub label_column: Option<usize>,
    pub criteria: Vec<Criterion>,
    pub roundings: Vec<Rounding>,
    pub init: Init,
    pub betas: Vec<f64>,
    pub classes: Option<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub workers: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("at least one {0} is required")]
    Empty(&'static str),
    #[error("beta must be positive and finite, got {0}")]
    Beta(f64),
    #[error("replicates must be at least 1")]
    Replicates,
    #[error("max-iter must be at least 1")]
    MaxIter,
    #[error("workers must be at least 1")]
    Workers,
    #[error("classes must be at least 2, got {0}")]
    Classes(usize),
    #[error("--classes is required when no label column is given")]
    MissingClasses,
    #[error("{0}")]
    Data(#[from] pcut_core::Error),
}

impl ExperimentConfig {
    pub fn from_args(args: &Args) -> Result<Self, ConfigError> {
        if args.criterion.is_empty() {
            return Err(ConfigError::Empty("criterion"));
        }
        if args.rounding.is_empty() {
            return Err(ConfigError::Empty("rounding"));
        }
        if args.beta.is_empty() {
            return Err(ConfigError::Empty("beta"));
        }
        if let Some(&b) = args.beta.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
            return Err(ConfigError::Beta(b));
        }
        if args.replicates == 0 {
            return Err(ConfigError::Replicates);
        }
        if args.max_iter == 0 {
            return Err(ConfigError::MaxIter);
        }
        if args.workers == Some(0) {
            return Err(ConfigError::Workers);
        }
        match args.classes {
            Some(c) if c < 2 => return Err(ConfigError::Classes(c)),
            None if args.label_col.is_none() => return Err(ConfigError::MissingClasses),
            _ => {}
        }
        Ok(Self {
            input: args.input.clone(),
            label_column: args.label_col,
            criteria: dedup(&args.criterion),
            roundings: dedup(&args.rounding),
            init: args.init,
            betas: args.beta.clone(),
            classes: args.classes,
            replicates: args.replicates,
            seed: args.seed,
            max_iter: args.max_iter,
            workers: args.workers,
        })
    }
}

fn dedup<T: PartialEq + Copy>(items: &[T]) -> Vec<T> {
    let mut out = Vec::new();
    for &x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}
