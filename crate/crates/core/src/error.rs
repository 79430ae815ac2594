use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("fewer than 2 rows")]
    TooFewRows,

    #[error("ragged rows: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-numeric feature cell {value:?} at row {row}, column {column}")]
    NonNumeric {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("label column {column} out of range for {width} columns")]
    LabelColumn { column: usize, width: usize },

    #[error("non-finite value at ({row}, {column})")]
    NonFinite { row: usize, column: usize },

    #[error("bandwidth beta must be positive, got {0}")]
    InvalidBeta(f64),

    #[error("isolated vertex {0} (degree 0)")]
    IsolatedVertex(usize),

    #[error("weights must be strictly positive and finite (entry {index} = {value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("plus-identity kernel requires a zero-diagonal affinity graph")]
    NonZeroDiagonal,

    #[error("class {0} is empty")]
    EmptyClass(usize),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("class count {c} out of range for n = {n}")]
    ClassCount { c: usize, n: usize },

    #[error("problem size n = {n} exceeds the dense solver cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("partition has fewer than two nonempty classes")]
    DegeneratePartition,

    #[error("could not repair empty classes after {0} attempts")]
    EmptyClassRepair(usize),

    #[error("max_iter must be at least 1")]
    MaxIter,

    #[error("probabilities must be positive and sum to one")]
    InvalidProbabilities,

    #[error("sample count must be at least 1")]
    SampleCount,

    #[error("nonpositive trace {0}")]
    NonPositiveTrace(f64),

    #[error("sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
}
