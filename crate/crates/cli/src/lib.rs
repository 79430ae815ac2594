//! Experiment harness: criterion × rounding × β × replicate sweeps over a
//! labelled CSV, with seeded, schedule-independent results.

pub mod config;
pub mod output;
pub mod plan;
pub mod run;

pub use config::{Args, ConfigError, Criterion, ExperimentConfig, Format, Init, Rounding};
pub use output::{aggregate, emit, write_csv, Aggregate, EmitError, RunRecord, RunSummary};
pub use plan::{plan, run_seed, Cell, Plan, RunSpec};
pub use run::{execute, execute_on, load, Dataset, ExecuteError, RunError};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const RUNTIME: i32 = 2;
}
