use log::info;
use pcut_core::InitStrategy;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Criterion, ExperimentConfig, Rounding};

/// One relaxation to solve: the embedding is shared by every replicate of
/// the same (criterion, rounding, β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub criterion: Criterion,
    pub rounding: Rounding,
    pub beta_index: usize,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub cell: usize,
    pub replicate: usize,
    /// Seed of this run's own generator, derived from the base seed, the β
    /// index and the replicate number.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub cells: Vec<Cell>,
    pub runs: Vec<RunSpec>,
}

/// Replicates actually run: deterministic starts give the same answer every
/// time, so they collapse to one.
pub fn effective_replicates(config: &ExperimentConfig) -> usize {
    if InitStrategy::from(config.init).is_deterministic() {
        1
    } else {
        config.replicates
    }
}

/// Per-run seed drawn from stream `(β index << 32) | replicate` of the base
/// generator. Every criterion and rounding sees the same seeds.
pub fn run_seed(base: u64, beta_index: usize, replicate: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(((beta_index as u64) << 32) | replicate as u64);
    rng.next_u64()
}

/// Cross product criteria × roundings × β × replicates, in that nesting order.
pub fn plan(config: &ExperimentConfig) -> Plan {
    let replicates = effective_replicates(config);
    if replicates < config.replicates {
        info!(
            "init '{}' is deterministic; running 1 replicate per beta instead of {}",
            config.init, config.replicates
        );
    }
    let mut cells = Vec::new();
    let mut runs = Vec::new();
    for &criterion in &config.criteria {
        for &rounding in &config.roundings {
            for (beta_index, &beta) in config.betas.iter().enumerate() {
                let cell = cells.len();
                cells.push(Cell {
                    criterion,
                    rounding,
                    beta_index,
                    beta,
                });
                for replicate in 0..replicates {
                    runs.push(RunSpec {
                        cell,
                        replicate,
                        seed: run_seed(config.seed, beta_index, replicate),
                    });
                }
            }
        }
    }
    Plan { cells, runs }
}
