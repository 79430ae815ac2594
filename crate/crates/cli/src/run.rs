use std::fmt;

use log::{debug, info};
use pcut_core::evaluation::{minvar_trace, rand_index, MetricReport};
use pcut_core::graph::{
    build_affinity, centered_kernel, laplacian, laplacian_kernel, load_dataset, sar_laplacian,
    standardize,
};
use pcut_core::relaxation::{
    eigengap, pcut_graph, solve_minvar_relaxation, solve_relaxation, top_eigengap,
};
use pcut_core::rounding::{procrustean_rounding, weighted_kmeans_rounding, yu_shi_rounding};
use pcut_core::{
    AffinityGraph, DataMatrix, Embedding, InitStrategy, KernelMatrix, KernelVariant, Partition,
    RoundingResult, WeightVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, Criterion, ExperimentConfig, Rounding};
use crate::output::{aggregate, RunRecord, RunSummary};
use crate::plan::{plan, Cell, RunSpec};

/// A loaded, standardized dataset with its resolved class count.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: DataMatrix,
    pub truth: Option<Partition>,
    pub classes: usize,
}

/// Loads and standardizes the input and settles the class count.
pub fn load(config: &ExperimentConfig) -> Result<Dataset, ConfigError> {
    let (raw, truth) = load_dataset(&config.input, config.label_column)?;
    let classes = match (config.classes, &truth) {
        (Some(c), _) => c,
        (None, Some(t)) => t.classes(),
        (None, None) => return Err(ConfigError::MissingClasses),
    };
    if classes < 2 {
        return Err(ConfigError::Classes(classes));
    }
    if classes > raw.n() {
        return Err(pcut_core::Error::ClassCount { c: classes, n: raw.n() }.into());
    }
    Ok(Dataset {
        x: standardize(&raw),
        truth,
        classes,
    })
}

/// A failure inside one run, tagged with where it happened.
#[derive(Debug, thiserror::Error)]
pub struct RunError {
    pub criterion: Criterion,
    pub rounding: Rounding,
    pub beta: f64,
    pub replicate: usize,
    #[source]
    pub source: pcut_core::Error,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion={} rounding={} beta={} replicate={}: {}",
            self.criterion, self.rounding, self.beta, self.replicate, self.source
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExecuteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Everything the replicates of one cell share.
struct Prepared {
    graph: AffinityGraph,
    pi: WeightVector,
    embedding: Embedding,
    kernel: KernelMatrix,
    eigengap: f64,
}

fn prepare(cell: &Cell, data: &Dataset) -> pcut_core::Result<Prepared> {
    let c = data.classes;
    // margin-based rounding uses w_ii = 0
    let zero_diagonal = cell.rounding == Rounding::Procrustes;
    let graph = build_affinity(&data.x, cell.beta, zero_diagonal)?;
    let (pi, embedding, kernel, gap) = match cell.criterion {
        Criterion::Ncut => {
            let op = laplacian(&graph);
            let pi = WeightVector::degrees(&graph)?;
            debug!("ncut beta={}: operator {:?}", cell.beta, op.kind());
            let (emb, es) = solve_relaxation(&op, &pi, c)?;
            (pi, emb, laplacian_kernel(&op), eigengap(&es, c)?)
        }
        Criterion::Rcut => {
            let op = sar_laplacian(&graph)?;
            let pi = WeightVector::uniform(graph.n());
            info!("rcut beta={}: operator {:?}", cell.beta, op.kind());
            let (emb, es) = solve_relaxation(&op, &pi, c)?;
            (pi, emb, laplacian_kernel(&op), eigengap(&es, c)?)
        }
        Criterion::Minvar => {
            let variant = if zero_diagonal {
                KernelVariant::PlusIdentity
            } else {
                KernelVariant::Plain
            };
            let k = centered_kernel(&graph, variant)?;
            let pi = WeightVector::uniform(graph.n());
            debug!("minvar beta={}: kernel {:?}", cell.beta, variant);
            let (emb, es) = solve_minvar_relaxation(&k, &pi, c)?;
            (pi, emb, k, top_eigengap(&es, c)?)
        }
    };
    Ok(Prepared {
        graph,
        pi,
        embedding,
        kernel,
        eigengap: gap,
    })
}

fn round(
    prepared: &Prepared,
    rounding: Rounding,
    c: usize,
    init: InitStrategy,
    max_iter: usize,
    seed: u64,
) -> pcut_core::Result<RoundingResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emb = &prepared.embedding;
    match rounding {
        Rounding::Procrustes => procrustean_rounding(emb, c, init, max_iter, &mut rng),
        Rounding::Kmeans => weighted_kmeans_rounding(emb, c, init, max_iter, &mut rng),
        Rounding::Yushi => yu_shi_rounding(&emb.with_trivial_column(), init, max_iter, &mut rng),
    }
}

fn run_one(
    spec: &RunSpec,
    cell: &Cell,
    prepared: &Prepared,
    config: &ExperimentConfig,
    data: &Dataset,
) -> pcut_core::Result<RunRecord> {
    let result = round(
        prepared,
        cell.rounding,
        data.classes,
        config.init.into(),
        config.max_iter,
        spec.seed,
    )?;
    let p = &result.partition;
    let ri = match &data.truth {
        Some(t) => Some(rand_index(p, t)?),
        None => None,
    };
    Ok(RunRecord {
        criterion: cell.criterion,
        rounding: cell.rounding,
        init: config.init,
        beta: cell.beta,
        iterations: result.iterations,
        converged: result.converged,
        metrics: MetricReport {
            rand_index: ri,
            pcut_value: pcut_graph(p, &prepared.graph, &prepared.pi)?,
            minvar_trace: minvar_trace(&prepared.kernel, p, &prepared.pi)?,
            eigengap: prepared.eigengap,
            replicate_id: spec.replicate,
            seed: spec.seed,
        },
    })
}

fn tag(cell: &Cell, replicate: usize, source: pcut_core::Error) -> RunError {
    RunError {
        criterion: cell.criterion,
        rounding: cell.rounding,
        beta: cell.beta,
        replicate,
        source,
    }
}

/// Runs the plan on an already loaded dataset. Results come back in plan
/// order whatever the scheduling.
pub fn execute_on(config: &ExperimentConfig, data: &Dataset) -> Result<RunSummary, RunError> {
    let plan = plan(config);
    let prepared: Vec<pcut_core::Result<Prepared>> =
        plan.cells.par_iter().map(|cell| prepare(cell, data)).collect();
    let mut ready = Vec::with_capacity(prepared.len());
    for (cell, p) in plan.cells.iter().zip(prepared) {
        ready.push(p.map_err(|e| tag(cell, 0, e))?);
    }

    let records: Vec<Result<RunRecord, RunError>> = plan
        .runs
        .par_iter()
        .map(|spec| {
            let cell = &plan.cells[spec.cell];
            run_one(spec, cell, &ready[spec.cell], config, data).map_err(|e| tag(cell, spec.replicate, e))
        })
        .collect();
    let runs = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    let aggregates = aggregate(&runs);
    Ok(RunSummary {
        config: config.clone(),
        n: data.x.n(),
        classes: data.classes,
        runs,
        aggregates,
    })
}

/// Loads the data and runs the whole plan on `config.workers` threads.
pub fn execute(config: &ExperimentConfig) -> Result<RunSummary, ExecuteError> {
    let data = load(config)?;
    info!(
        "loaded {} rows x {} features, {} classes",
        data.x.n(),
        data.x.d(),
        data.classes
    );
    let summary = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()?
            .install(|| execute_on(config, &data))?,
        None => execute_on(config, &data)?,
    };
    Ok(summary)
}
