#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};

use pcut_cli::{Criterion, ExperimentConfig, Init, Rounding};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Writes `c` isotropic 2-D blobs of `per` points with unit spread, centers on
/// a circle of radius `radius`, labels in the last column, with a header.
pub fn write_blobs(dir: &Path, c: usize, per: usize, radius: f64, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let path = dir.join(format!("blobs_{c}_{per}_{seed}.csv"));
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "x,y,label").unwrap();
    for k in 0..c {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / c as f64;
        for _ in 0..per {
            let dx: f64 = StandardNormal.sample(&mut rng);
            let dy: f64 = StandardNormal.sample(&mut rng);
            writeln!(f, "{},{},g{k}", radius * angle.cos() + dx, radius * angle.sin() + dy).unwrap();
        }
    }
    path
}

pub fn config(input: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        input,
        label_column: Some(2),
        criteria: vec![Criterion::Ncut],
        roundings: vec![Rounding::Procrustes],
        init: Init::Random,
        betas: vec![1.0],
        classes: None,
        replicates: 10,
        seed: 42,
        max_iter: 100,
        workers: None,
    }
}
