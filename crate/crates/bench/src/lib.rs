//! Workload generators shared by the benchmarks.

use pcut_core::graph::{build_affinity, AffinityGraph, DataMatrix};
use pcut_core::{DMatrix, Partition};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// `c` unit-variance 2-D blobs of `per` points, centers on a circle of
/// radius `radius`.
pub fn blobs<R: Rng + ?Sized>(rng: &mut R, c: usize, per: usize, radius: f64) -> (DataMatrix, Partition) {
    let mut rows = Vec::with_capacity(c * per);
    let mut labels = Vec::with_capacity(c * per);
    for k in 0..c {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / c as f64;
        for _ in 0..per {
            let dx: f64 = StandardNormal.sample(rng);
            let dy: f64 = StandardNormal.sample(rng);
            rows.push(vec![radius * angle.cos() + dx, radius * angle.sin() + dy]);
            labels.push(k);
        }
    }
    let x = DataMatrix::from_rows(&rows).expect("rows have equal width");
    (x, Partition::new(labels, c).expect("labels below c"))
}

/// RBF affinity over [`blobs`].
pub fn blob_graph<R: Rng + ?Sized>(rng: &mut R, c: usize, per: usize, beta: f64, zero_diagonal: bool) -> AffinityGraph {
    let (x, _) = blobs(rng, c, per, 10.0);
    build_affinity(&x, beta, zero_diagonal).expect("finite data")
}

/// Dense graph with uniform random weights in [0.05, 1.05).
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AffinityGraph {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = 0.05 + rng.random::<f64>();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    AffinityGraph::from_weights(w).expect("symmetric nonnegative")
}
