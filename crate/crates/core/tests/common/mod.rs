#![allow(dead_code)]

use pcut_core::graph::{build_affinity, AffinityGraph, DataMatrix};
use pcut_core::{DMatrix, Partition, WeightVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Dense random graph with positive off-diagonal weights, zero diagonal.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> AffinityGraph {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = 0.05 + rng.random::<f64>();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    AffinityGraph::from_weights(w).unwrap()
}

/// Random graph with some zero edges, kept connected by a spanning path.
pub fn sparse_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> AffinityGraph {
    let mut w = DMatrix::zeros(n, n);
    for i in 1..n {
        let v = 0.1 + rng.random::<f64>();
        w[(i, i - 1)] = v;
        w[(i - 1, i)] = v;
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            if rng.random::<f64>() < density {
                let v = rng.random::<f64>();
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    AffinityGraph::from_weights(w).unwrap()
}

/// Block-diagonal graph with `sizes.len()` complete components.
pub fn components_graph(sizes: &[usize]) -> (AffinityGraph, Partition) {
    let n: usize = sizes.iter().sum();
    let mut labels = Vec::with_capacity(n);
    for (k, &s) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(k, s));
    }
    let w = DMatrix::from_fn(n, n, |i, j| {
        if i != j && labels[i] == labels[j] {
            1.0
        } else {
            0.0
        }
    });
    (
        AffinityGraph::from_weights(w).unwrap(),
        Partition::new(labels, sizes.len()).unwrap(),
    )
}

/// Labels drawn uniformly with every class nonempty.
pub fn random_partition<R: Rng>(rng: &mut R, n: usize, c: usize) -> Partition {
    assert!(c <= n);
    let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for k in 0..c {
        labels[order[k]] = k;
    }
    Partition::new(labels, c).unwrap()
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> WeightVector {
    WeightVector::new((0..n).map(|_| 0.2 + 2.0 * rng.random::<f64>()).collect()).unwrap()
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn random_orthogonal<R: Rng>(rng: &mut R, k: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, k, k).qr().q()
}

/// Every labelling of `n` items into exactly `c` nonempty classes, up to
/// relabelling (restricted growth strings).
pub fn all_partitions(n: usize, c: usize) -> Vec<Partition> {
    fn rec(i: usize, n: usize, c: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if i == n {
            if max == c {
                out.push(Partition::new(cur.clone(), c).unwrap());
            }
            return;
        }
        if c - max > n - i {
            return;
        }
        for l in 0..=max.min(c - 1) {
            cur.push(l);
            rec(i + 1, n, c, max.max(l + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, c, 0, &mut Vec::new(), &mut out);
    out
}

/// `c` isotropic blobs of `per` points in 2-D, centers on a circle of
/// radius `radius` (in units of the blob standard deviation 1).
pub fn blobs<R: Rng>(rng: &mut R, c: usize, per: usize, radius: f64) -> (DataMatrix, Partition) {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for k in 0..c {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / c as f64;
        let (cx, cy) = (radius * angle.cos(), radius * angle.sin());
        for _ in 0..per {
            let dx: f64 = StandardNormal.sample(rng);
            let dy: f64 = StandardNormal.sample(rng);
            rows.push(vec![cx + dx, cy + dy]);
            labels.push(k);
        }
    }
    (
        DataMatrix::from_rows(&rows).unwrap(),
        Partition::new(labels, c).unwrap(),
    )
}

pub fn blob_graph<R: Rng>(rng: &mut R, zero_diagonal: bool) -> (AffinityGraph, Partition) {
    let (x, truth) = blobs(rng, 3, 30, 10.0);
    (build_affinity(&x, 8.0, zero_diagonal).unwrap(), truth)
}

/// Pair-enumeration Rand index.
pub fn rand_index_pairs(u: &[usize], v: &[usize]) -> f64 {
    let n = u.len();
    let mut agree = 0usize;
    let mut total = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            total += 1;
            if (u[i] == u[j]) == (v[i] == v[j]) {
                agree += 1;
            }
        }
    }
    agree as f64 / total as f64
}

/// `Σ_j cut(V_j, V∖V_j) / η_j` straight from the edge list.
pub fn pcut_edges(w: &DMatrix<f64>, labels: &[usize], pi: &[f64], c: usize) -> f64 {
    let mut eta = vec![0.0; c];
    for (i, &l) in labels.iter().enumerate() {
        eta[l] += pi[i];
    }
    let mut cut = vec![0.0; c];
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if labels[i] != labels[j] {
                cut[labels[i]] += w[(i, j)];
            }
        }
    }
    cut.iter().zip(&eta).map(|(a, b)| a / b).sum()
}

/// Orthonormal basis of the column space via SVD, for subspace comparisons
/// independent of the library's QR.
pub fn orthonormal_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, false);
    svd.u.unwrap().columns(0, m.ncols()).into_owned()
}

/// `sin` of the largest principal angle between column spaces: largest
/// singular value of `Q_b − Q_a Q_a'Q_b` with SVD-built bases.
pub fn max_angle_sine_oracle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = orthonormal_basis(a);
    let qb = orthonormal_basis(b);
    let residual = &qb - &qa * (qa.transpose() * &qb);
    residual.singular_values().max()
}
