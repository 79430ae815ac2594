//! Clustering metrics and the minimum-variance objectives.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{KernelMatrix, WeightVector};
use crate::partition::Partition;

/// Per-replicate result. `rand_index` is `None` when no ground truth was supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub rand_index: Option<f64>,
    pub pcut_value: f64,
    pub minvar_trace: f64,
    pub eigengap: f64,
    pub replicate_id: usize,
    pub seed: u64,
}

fn pairs(k: usize) -> f64 {
    (k as f64) * (k as f64 - 1.0) / 2.0
}

/// Rand index `(a + b) / C(n, 2)`, counted through the contingency table.
pub fn rand_index(u: &Partition, v: &Partition) -> Result<f64> {
    let n = u.len();
    if v.len() != n {
        return Err(Error::SizeMismatch(n, v.len()));
    }
    if n < 2 {
        return Err(Error::TooFewRows);
    }
    let mut table = vec![0usize; u.classes() * v.classes()];
    for (&a, &b) in u.labels().iter().zip(v.labels()) {
        table[a * v.classes() + b] += 1;
    }
    let both: f64 = table.iter().map(|&m| pairs(m)).sum();
    let in_u: f64 = u.class_sizes().into_iter().map(pairs).sum();
    let in_v: f64 = v.class_sizes().into_iter().map(pairs).sum();
    let total = pairs(n);
    // a = both; b = total - in_u - in_v + both
    Ok((total - in_u - in_v + 2.0 * both) / total)
}

fn check(p: &Partition, k: &KernelMatrix, pi: &WeightVector) -> Result<()> {
    if p.len() != k.n() {
        return Err(Error::SizeMismatch(p.len(), k.n()));
    }
    if pi.len() != k.n() {
        return Err(Error::SizeMismatch(pi.len(), k.n()));
    }
    p.require_nonempty()
}

/// Weighted within-class trace `tr(S̃_W)` in the feature space implied by `K`.
///
/// Uses only kernel entries:
/// `‖x_i − m_j‖² = K_ii − 2 Σ_l π_l K_il / η_j + Σ_{l,m} π_l π_m K_lm / η_j²`
/// with the sums over class `j`.
pub fn minvar_trace(k: &KernelMatrix, p: &Partition, pi: &WeightVector) -> Result<f64> {
    check(p, k, pi)?;
    let km = k.matrix();
    let w = pi.as_slice();
    let eta = p.class_weights(pi)?;
    let labels = p.labels();
    let n = k.n();

    // cross[i][j] = Σ_{l∈V_j} π_l K_il ; self_term[j] = Σ_{l,m∈V_j} π_l π_m K_lm
    let mut cross = DMatrix::<f64>::zeros(n, p.classes());
    for i in 0..n {
        for l in 0..n {
            cross[(i, labels[l])] += w[l] * km[(i, l)];
        }
    }
    let mut self_term = vec![0.0; p.classes()];
    for (l, &j) in labels.iter().enumerate() {
        self_term[j] += w[l] * cross[(l, j)];
    }

    let mut acc = 0.0;
    for (i, &j) in labels.iter().enumerate() {
        let d = km[(i, i)] - 2.0 * cross[(i, j)] / eta[j] + self_term[j] / (eta[j] * eta[j]);
        acc += w[i] * d;
    }
    Ok((acc / pi.total()).max(0.0))
}

/// Weighted total trace `tr(S̃) = (1/Σπ) Σ π_i ‖x_i − m‖²` around the
/// weighted global mean.
pub fn total_trace(k: &KernelMatrix, pi: &WeightVector) -> Result<f64> {
    let n = k.n();
    if pi.len() != n {
        return Err(Error::SizeMismatch(pi.len(), n));
    }
    minvar_trace(k, &Partition::new(vec![0; n], 1)?, pi)
}

fn centering(pi: &WeightVector) -> DMatrix<f64> {
    let n = pi.len();
    let pv = pi.to_vector();
    DMatrix::identity(n, n) - (pv * DVector::from_element(n, 1.0).transpose()) / pi.total()
}

// tr(E'ΠAΠE (E'ΠE)⁻¹) = Σ_j (Σ_{i,l∈V_j} π_i π_l A_il) / η_j
fn class_quadratic(a: &DMatrix<f64>, p: &Partition, pi: &WeightVector) -> Result<f64> {
    let w = pi.as_slice();
    let labels = p.labels();
    let eta = p.class_weights(pi)?;
    let mut num = vec![0.0; p.classes()];
    for i in 0..labels.len() {
        for l in 0..labels.len() {
            if labels[i] == labels[l] {
                num[labels[i]] += w[i] * w[l] * a[(i, l)];
            }
        }
    }
    Ok(num.iter().zip(&eta).map(|(s, e)| s / e).sum())
}

/// `T = tr(E'ΠH'_π K H_π ΠE (E'ΠE)⁻¹)` with `H_π = I − π1'/(π'1)`.
pub fn objective_t(p: &Partition, k: &KernelMatrix, pi: &WeightVector) -> Result<f64> {
    check(p, k, pi)?;
    let h = centering(pi);
    let centered = h.transpose() * k.matrix() * h;
    class_quadratic(&centered, p, pi)
}

/// `T′ = tr(E'ΠKΠE (E'ΠE)⁻¹)`, equal to `T + π'Kπ/(π'1)`.
pub fn objective_tprime(p: &Partition, k: &KernelMatrix, pi: &WeightVector) -> Result<f64> {
    check(p, k, pi)?;
    class_quadratic(k.matrix(), p, pi)
}
