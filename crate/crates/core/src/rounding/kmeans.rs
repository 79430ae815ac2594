use nalgebra::DMatrix;
use rand::Rng;

use super::{argmax, initialize, repair_empty_classes, InitStrategy, RoundingResult};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::relaxation::Embedding;

/// `m_j = Σ_{i∈V_j} π_i y_i / Σ_{i∈V_j} π_i`; rows of empty classes stay zero.
pub(crate) fn weighted_centers(y: &DMatrix<f64>, pi: &[f64], p: &Partition) -> DMatrix<f64> {
    let c = p.classes();
    let mut sums = DMatrix::zeros(c, y.ncols());
    let mut mass = vec![0.0; c];
    for (i, &t) in p.labels().iter().enumerate() {
        let mut row = sums.row_mut(t);
        row += y.row(i) * pi[i];
        mass[t] += pi[i];
    }
    for (j, m) in mass.iter().enumerate() {
        if *m > 0.0 {
            sums.row_mut(j).unscale_mut(*m);
        }
    }
    sums
}

fn sq_dist(y: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>, j: usize) -> f64 {
    (y.row(i) - centers.row(j)).norm_squared()
}

fn distance_repair(p: &mut Partition, y: &DMatrix<f64>, pi: &[f64]) -> Result<usize> {
    let centers = weighted_centers(y, pi, p);
    let labels = p.labels().to_vec();
    repair_empty_classes(p, |i, _| -sq_dist(y, i, &centers, labels[i]))
}

/// Weighted K-means rounding.
///
/// Alternates the weighted center update and nearest-center assignment.
/// `objective_trace` records `Σ_j Σ_{i∈V_j} π_i ‖y_i − m_j‖²` after each
/// center update. This is the quantity both steps decrease, and for a
/// solution of the relaxation it equals
/// `c − 1 − tr(Y'ΠE(E'ΠE)^{-1}E'ΠY)`. With `Π = I` it is the ordinary
/// K-means objective. The unweighted `Σ_j Σ_{i∈V_j} ‖y_i − m_j‖²` at the
/// same centers goes to `residual_trace`; it need not decrease when `Π ≠ I`.
pub fn weighted_kmeans_rounding<R: Rng + ?Sized>(
    emb: &Embedding,
    c: usize,
    init: InitStrategy,
    max_iter: usize,
    rng: &mut R,
) -> Result<RoundingResult> {
    if max_iter == 0 {
        return Err(Error::MaxIter);
    }
    if emb.width() + 1 != c {
        return Err(Error::Shape(format!(
            "embedding width {} does not match {c} classes",
            emb.width()
        )));
    }
    let y = emb.y();
    let pi = emb.weights().as_slice();
    let mut partition = initialize(y, c, init, rng)?;
    let mut repairs = vec![distance_repair(&mut partition, y, pi)?];

    let mut objective_trace = Vec::new();
    let mut residual_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let centers = weighted_centers(y, pi, &partition);
        let objective: f64 = partition
            .labels()
            .iter()
            .enumerate()
            .map(|(i, &t)| pi[i] * sq_dist(y, i, &centers, t))
            .sum();
        objective_trace.push(objective);
        residual_trace.push(
            partition
                .labels()
                .iter()
                .enumerate()
                .map(|(i, &t)| sq_dist(y, i, &centers, t))
                .sum(),
        );

        let labels = (0..y.nrows())
            .map(|i| argmax((0..c).map(|j| -sq_dist(y, i, &centers, j))))
            .collect();
        let mut next = Partition::new(labels, c)?;
        let moves = distance_repair(&mut next, y, pi)?;
        if next == partition {
            converged = true;
            break;
        }
        partition = next;
        repairs.push(moves);
    }

    let centers = weighted_centers(y, pi, &partition);
    Ok(RoundingResult {
        partition,
        objective_trace,
        iterations,
        converged,
        rotation: None,
        centers: Some(centers),
        residual_trace,
        repairs,
    })
}
