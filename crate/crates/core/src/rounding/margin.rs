use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Exponential surrogate `f_j(y) = Σ_{l≠j} exp(y_l − y_j)` with `y`
/// extended by a trailing zero to length `c`.
pub fn surrogate_loss(y: &[f64], j: usize) -> f64 {
    let c = y.len() + 1;
    let at = |l: usize| if l < y.len() { y[l] } else { 0.0 };
    let yj = at(j);
    (0..c).filter(|&l| l != j).map(|l| (at(l) - yj).exp()).sum()
}

/// Mean surrogate loss of the rows of `y` against `labels`.
pub fn empirical_risk(y: &DMatrix<f64>, labels: &Partition) -> Result<f64> {
    if labels.len() != y.nrows() {
        return Err(Error::SizeMismatch(labels.len(), y.nrows()));
    }
    if labels.classes() != y.ncols() + 1 {
        return Err(Error::Shape(format!(
            "{} margin columns for {} classes",
            y.ncols(),
            labels.classes()
        )));
    }
    let total: f64 = y
        .row_iter()
        .zip(labels.labels())
        .map(|(r, &t)| {
            let row: Vec<f64> = r.iter().copied().collect();
            surrogate_loss(&row, t)
        })
        .sum();
    Ok(total / y.nrows() as f64)
}

/// Minimizer of the expected surrogate loss: `ŷ_j = ½ log(P_j / P_c)`.
pub fn fisher_consistent_margins(probs: &[f64]) -> Result<Vec<f64>> {
    let sum: f64 = probs.iter().sum();
    if probs.len() < 2 || probs.iter().any(|&p| !(p > 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities);
    }
    let last = probs[probs.len() - 1];
    Ok(probs[..probs.len() - 1]
        .iter()
        .map(|p| 0.5 * (p / last).ln())
        .collect())
}
