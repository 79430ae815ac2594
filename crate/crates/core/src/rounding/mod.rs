//! Turning a relaxed embedding into a hard partition.
//!
//! Three rounders share the same loop shape (initial partition, then
//! alternate a continuous fit with a discrete reassignment until the
//! partition stops changing):
//!
//! * [`procrustean_rounding`]: rotate the embedding onto the class simplex
//!   `EG`, then assign each row to its largest positive margin.
//! * [`weighted_kmeans_rounding`]: `π`-weighted centers, nearest-center
//!   assignment.
//! * [`yu_shi_rounding`]: row-normalized `c`-column embedding, rotation onto
//!   `E`, argmax assignment.
//!
//! Empty classes are repaired by moving a single point per empty class: the
//! point that loses the least by moving (margin rounders) or the one farthest
//! from its center (K-means). Ties everywhere break toward the lowest index.

mod init;
mod kmeans;
mod margin;
mod procrustes;
mod yushi;

pub use init::{initialize, InitStrategy};
pub use kmeans::weighted_kmeans_rounding;
pub use margin::{empirical_risk, fisher_consistent_margins, surrogate_loss};
pub use procrustes::{assign_by_margin, g_matrix, procrustean_rounding, procrustes_align};
pub use yushi::{normalize_rows, yu_shi_rounding};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Default iteration cap for the rounders.
pub const DEFAULT_MAX_ITER: usize = 100;

/// Output of one rounding run.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingResult {
    pub partition: Partition,
    /// One objective value per iteration, non-increasing.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    /// `true` when the partition stopped changing before `max_iter`.
    pub converged: bool,
    /// Final rotation (Procrustes: `(c−1)×(c−1)`, Yu–Shi: `c×c`).
    pub rotation: Option<DMatrix<f64>>,
    /// Final class centers as rows (K-means only).
    pub centers: Option<DMatrix<f64>>,
    /// Secondary per-iteration quantity: the full residual `‖EG − UQ‖²_F`
    /// (Procrustes) or the unweighted within-class sum of squares (K-means).
    pub residual_trace: Vec<f64>,
    /// Empty-class repair moves made while forming the partition scored at
    /// the same index of `objective_trace`.
    pub repairs: Vec<usize>,
}

/// Index of the largest entry; ties go to the lowest index.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (k, v) in values.into_iter().enumerate() {
        if v > best_val {
            best = k;
            best_val = v;
        }
    }
    best
}

/// Fills empty classes one point at a time. `cost(i, k)` is the price of
/// moving point `i` into empty class `k`; the cheapest donor from a class
/// with more than one member is moved. Returns the number of moves.
pub(crate) fn repair_empty_classes(
    partition: &mut Partition,
    mut cost: impl FnMut(usize, usize) -> f64,
) -> Result<usize> {
    let c = partition.classes();
    let mut moves = 0;
    for _ in 0..c {
        let sizes = partition.class_sizes();
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return Ok(moves);
        };
        let mut donor = None;
        let mut best = f64::INFINITY;
        for (i, &l) in partition.labels().iter().enumerate() {
            if sizes[l] > 1 {
                let v = cost(i, empty);
                if v < best || donor.is_none() {
                    best = v;
                    donor = Some(i);
                }
            }
        }
        let Some(i) = donor else {
            return Err(Error::EmptyClassRepair(moves + 1));
        };
        partition.set(i, empty);
        moves += 1;
    }
    if partition.class_sizes().contains(&0) {
        Err(Error::EmptyClassRepair(c))
    } else {
        Ok(moves)
    }
}

/// Polar factor `ΘV'` of `m = ΘΛV'`: the orthogonal matrix maximizing `tr(Q'm)`.
pub(crate) fn polar_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    u * v_t
}
