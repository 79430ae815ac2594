use log::warn;
use nalgebra::DMatrix;
use rand::Rng;

use super::init::assign_by_argmax;
use super::{initialize, polar_factor, repair_empty_classes, InitStrategy, RoundingResult};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// `dg(ZZ')^{-1/2} Z`. All-zero rows are left as zero; their indices are returned.
pub fn normalize_rows(z: &DMatrix<f64>) -> (DMatrix<f64>, Vec<usize>) {
    let mut out = z.clone();
    let mut zero_rows = Vec::new();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let norm = row.norm();
        if norm > 0.0 {
            row.unscale_mut(norm);
        } else {
            zero_rows.push(i);
        }
    }
    (out, zero_rows)
}

fn score_repair(p: &mut Partition, x: &DMatrix<f64>) -> Result<usize> {
    let labels = p.labels().to_vec();
    repair_empty_classes(p, |i, k| x[(i, labels[i])] - x[(i, k)])
}

/// Yu–Shi rounding of an `n × c` relaxation `Z`.
///
/// Rows of `Z` are normalized to unit length, then the rotation `R` maximizing
/// `tr(R'Ẑ'E)` and the argmax assignment of `ẐR` are alternated.
/// `objective_trace` records `‖E − ẐR‖²_F`. Zero rows of `Z` stay zero and
/// are assigned to the last class.
pub fn yu_shi_rounding<R: Rng + ?Sized>(
    z: &DMatrix<f64>,
    init: InitStrategy,
    max_iter: usize,
    rng: &mut R,
) -> Result<RoundingResult> {
    if max_iter == 0 {
        return Err(Error::MaxIter);
    }
    let c = z.ncols();
    let (zhat, zero_rows) = normalize_rows(z);
    if !zero_rows.is_empty() {
        warn!(
            "{} zero-norm rows in Yu-Shi input; assigning them to class {}",
            zero_rows.len(),
            c - 1
        );
    }
    let mut partition = initialize(&zhat, c, init, rng)?;
    let mut repairs = vec![score_repair(&mut partition, &zhat)?];

    let mut objective_trace = Vec::new();
    let mut rotation = DMatrix::identity(c, c);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let e = partition.indicator();
        rotation = polar_factor(&(zhat.transpose() * &e));
        let x = &zhat * &rotation;
        objective_trace.push((e - &x).norm_squared());

        let mut next = assign_by_argmax(&x);
        let moves = score_repair(&mut next, &x)?;
        if next == partition {
            converged = true;
            break;
        }
        partition = next;
        repairs.push(moves);
    }

    Ok(RoundingResult {
        partition,
        objective_trace,
        iterations,
        converged,
        rotation: Some(rotation),
        centers: None,
        residual_trace: Vec::new(),
        repairs,
    })
}
