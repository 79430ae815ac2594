use nalgebra::DMatrix;
use rand::Rng;

use super::{argmax, initialize, polar_factor, repair_empty_classes, InitStrategy, RoundingResult};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::relaxation::Embedding;

/// `G = [I_{c−1} − (1/c)11', −(1/c)1]'`, a `c × (c−1)` matrix whose rows are
/// the class targets `g_j`.
pub fn g_matrix(c: usize) -> DMatrix<f64> {
    let inv = 1.0 / c as f64;
    DMatrix::from_fn(c, c - 1, |j, l| if j == l { 1.0 - inv } else { -inv })
}

/// Rotation `Q = ΘV'` from the SVD `U'EG = ΘΛV'`; it maximizes `tr(Q'U'EG)`
/// and so minimizes `‖EG − UQ‖²_F` over orthogonal `Q`.
pub fn procrustes_align(u: &DMatrix<f64>, p: &Partition) -> Result<DMatrix<f64>> {
    let c = p.classes();
    if c < 2 || u.ncols() + 1 != c || u.nrows() != p.len() {
        return Err(Error::Shape(format!(
            "U is {}x{} but the partition has {} items in {c} classes",
            u.nrows(),
            u.ncols(),
            p.len()
        )));
    }
    if p.nonempty_classes() < 2 {
        return Err(Error::DegeneratePartition);
    }
    Ok(polar_factor(&alignment_matrix(u, p)))
}

/// `U'EG` without forming `E`.
fn alignment_matrix(u: &DMatrix<f64>, p: &Partition) -> DMatrix<f64> {
    let c = p.classes();
    let g = g_matrix(c);
    let mut ueg = DMatrix::zeros(c - 1, c - 1);
    for (i, &t) in p.labels().iter().enumerate() {
        ueg += u.row(i).transpose() * g.row(t);
    }
    ueg
}

/// Class by largest margin: `argmax_j y_ij` if positive, otherwise the last
/// class `c − 1`. Equivalently the argmax of `(y_i1, …, y_i,c−1, 0)` with
/// ties toward the lowest index.
pub fn assign_by_margin(y: &DMatrix<f64>) -> Partition {
    let c = y.ncols() + 1;
    let labels = y
        .row_iter()
        .map(|r| {
            let t = argmax(r.iter().copied());
            if r[t] > 0.0 {
                t
            } else {
                c - 1
            }
        })
        .collect();
    Partition::new(labels, c).expect("margin labels are in range")
}

/// Margin scores `(y_i1, …, y_i,c−1, 0)` for row `i`, class `k`.
fn margin_score(y: &DMatrix<f64>, i: usize, k: usize) -> f64 {
    if k < y.ncols() {
        y[(i, k)]
    } else {
        0.0
    }
}

fn margin_repair(p: &mut Partition, y: &DMatrix<f64>) -> Result<usize> {
    let labels = p.labels().to_vec();
    repair_empty_classes(p, |i, k| margin_score(y, i, labels[i]) - margin_score(y, i, k))
}

/// Procrustean rounding of a relaxed embedding.
///
/// Each iteration fits `Q` to the current partition with
/// [`procrustes_align`] and reassigns every row of `Y = Π^{-1/2}UQ` with
/// [`assign_by_margin`]. Both steps increase the alignment `tr(Q'U'EG)`
/// (the margin rule picks, row by row, the target `g_j` with the largest
/// inner product), so `objective_trace` records
/// `‖UQ‖² − 2 tr(Q'U'EG) = (c−1) − 2 tr(Q'U'EG)`, which is `‖EG − UQ‖²_F`
/// without the partition-size term `‖EG‖²`. The full residual is kept in
/// `residual_trace`.
pub fn procrustean_rounding<R: Rng + ?Sized>(
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
    let u = emb.basis();
    let g = g_matrix(c);
    let mut partition = initialize(emb.y(), c, init, rng)?;
    let mut repairs = vec![margin_repair(&mut partition, &u)?];

    let mut objective_trace = Vec::new();
    let mut residual_trace = Vec::new();
    let mut rotation = DMatrix::identity(c - 1, c - 1);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        rotation = procrustes_align(&u, &partition)?;
        let uq = &u * &rotation;
        let alignment = (rotation.transpose() * alignment_matrix(&u, &partition)).trace();
        objective_trace.push(uq.norm_squared() - 2.0 * alignment);
        let eg = partition.indicator() * &g;
        residual_trace.push((eg - &uq).norm_squared());

        let y = emb.weights().scale_rows(&uq, -0.5);
        let mut next = assign_by_margin(&y);
        // repair on UQ so the donor is the one losing the least alignment
        let moves = margin_repair(&mut next, &uq)?;
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
        residual_trace,
        repairs,
    })
}
