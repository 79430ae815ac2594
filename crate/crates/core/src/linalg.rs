//! Dense linear-algebra helpers shared by the clustering modules.

use nalgebra::{DMatrix, DVector};

/// Relative eigenvalue cutoff for pseudo-inverses: λ ≤ n·λ_max·1e-12 counts as zero.
pub(crate) const RANK_RTOL: f64 = 1e-12;

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Flip `v` so that its largest-magnitude entry (lowest index on ties) is positive.
pub(crate) fn canonical_sign(v: &mut DVector<f64>) {
    let mut best = 0usize;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Symmetric eigendecomposition with eigenvalues in ascending order and
/// canonically signed eigenvectors.
pub(crate) fn sym_eigen_ascending(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut sym = m.clone();
    symmetrize(&mut sym);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: DVector<f64> = eig.eigenvectors.column(src).into_owned();
        canonical_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

fn rank_cutoff(values: &DVector<f64>) -> f64 {
    let n = values.len() as f64;
    let lmax = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    n * lmax * RANK_RTOL
}

/// Moore–Penrose inverse of a symmetric positive semidefinite matrix,
/// computed spectrally; eigenvalues at or below `n·λ_max·1e-12` are zeroed.
pub fn pseudo_inverse_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    spectral_map(m, |l| 1.0 / l)
}

/// Principal square root of a symmetric PSD matrix; null directions stay null.
pub(crate) fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    spectral_map(m, f64::sqrt)
}

fn spectral_map(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let n = m.nrows();
    let (values, vectors) = sym_eigen_ascending(m);
    let cutoff = rank_cutoff(&values);
    let mut scaled = vectors.clone();
    for k in 0..n {
        let l = values[k];
        let s = if l > cutoff { f(l) } else { 0.0 };
        scaled.column_mut(k).scale_mut(s);
    }
    let mut out = scaled * vectors.transpose();
    symmetrize(&mut out);
    out
}

/// Orthonormal basis (n × (n−1)) of the orthogonal complement of the unit vector `v`,
/// taken from the Householder reflector that maps `v` onto ±e₁.
pub(crate) fn complement_basis(v: &DVector<f64>) -> DMatrix<f64> {
    let n = v.len();
    let mut w = v.clone();
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    w[0] += sign;
    let wn2 = w.norm_squared();
    let mut h = DMatrix::<f64>::identity(n, n);
    if wn2 > 0.0 {
        h -= (&w * w.transpose()) * (2.0 / wn2);
    }
    h.columns(1, n - 1).into_owned()
}

/// Largest principal angle between the column spaces of `a` and `b`, reported
/// as its sine (`‖(I − P_a) Q_b‖₂`), which stays accurate near zero.
pub fn max_principal_angle_sine(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let residual = &qb - &qa * (qa.transpose() * &qb);
    residual
        .singular_values()
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
}
