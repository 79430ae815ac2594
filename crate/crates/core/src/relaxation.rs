//! The Pcut objective, its piecewise-constant witness `Y = EΨ`, and the two
//! constrained eigenproblems that relax it.
//!
//! Both solvers work in the `Π^{1/2}`-scaled coordinates `Y₀ = Π^{1/2} Y`,
//! where the centering constraint `Y'Π1 = 0` becomes orthogonality to
//! `v = Π^{1/2}1 / ‖Π^{1/2}1‖`. Instead of picking the trivial eigenvector
//! out of the full spectrum, `v` is deflated exactly: the operator is
//! restricted to an orthonormal basis of `v^⊥` before the eigensolve, so the
//! returned embedding satisfies the centering constraint to rounding error
//! even when the zero eigenvalue is repeated.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{AffinityGraph, KernelMatrix, LaplacianOperator, WeightVector};
use crate::linalg::{self, canonical_sign, pseudo_inverse_psd, symmetrize};
use crate::partition::Partition;

/// Largest problem the dense eigensolver accepts.
pub const MAX_DENSE_N: usize = 5000;

/// A relaxed `n × (c−1)` embedding and the weights it was solved under.
///
/// Invariants (for solver output): `Y'ΠY = I` and `Y'Π1 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    y: DMatrix<f64>,
    weights: WeightVector,
}

impl Embedding {
    pub fn new(y: DMatrix<f64>, weights: WeightVector) -> Result<Self> {
        if y.nrows() != weights.len() {
            return Err(Error::SizeMismatch(y.nrows(), weights.len()));
        }
        Ok(Self { y, weights })
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    /// Embedding width `c − 1`.
    pub fn width(&self) -> usize {
        self.y.ncols()
    }

    /// `U = Π^{1/2} Y`, which has orthonormal columns for solver output.
    pub fn basis(&self) -> DMatrix<f64> {
        self.weights.scale_rows(&self.y, 0.5)
    }

    /// `(‖Y'ΠY − I‖_max, ‖Y'Π1‖_max)`.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let py = self.weights.scale_rows(&self.y, 1.0);
        let gram = self.y.transpose() * &py;
        let k = self.width();
        let orth = (gram - DMatrix::<f64>::identity(k, k)).amax();
        let center = py.row_sum().amax();
        (orth, center)
    }

    /// The `n × c` Yu–Shi input `Z = [α1, Y]` with `α = (π'1)^{-1/2}`, i.e. the
    /// bottom `c` generalized eigenvectors including the trivial one.
    pub fn with_trivial_column(&self) -> DMatrix<f64> {
        let n = self.n();
        let alpha = 1.0 / self.weights.total().sqrt();
        let mut z = DMatrix::zeros(n, self.width() + 1);
        z.column_mut(0).fill(alpha);
        z.columns_mut(1, self.width()).copy_from(&self.y);
        z
    }
}

/// Spectrum of the scaled operator in the ordering `γ_1 ≤ γ_2 ≤ … ≤ γ_n`,
/// where index 0 always holds the trivial direction `Π^{1/2}1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    gammas: DVector<f64>,
    mus: DMatrix<f64>,
}

impl EigenSystem {
    pub fn gammas(&self) -> &DVector<f64> {
        &self.gammas
    }

    /// Orthonormal eigenvectors as columns, matching [`EigenSystem::gammas`].
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.mus
    }

    pub fn n(&self) -> usize {
        self.gammas.len()
    }

    /// `Σ_{i=2}^{c} γ_i`, the minimum of the graph relaxation.
    pub fn bottom_objective(&self, c: usize) -> f64 {
        self.gammas.rows(1, c - 1).sum()
    }

    /// Sum of the `c − 1` largest nontrivial eigenvalues, the maximum of the
    /// minimum-variance relaxation.
    pub fn top_objective(&self, c: usize) -> f64 {
        let n = self.n();
        self.gammas.rows(n - (c - 1), c - 1).sum()
    }
}

/// Closed-form `Ψ` whose rows form a simplex with `‖a_i − a_j‖² = 1/η_i + 1/η_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiMatrix {
    psi: DMatrix<f64>,
    class_weights: Vec<f64>,
}

impl PsiMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.psi
    }

    pub fn class_weights(&self) -> &[f64] {
        &self.class_weights
    }
}

fn check_pi(pi: &WeightVector, n: usize) -> Result<()> {
    if pi.len() != n {
        return Err(Error::SizeMismatch(pi.len(), n));
    }
    Ok(())
}

/// `Σ_j [W(V_j, V) − W(V_j, V_j)] / Σ_{i∈V_j} π_i`, evaluated from the sums.
pub fn pcut_graph(p: &Partition, g: &AffinityGraph, pi: &WeightVector) -> Result<f64> {
    let n = g.n();
    if p.len() != n {
        return Err(Error::SizeMismatch(p.len(), n));
    }
    check_pi(pi, n)?;
    p.require_nonempty()?;
    let w = g.weights();
    let labels = p.labels();
    let mut cut = vec![0.0; p.classes()];
    for i in 0..n {
        for j in 0..n {
            if labels[i] != labels[j] {
                cut[labels[i]] += w[(i, j)];
            }
        }
    }
    let eta = p.class_weights(pi)?;
    Ok(cut.iter().zip(&eta).map(|(c, e)| c / e).sum())
}

/// `tr(E'ME (E'ΠE)^{-1})` for any operator `M`.
pub fn pcut_matrix(p: &Partition, op: &LaplacianOperator, pi: &WeightVector) -> Result<f64> {
    let n = op.n();
    if p.len() != n {
        return Err(Error::SizeMismatch(p.len(), n));
    }
    check_pi(pi, n)?;
    p.require_nonempty()?;
    let e = p.indicator();
    let eme = e.transpose() * op.matrix() * &e;
    let eta = p.class_weights(pi)?;
    Ok((0..p.classes()).map(|j| eme[(j, j)] / eta[j]).sum())
}

/// Builds the `c × (c−1)` matrix `Ψ` for class weights `η`.
///
/// Column `l` is zero above row `l`, equals `√(S_{l+1} / (η_l S_l))` on row
/// `l` and `−√(η_l / (S_l S_{l+1}))` below it, with `S_l = Σ_{j≥l} η_j`.
pub fn build_psi(class_weights: &[f64]) -> Result<PsiMatrix> {
    let c = class_weights.len();
    if c < 2 {
        return Err(Error::ClassCount { c, n: c });
    }
    if let Some((index, &value)) = class_weights
        .iter()
        .enumerate()
        .find(|(_, &v)| !(v > 0.0) || !v.is_finite())
    {
        return Err(Error::NonPositiveWeight { index, value });
    }
    let mut tail = vec![0.0; c + 1];
    for j in (0..c).rev() {
        tail[j] = tail[j + 1] + class_weights[j];
    }
    let mut psi = DMatrix::zeros(c, c - 1);
    for l in 0..(c - 1) {
        let (eta_l, s_l, s_next) = (class_weights[l], tail[l], tail[l + 1]);
        psi[(l, l)] = (s_next / (eta_l * s_l)).sqrt();
        let below = -(eta_l / (s_l * s_next)).sqrt();
        for r in (l + 1)..c {
            psi[(r, l)] = below;
        }
    }
    Ok(PsiMatrix {
        psi,
        class_weights: class_weights.to_vec(),
    })
}

/// `Y = EΨ`: the piecewise-constant embedding of a partition.
pub fn embed_partition(p: &Partition, psi: &PsiMatrix, pi: &WeightVector) -> Result<Embedding> {
    check_pi(pi, p.len())?;
    if psi.psi.nrows() != p.classes() {
        return Err(Error::Shape(format!(
            "Ψ has {} rows but the partition has {} classes",
            psi.psi.nrows(),
            p.classes()
        )));
    }
    let eta = p.class_weights(pi)?;
    let matches = eta
        .iter()
        .zip(&psi.class_weights)
        .all(|(a, b)| (a - b).abs() <= 1e-9 * a.abs().max(1.0));
    if !matches {
        return Err(Error::Shape("Ψ was built for different class weights".into()));
    }
    let y = p.indicator() * &psi.psi;
    Embedding::new(y, pi.clone())
}

fn check_problem(n: usize, c: usize) -> Result<()> {
    if n > MAX_DENSE_N {
        return Err(Error::TooLarge { n, cap: MAX_DENSE_N });
    }
    if c < 2 || c > n {
        return Err(Error::ClassCount { c, n });
    }
    Ok(())
}

/// Eigendecomposition of symmetric `s` with the unit vector `v` deflated
/// exactly. Index 0 of the result is `v` itself.
fn deflated_eigensystem(s: &DMatrix<f64>, v: &DVector<f64>) -> EigenSystem {
    let n = s.nrows();
    let basis = linalg::complement_basis(v);
    let mut reduced = basis.transpose() * s * &basis;
    symmetrize(&mut reduced);
    let (values, vectors) = linalg::sym_eigen_ascending(&reduced);

    let mut gammas = DVector::zeros(n);
    let mut mus = DMatrix::zeros(n, n);
    gammas[0] = (v.transpose() * s * v)[(0, 0)];
    mus.set_column(0, v);
    for k in 0..(n - 1) {
        let mut mu: DVector<f64> = &basis * vectors.column(k);
        canonical_sign(&mut mu);
        gammas[k + 1] = values[k];
        mus.set_column(k + 1, &mu);
    }
    EigenSystem { gammas, mus }
}

fn trivial_direction(pi: &WeightVector) -> DVector<f64> {
    DVector::from_iterator(pi.len(), pi.as_slice().iter().map(|p| p.sqrt())).normalize()
}

/// Minimizes `tr(Y'MY)` subject to `Y'ΠY = I`, `Y'Π1 = 0`.
///
/// Returns `Y = Π^{-1/2}[μ_2, …, μ_c]` (rotation fixed to the identity) and the
/// spectrum of `Π^{-1/2} M Π^{-1/2}`. The attained minimum is
/// [`EigenSystem::bottom_objective`].
pub fn solve_relaxation(
    op: &LaplacianOperator,
    pi: &WeightVector,
    c: usize,
) -> Result<(Embedding, EigenSystem)> {
    let n = op.n();
    check_problem(n, c)?;
    check_pi(pi, n)?;
    let s = pi.congruence(op.matrix(), -0.5);
    let es = deflated_eigensystem(&s, &trivial_direction(pi));
    let u = es.mus.columns(1, c - 1).into_owned();
    let y = pi.scale_rows(&u, -0.5);
    Ok((Embedding::new(y, pi.clone())?, es))
}

/// `Π^{1/2} H_π' K H_π Π^{1/2}` with `H_π = I − π1'/(π'1)`.
pub(crate) fn minvar_operator(k: &KernelMatrix, pi: &WeightVector) -> DMatrix<f64> {
    let n = k.n();
    let total = pi.total();
    let pv = pi.to_vector();
    let ones = DVector::from_element(n, 1.0);
    let h = DMatrix::<f64>::identity(n, n) - (&pv * ones.transpose()) / total;
    let mut centered = h.transpose() * k.matrix() * &h;
    symmetrize(&mut centered);
    pi.congruence(&centered, 0.5)
}

/// Maximizes `tr(Y'ΠKΠY)` subject to `Y'ΠY = I`, `Y'Π1 = 0`.
///
/// Columns of the returned `Y` are ordered by decreasing eigenvalue; the
/// attained maximum is [`EigenSystem::top_objective`].
pub fn solve_minvar_relaxation(
    k: &KernelMatrix,
    pi: &WeightVector,
    c: usize,
) -> Result<(Embedding, EigenSystem)> {
    let n = k.n();
    check_problem(n, c)?;
    check_pi(pi, n)?;
    let t = minvar_operator(k, pi);
    let es = deflated_eigensystem(&t, &trivial_direction(pi));
    let mut u = DMatrix::zeros(n, c - 1);
    for j in 0..(c - 1) {
        u.set_column(j, &es.mus.column(n - 1 - j));
    }
    let y = pi.scale_rows(&u, -0.5);
    Ok((Embedding::new(y, pi.clone())?, es))
}

/// `γ_{c+1} − γ_c` in the ascending ordering.
pub fn eigengap(es: &EigenSystem, c: usize) -> Result<f64> {
    let n = es.n();
    if c == 0 || c + 1 > n {
        return Err(Error::ClassCount { c, n });
    }
    Ok(es.gammas[c] - es.gammas[c - 1])
}

/// Gap between the `(c−1)`-th and `c`-th largest nontrivial eigenvalues, the
/// analogue of [`eigengap`] for the minimum-variance spectrum.
pub fn top_eigengap(es: &EigenSystem, c: usize) -> Result<f64> {
    let n = es.n();
    if c < 2 || c > n - 1 {
        return Err(Error::ClassCount { c, n });
    }
    Ok(es.gammas[n - (c - 1)] - es.gammas[n - c])
}

/// `‖K K⁺ Y − Y‖_F / ‖Y‖_F`: how far `Y` sits from the range of `K`.
pub fn range_consistency(y: &DMatrix<f64>, k: &KernelMatrix) -> f64 {
    let projector = k.matrix() * pseudo_inverse_psd(k.matrix());
    let norm = y.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (projector * y - y).norm() / norm
}
