//! Gaussian intrinsic autoregression (CAR) and simultaneous autoregression
//! (SAR) views of the graph relaxation.
//!
//! The embedding `Y` is modelled as singular matrix normal
//! `N(0, σ² K ⊗ I)` with `K = M⁺`, so the log-density is
//! `−tr(Y'MY) / (2σ²)` up to a constant and the relaxation is constrained
//! maximum likelihood.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{
    laplacian_kernel, random_walk_matrix, AffinityGraph, KernelMatrix, LaplacianOperator,
    WeightVector,
};
use crate::linalg::{psd_sqrt, sym_eigen_ascending};

/// Intrinsic autoregression with precision `M / σ²` on `(c−1)`-wide rows.
#[derive(Debug, Clone)]
pub struct CarSpec {
    operator: LaplacianOperator,
    kernel: KernelMatrix,
    sigma2: f64,
    width: usize,
}

impl CarSpec {
    pub fn new(operator: LaplacianOperator, sigma2: f64, width: usize) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::NonPositiveTrace(sigma2));
        }
        if width == 0 {
            return Err(Error::Shape("embedding width must be at least 1".into()));
        }
        let kernel = laplacian_kernel(&operator);
        Ok(Self {
            operator,
            kernel,
            sigma2,
            width,
        })
    }

    /// `σ²` chosen by [`sigma_from_pi`] so that `E(Y'ΠY) = I`.
    pub fn with_weights(operator: LaplacianOperator, pi: &WeightVector, width: usize) -> Result<Self> {
        let kernel = laplacian_kernel(&operator);
        let sigma2 = sigma_from_pi(&kernel, pi)?;
        Ok(Self {
            operator,
            kernel,
            sigma2,
            width,
        })
    }

    pub fn operator(&self) -> &LaplacianOperator {
        &self.operator
    }

    /// `K = M⁺`.
    pub fn kernel(&self) -> &KernelMatrix {
        &self.kernel
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

/// `σ² = 1 / tr(ΠK)`.
pub fn sigma_from_pi(k: &KernelMatrix, pi: &WeightVector) -> Result<f64> {
    if pi.len() != k.n() {
        return Err(Error::SizeMismatch(pi.len(), k.n()));
    }
    let trace: f64 = pi
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, p)| p * k.matrix()[(i, i)])
        .sum();
    if !(trace > 0.0) {
        return Err(Error::NonPositiveTrace(trace));
    }
    Ok(1.0 / trace)
}

fn check_shape(y: &DMatrix<f64>, spec: &CarSpec) -> Result<()> {
    if y.nrows() != spec.operator.n() || y.ncols() != spec.width {
        return Err(Error::Shape(format!(
            "Y is {}x{}, model expects {}x{}",
            y.nrows(),
            y.ncols(),
            spec.operator.n(),
            spec.width
        )));
    }
    Ok(())
}

/// `−tr(Y'MY) / (2σ²)`, the log-density up to an additive constant.
pub fn log_density(y: &DMatrix<f64>, spec: &CarSpec) -> Result<f64> {
    check_shape(y, spec)?;
    let quad = (y.transpose() * spec.operator.matrix() * y).trace();
    Ok(-quad / (2.0 * spec.sigma2))
}

/// Full conditional of row `i` given all other rows.
///
/// Returns the mean `ω Σ_{j≠i} (w_ij / l_ii) y_j` and the isotropic variance
/// `σ² / l_ii`, with `l_ii = Σ_{j≠i} w_ij`. `omega = None` is the intrinsic
/// model (`ω = 1`); `Some(ω)` with `ω ∈ (0, 1)` gives the proper `D − ωW` CAR mean.
pub fn conditional_moments(
    i: usize,
    y: &DMatrix<f64>,
    g: &AffinityGraph,
    spec: &CarSpec,
    omega: Option<f64>,
) -> Result<(DVector<f64>, f64)> {
    let n = g.n();
    if i >= n || y.nrows() != n {
        return Err(Error::Shape(format!("node {i} / {} rows for n = {n}", y.nrows())));
    }
    let w = g.weights();
    let lii: f64 = (0..n).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
    if !(lii > 0.0) {
        return Err(Error::IsolatedVertex(i));
    }
    let scale = omega.unwrap_or(1.0);
    let mut mean = DVector::zeros(y.ncols());
    for j in (0..n).filter(|&j| j != i) {
        mean += y.row(j).transpose() * (scale * w[(i, j)] / lii);
    }
    Ok((mean, spec.sigma2 / lii))
}

/// Draws `count` matrices `√σ² · K^{1/2} Z` with `Z` standard normal.
///
/// `K^{1/2}` keeps the null space of `K`, so every sample has zero column sums.
pub fn sample_car<R: Rng + ?Sized>(
    spec: &CarSpec,
    count: usize,
    rng: &mut R,
) -> Result<Vec<DMatrix<f64>>> {
    if count == 0 {
        return Err(Error::SampleCount);
    }
    let root = psd_sqrt(spec.kernel.matrix()) * spec.sigma2.sqrt();
    let n = root.nrows();
    Ok((0..count)
        .map(|_| {
            let z = DMatrix::from_fn(n, spec.width, |_, _| rng.sample::<f64, _>(StandardNormal));
            &root * z
        })
        .collect())
}

/// Row-stochastic, zero-diagonal autoregression matrix `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct SarSpec {
    c: DMatrix<f64>,
}

impl SarSpec {
    pub fn new(c: DMatrix<f64>) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::Shape(format!("C is {}x{}", c.nrows(), c.ncols())));
        }
        for i in 0..c.nrows() {
            if c[(i, i)] != 0.0 {
                return Err(Error::InvalidMatrix(format!("c_{i}{i} is nonzero")));
            }
            let row = c.row(i);
            if row.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                return Err(Error::InvalidMatrix(format!("row {i} has a negative entry")));
            }
            if (row.sum() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidMatrix(format!("row {i} does not sum to one")));
            }
        }
        Ok(Self { c })
    }

    /// `C = D⁻¹W` for a zero-diagonal graph without isolated vertices.
    pub fn from_graph(g: &AffinityGraph) -> Result<Self> {
        if !g.zero_diagonal() {
            return Err(Error::NonZeroDiagonal);
        }
        Self::new(random_walk_matrix(g)?)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// `(I − C)'(I − C)`, the precision of the SAR model up to `σ²`.
    pub fn precision(&self) -> DMatrix<f64> {
        let n = self.c.nrows();
        let a = DMatrix::identity(n, n) - &self.c;
        a.transpose() * a
    }
}

/// `ε = Y − CY`.
pub fn sar_residuals(y: &DMatrix<f64>, sar: &SarSpec) -> Result<DMatrix<f64>> {
    if y.nrows() != sar.c.nrows() {
        return Err(Error::SizeMismatch(y.nrows(), sar.c.nrows()));
    }
    Ok(y - &sar.c * y)
}

/// Largest discrepancy between the sorted spectra of the symmetric
/// normalized Laplacian `I − D^{-1/2}WD^{-1/2}` and the random-walk
/// Laplacian `I − D⁻¹W`. The latter is solved as a general (nonsymmetric)
/// eigenproblem via the real Schur form; imaginary parts count toward the
/// discrepancy.
pub fn spectrum_equivalence(g: &AffinityGraph) -> Result<f64> {
    let n = g.n();
    let c = random_walk_matrix(g)?;
    let d_inv_sqrt: Vec<f64> = g.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let w = g.weights();
    let sym = DMatrix::from_fn(n, n, |i, j| {
        let v = -d_inv_sqrt[i] * w[(i, j)] * d_inv_sqrt[j];
        if i == j {
            1.0 + v
        } else {
            v
        }
    });
    let (sym_values, _) = sym_eigen_ascending(&sym);

    let rw = DMatrix::identity(n, n) - c;
    let mut asym: Vec<(f64, f64)> = rw
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    asym.sort_by(|a, b| a.0.total_cmp(&b.0));

    Ok(sym_values
        .iter()
        .zip(&asym)
        .map(|(s, (re, im))| (s - re).abs().max(im.abs()))
        .fold(0.0, f64::max))
}
