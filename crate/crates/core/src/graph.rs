//! Data ingestion and the graph-side matrices: affinities, degrees,
//! Laplacians and centered kernels.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, pseudo_inverse_psd, symmetrize};
use crate::partition::{densify_labels, Partition};

const SYMMETRY_TOL: f64 = 1e-12;
const NULL_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-8;

/// `n` samples of dimension `d`, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: DMatrix<f64>,
}

impl DataMatrix {
    pub fn new(rows: DMatrix<f64>) -> Result<Self> {
        if rows.nrows() < 2 {
            return Err(Error::TooFewRows);
        }
        if rows.ncols() < 1 {
            return Err(Error::Shape("data matrix needs at least one column".into()));
        }
        for j in 0..rows.ncols() {
            for i in 0..rows.nrows() {
                if !rows[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, column: j });
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: d,
                    found: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn d(&self) -> usize {
        self.rows.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rows
    }
}

/// Reads a comma-separated numeric table.
///
/// A first line containing a non-numeric feature cell is treated as a header.
/// When `label_column` is set, that column is removed from the features and
/// returned as a partition with labels numbered in first-occurrence order.
pub fn load_dataset(
    path: impl AsRef<Path>,
    label_column: Option<usize>,
) -> Result<(DataMatrix, Option<Partition>)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text, label_column)
}

/// In-memory variant of [`load_dataset`].
pub fn parse_dataset(
    text: &str,
    label_column: Option<usize>,
) -> Result<(DataMatrix, Option<Partition>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec?);
    }
    if records.is_empty() {
        return Err(Error::TooFewRows);
    }

    let width = records[0].len();
    if let Some(col) = label_column {
        if col >= width {
            return Err(Error::LabelColumn { column: col, width });
        }
    }
    let is_feature = |j: usize| Some(j) != label_column;

    let first_is_header = records[0]
        .iter()
        .enumerate()
        .any(|(j, cell)| is_feature(j) && cell.parse::<f64>().is_err());
    let body = if first_is_header { &records[1..] } else { &records[..] };
    if body.len() < 2 {
        return Err(Error::TooFewRows);
    }

    let mut features = Vec::with_capacity(body.len());
    let mut labels = Vec::new();
    for (r, rec) in body.iter().enumerate() {
        let row_no = r + usize::from(first_is_header);
        if rec.len() != width {
            return Err(Error::RaggedRow {
                row: row_no,
                expected: width,
                found: rec.len(),
            });
        }
        let mut row = Vec::with_capacity(width);
        for (j, cell) in rec.iter().enumerate() {
            if !is_feature(j) {
                labels.push(cell.to_string());
                continue;
            }
            let v = cell.parse::<f64>().map_err(|_| Error::NonNumeric {
                row: row_no,
                column: j,
                value: cell.to_string(),
            })?;
            row.push(v);
        }
        features.push(row);
    }

    let data = DataMatrix::from_rows(&features)?;
    let truth = label_column.map(|_| densify_labels(&labels));
    Ok((data, truth))
}

/// Centers every column and scales it to unit sample standard deviation
/// (divisor `n − 1`). Constant columns become zero.
pub fn standardize(x: &DataMatrix) -> DataMatrix {
    let n = x.n();
    let mut out = x.rows.clone();
    for j in 0..x.d() {
        let col = x.rows.column(j);
        let mean = col.sum() / n as f64;
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        let constant = sd <= 1e-14 * mean.abs().max(1.0);
        for i in 0..n {
            out[(i, j)] = if constant { 0.0 } else { (x.rows[(i, j)] - mean) / sd };
        }
    }
    DataMatrix { rows: out }
}

/// Symmetric nonnegative affinity matrix together with its degree vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    w: DMatrix<f64>,
    degrees: DVector<f64>,
    zero_diagonal: bool,
}

impl AffinityGraph {
    /// Validates a user-supplied weight matrix.
    pub fn from_weights(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::Shape(format!("affinity is {}x{}", w.nrows(), w.ncols())));
        }
        let n = w.nrows();
        for j in 0..n {
            for i in 0..n {
                let v = w[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, column: j });
                }
                if v < 0.0 {
                    return Err(Error::InvalidMatrix(format!("negative weight at ({i}, {j})")));
                }
            }
        }
        if linalg::max_asymmetry(&w) > SYMMETRY_TOL {
            return Err(Error::InvalidMatrix("affinity is not symmetric".into()));
        }
        Ok(Self::from_trusted(w))
    }

    fn from_trusted(w: DMatrix<f64>) -> Self {
        let degrees = DVector::from_iterator(w.nrows(), w.row_iter().map(|r| r.sum()));
        let zero_diagonal = w.diagonal().iter().all(|&v| v == 0.0);
        Self {
            w,
            degrees,
            zero_diagonal,
        }
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn degrees(&self) -> &DVector<f64> {
        &self.degrees
    }

    pub fn zero_diagonal(&self) -> bool {
        self.zero_diagonal
    }

    pub(crate) fn require_no_isolated(&self) -> Result<()> {
        match self.degrees.iter().position(|&d| d <= 0.0) {
            Some(i) => Err(Error::IsolatedVertex(i)),
            None => Ok(()),
        }
    }
}

/// Gaussian affinity `w_ij = exp(−‖x_i − x_j‖² / β)`.
pub fn build_affinity(x: &DataMatrix, beta: f64, zero_diagonal: bool) -> Result<AffinityGraph> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidBeta(beta));
    }
    let n = x.n();
    let rows = x.matrix();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        w[(i, i)] = if zero_diagonal { 0.0 } else { 1.0 };
        for j in (i + 1)..n {
            let d2 = (rows.row(i) - rows.row(j)).norm_squared();
            let v = (-d2 / beta).exp();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    Ok(AffinityGraph::from_trusted(w))
}

/// Strictly positive diagonal weights `π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = pi
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > 0.0) || !v.is_finite())
        {
            return Err(Error::NonPositiveWeight { index, value });
        }
        Ok(Self(pi))
    }

    /// `Π = I` (ratio cut).
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    /// `Π = D` (normalized cut).
    pub fn degrees(g: &AffinityGraph) -> Result<Self> {
        g.require_no_isolated()?;
        Ok(Self(g.degrees.iter().copied().collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    /// Scales row `i` of `m` by `π_i^p`.
    pub(crate) fn scale_rows(&self, m: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
        let mut out = m.clone();
        for (i, mut row) in out.row_iter_mut().enumerate() {
            row *= self.0[i].powf(p);
        }
        out
    }

    /// `Π^p M Π^p` for a square `m`.
    pub(crate) fn congruence(&self, m: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
        let n = m.nrows();
        let s: Vec<f64> = self.0.iter().map(|v| v.powf(p)).collect();
        DMatrix::from_fn(n, n, |i, j| s[i] * m[(i, j)] * s[j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    /// `D − W`.
    Plain,
    /// `(I − D⁻¹W)'(I − D⁻¹W)`.
    Sar,
}

/// Symmetric PSD matrix that annihilates the ones vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianOperator {
    m: DMatrix<f64>,
    kind: OperatorKind,
}

impl LaplacianOperator {
    /// Checks symmetry, `M·1 = 0` and positive semidefiniteness.
    pub fn new(m: DMatrix<f64>, kind: OperatorKind) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!("operator is {}x{}", m.nrows(), m.ncols())));
        }
        let scale = m.amax().max(1.0);
        if linalg::max_asymmetry(&m) > NULL_TOL * scale {
            return Err(Error::InvalidMatrix("operator is not symmetric".into()));
        }
        let ones = DVector::from_element(m.nrows(), 1.0);
        if (&m * ones).amax() > NULL_TOL * scale {
            return Err(Error::InvalidMatrix("operator does not annihilate the ones vector".into()));
        }
        let (values, _) = linalg::sym_eigen_ascending(&m);
        if values[0] < -PSD_TOL * scale {
            return Err(Error::InvalidMatrix(format!(
                "operator is not PSD (min eigenvalue {})",
                values[0]
            )));
        }
        Ok(Self { m, kind })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }
}

/// `L = D − W`.
pub fn laplacian(g: &AffinityGraph) -> LaplacianOperator {
    let mut m = -g.w.clone();
    for i in 0..g.n() {
        m[(i, i)] += g.degrees[i];
    }
    LaplacianOperator {
        m,
        kind: OperatorKind::Plain,
    }
}

/// Row-stochastic `D⁻¹W`.
pub(crate) fn random_walk_matrix(g: &AffinityGraph) -> Result<DMatrix<f64>> {
    g.require_no_isolated()?;
    let mut c = g.w.clone();
    for (i, mut row) in c.row_iter_mut().enumerate() {
        row /= g.degrees[i];
    }
    Ok(c)
}

/// `(I − D⁻¹W)'(I − D⁻¹W)`: PSD and annihilates ones, but generally not a Laplacian.
pub fn sar_laplacian(g: &AffinityGraph) -> Result<LaplacianOperator> {
    let c = random_walk_matrix(g)?;
    let a = DMatrix::identity(g.n(), g.n()) - c;
    let mut m = a.transpose() * a;
    symmetrize(&mut m);
    Ok(LaplacianOperator {
        m,
        kind: OperatorKind::Sar,
    })
}

/// Symmetric PSD kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    k: DMatrix<f64>,
    centered: bool,
}

impl KernelMatrix {
    /// Validates symmetry and positive semidefiniteness; `centered` is
    /// detected from `K·1 ≈ 0`.
    pub fn new(k: DMatrix<f64>) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::Shape(format!("kernel is {}x{}", k.nrows(), k.ncols())));
        }
        let scale = k.amax().max(1.0);
        if linalg::max_asymmetry(&k) > NULL_TOL * scale {
            return Err(Error::InvalidMatrix("kernel is not symmetric".into()));
        }
        let (values, _) = linalg::sym_eigen_ascending(&k);
        if !values.is_empty() && values[0] < -PSD_TOL * scale {
            return Err(Error::InvalidMatrix(format!(
                "kernel is not PSD (min eigenvalue {})",
                values[0]
            )));
        }
        Ok(Self::from_trusted(k))
    }

    fn from_trusted(mut k: DMatrix<f64>) -> Self {
        symmetrize(&mut k);
        let ones = DVector::from_element(k.nrows(), 1.0);
        let centered = (&k * ones).amax() <= NULL_TOL * k.amax().max(1.0);
        Self { k, centered }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    pub fn n(&self) -> usize {
        self.k.nrows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelVariant {
    /// `H W H`.
    Plain,
    /// `H (I + W) H`, for zero-diagonal graphs.
    PlusIdentity,
}

/// `H_n = I − 11'/n`.
#[cfg(test)]
pub(crate) fn centering_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64)
}

/// Centers `m` on both sides: `H m H`.
fn double_center(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let row_means: Vec<f64> = (0..n).map(|i| m.row(i).sum() / n as f64).collect();
    let col_means: Vec<f64> = (0..n).map(|j| m.column(j).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    DMatrix::from_fn(n, n, |i, j| m[(i, j)] - row_means[i] - col_means[j] + grand)
}

pub fn centered_kernel(g: &AffinityGraph, variant: KernelVariant) -> Result<KernelMatrix> {
    let base = match variant {
        KernelVariant::Plain => g.w.clone(),
        KernelVariant::PlusIdentity => {
            if !g.zero_diagonal {
                return Err(Error::NonZeroDiagonal);
            }
            &g.w + DMatrix::identity(g.n(), g.n())
        }
    };
    Ok(KernelMatrix::from_trusted(double_center(&base)))
}

/// Moore–Penrose inverse of the operator, viewed as a kernel.
pub fn laplacian_kernel(op: &LaplacianOperator) -> KernelMatrix {
    KernelMatrix::from_trusted(pseudo_inverse_psd(&op.m))
}

/// Squared feature-space distances `K_ii + K_jj − 2K_ij`.
pub fn feature_distances(k: &KernelMatrix) -> DMatrix<f64> {
    let n = k.n();
    let km = &k.k;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (km[(i, i)] + km[(j, j)] - 2.0 * km[(i, j)]).max(0.0)
        }
    })
}
