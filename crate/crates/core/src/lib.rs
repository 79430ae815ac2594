//! Multiway spectral clustering built around the penalized cut (Pcut).
//!
//! The crate is organised the way a clustering run flows:
//!
//! * [`graph`] turns a data table into an affinity graph, Laplacians and
//!   centered kernels.
//! * [`relaxation`] evaluates the Pcut objective and solves the constrained
//!   eigenproblems that relax it (graph form and minimum-variance form).
//! * [`rounding`] converts a relaxed embedding into a hard partition with
//!   Procrustean margin rounding, weighted K-means or the Yu–Shi scheme.
//! * [`car`] exposes the Gaussian intrinsic autoregression view of the
//!   relaxation: densities, conditional moments, sampling and SAR residuals.
//! * [`evaluation`] holds the Rand index and the minimum-variance objectives.
//!
//! All matrices are dense `nalgebra` matrices; the intended scale is a few
//! thousand points at most.

pub mod car;
pub mod error;
pub mod evaluation;
pub mod graph;
pub(crate) mod linalg;
pub mod partition;
pub mod relaxation;
pub mod rounding;

pub use error::{Error, Result};
pub use graph::{
    AffinityGraph, DataMatrix, KernelMatrix, KernelVariant, LaplacianOperator, OperatorKind,
    WeightVector,
};
pub use linalg::{max_principal_angle_sine, pseudo_inverse_psd};
pub use nalgebra::{DMatrix, DVector};
pub use partition::Partition;
pub use relaxation::{EigenSystem, Embedding, PsiMatrix};
pub use rounding::{InitStrategy, RoundingResult};
