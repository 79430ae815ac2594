//! Hard assignments of items to classes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightVector;

/// Assignment of `n` items to `c` classes, labelled `0..c`.
///
/// Interchangeable with the `n × c` binary indicator matrix `E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    classes: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, classes: usize) -> Result<Self> {
        if let Some(&label) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::LabelOutOfRange { label, classes });
        }
        Ok(Self { labels, classes })
    }

    /// Class count taken as `max(label) + 1`.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let classes = labels.iter().max().map_or(0, |&m| m + 1);
        Self { labels, classes }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.classes];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// `η_j = Σ_{i∈V_j} π_i`.
    pub fn class_weights(&self, pi: &WeightVector) -> Result<Vec<f64>> {
        if pi.len() != self.len() {
            return Err(Error::SizeMismatch(pi.len(), self.len()));
        }
        let mut eta = vec![0.0; self.classes];
        for (i, &l) in self.labels.iter().enumerate() {
            eta[l] += pi.as_slice()[i];
        }
        Ok(eta)
    }

    /// Errors with the first empty class, if any.
    pub fn require_nonempty(&self) -> Result<()> {
        match self.class_sizes().iter().position(|&s| s == 0) {
            Some(j) => Err(Error::EmptyClass(j)),
            None => Ok(()),
        }
    }

    pub fn nonempty_classes(&self) -> usize {
        self.class_sizes().iter().filter(|&&s| s > 0).count()
    }

    pub fn indicator(&self) -> DMatrix<f64> {
        let mut e = DMatrix::zeros(self.len(), self.classes);
        for (i, &l) in self.labels.iter().enumerate() {
            e[(i, l)] = 1.0;
        }
        e
    }

    /// Inverse of [`Partition::indicator`]; rows must contain exactly one 1.
    pub fn from_indicator(e: &DMatrix<f64>) -> Result<Self> {
        let mut labels = Vec::with_capacity(e.nrows());
        for i in 0..e.nrows() {
            let row = e.row(i);
            let ones: Vec<usize> = (0..e.ncols()).filter(|&j| row[j] == 1.0).collect();
            let zeros = (0..e.ncols()).filter(|&j| row[j] == 0.0).count();
            if ones.len() != 1 || zeros + 1 != e.ncols() {
                return Err(Error::InvalidMatrix(format!("indicator row {i} is not one-hot")));
            }
            labels.push(ones[0]);
        }
        Self::new(labels, e.ncols())
    }

    pub(crate) fn set(&mut self, i: usize, label: usize) {
        debug_assert!(label < self.classes);
        self.labels[i] = label;
    }
}

/// Map arbitrary string labels to dense ids in first-occurrence order.
pub(crate) fn densify_labels<S: AsRef<str>>(raw: &[S]) -> Partition {
    let mut seen: Vec<&str> = Vec::new();
    let labels = raw
        .iter()
        .map(|s| {
            let s = s.as_ref();
            match seen.iter().position(|&t| t == s) {
                Some(k) => k,
                None => {
                    seen.push(s);
                    seen.len() - 1
                }
            }
        })
        .collect();
    Partition {
        labels,
        classes: seen.len(),
    }
}
