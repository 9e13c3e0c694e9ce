//! Finite families of vectors in `C^n`, stored as the columns of a synthesis matrix.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{columns_of, real, CMatrix, CVector, C64};

/// An indexed family `(f_i)` of `count` vectors in a `dim`-dimensional complex
/// Hilbert space. Column `i` of the synthesis matrix is `f_i`.
///
/// Inner products are linear in the first argument: `<x, y> = y* x`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSystem {
    columns: CMatrix,
    labels: Option<Vec<String>>,
}

impl VectorSystem {
    pub fn new(columns: CMatrix) -> Result<Self> {
        Self::with_labels(columns, None)
    }

    pub fn with_labels(columns: CMatrix, labels: Option<Vec<String>>) -> Result<Self> {
        let (dim, count) = columns.shape();
        if dim == 0 {
            return Err(Error::InvalidSystem("dim must be at least 1".into()));
        }
        if count == 0 {
            return Err(Error::InvalidSystem("count must be at least 1".into()));
        }
        if columns
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidSystem("entries must be finite".into()));
        }
        if let Some(labels) = &labels {
            if labels.len() != count {
                return Err(Error::InvalidSystem(format!(
                    "{} labels for {} vectors",
                    labels.len(),
                    count
                )));
            }
            let mut seen = HashSet::new();
            for l in labels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::InvalidSystem(format!("duplicate label {l:?}")));
                }
            }
        }
        Ok(VectorSystem { columns, labels })
    }

    /// Builds a system from real column vectors, embedding them in `C^n`.
    pub fn from_real_columns(dim: usize, cols: &[Vec<f64>]) -> Result<Self> {
        for (i, c) in cols.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::InvalidSystem(format!(
                    "column {i} has length {}, expected {dim}",
                    c.len()
                )));
            }
        }
        Self::new(CMatrix::from_fn(dim, cols.len(), |i, j| real(cols[j][i])))
    }

    /// The standard orthonormal basis of `C^n`.
    pub fn orthonormal(n: usize) -> Result<Self> {
        Self::new(CMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn count(&self) -> usize {
        self.columns.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.columns
    }

    pub fn into_matrix(self) -> CMatrix {
        self.columns
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.columns.column(i).into_owned()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.columns.column_iter().map(|c| c.norm()).collect()
    }

    /// Sub-family indexed by `indices`, in the given order. Labels follow.
    pub fn subsystem(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.count()) {
            return Err(Error::BadParameter(format!(
                "index {bad} out of range for {} vectors",
                self.count()
            )));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        Self::with_labels(columns_of(&self.columns, indices), labels)
    }

    /// Each nonzero vector divided by its norm; zero vectors are rejected.
    pub fn normalized(&self) -> Result<Self> {
        let mut cols = self.columns.clone();
        for mut c in cols.column_iter_mut() {
            let n = c.norm();
            if n == 0.0 {
                return Err(Error::ZeroNorm);
            }
            c.unscale_mut(n);
        }
        Self::with_labels(cols, self.labels.clone())
    }

    /// Applies a linear map to every vector.
    pub fn mapped(&self, map: &CMatrix) -> Result<Self> {
        if map.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: map.ncols(),
            });
        }
        Self::with_labels(map * &self.columns, self.labels.clone())
    }

    /// `sum_i coeffs_i f_i`.
    pub fn synthesis_apply(&self, coeffs: &CVector) -> Result<CVector> {
        if coeffs.len() != self.count() {
            return Err(Error::DimensionMismatch {
                expected: self.count(),
                found: coeffs.len(),
            });
        }
        Ok(&self.columns * coeffs)
    }

    /// `(<f, f_i>)_i`.
    pub fn analysis_apply(&self, f: &CVector) -> Result<CVector> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: f.len(),
            });
        }
        Ok(self.columns.adjoint() * f)
    }
}

/// `<x, y>` with linearity in the first argument.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.dotc(x)
}
