//! Dense complex linear algebra helpers shared by the frame and metric modules.
//!
//! Everything here is a thin layer over `nalgebra`: Hermitian eigendecomposition
//! with a fixed (nonincreasing) ordering, singular values, pseudoinverses and
//! spectral matrix functions.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Spectral data of a Hermitian matrix, eigenvalues sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(matrix: &CMatrix) -> Self {
        let sym = hermitian_part(matrix);
        let n = sym.nrows();
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        HermitianEigen { values, vectors }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `U f(Λ) U*` for a real function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let s = real(f(v));
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|v| v)
    }
}

/// `(M + M*) / 2`.
pub fn hermitian_part(matrix: &CMatrix) -> CMatrix {
    (matrix + matrix.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, nonincreasing.
pub fn hermitian_eigenvalues(matrix: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = hermitian_part(matrix)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// The `min(rows, cols)` singular values, nonincreasing.
pub fn singular_values(matrix: &CMatrix) -> Vec<f64> {
    if matrix.nrows() == 0 || matrix.ncols() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = matrix.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Singular values of a synthesis matrix padded with zeros to one per column.
pub fn column_singular_values(matrix: &CMatrix) -> Vec<f64> {
    let mut values = singular_values(matrix);
    values.resize(matrix.ncols(), 0.0);
    values
}

pub fn operator_norm(matrix: &CMatrix) -> f64 {
    singular_values(matrix).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `RANK_TOLERANCE * sigma_max`.
pub fn numerical_rank(values: &[f64]) -> usize {
    let top = values.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > RANK_TOLERANCE * top).count()
}

/// Moore-Penrose pseudoinverse with the crate-wide rank cutoff.
pub fn pseudo_inverse(matrix: &CMatrix) -> CMatrix {
    let (rows, cols) = matrix.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(cols, rows);
    }
    let svd = matrix.clone().svd(true, true);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut out = CMatrix::zeros(cols, rows);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if top > 0.0 && s > RANK_TOLERANCE * top {
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk).scale(1.0 / s);
        }
    }
    out
}

/// `B* A`, the Gram matrix of the columns of `A` against those of `B` when equal.
pub fn gram(matrix: &CMatrix) -> CMatrix {
    matrix.adjoint() * matrix
}

/// Orthonormal basis (as columns) of the complement of span(`basis`),
/// where `basis` already has orthonormal columns.
pub fn orthonormal_complement(basis: &CMatrix) -> CMatrix {
    let n = basis.nrows();
    let projector = CMatrix::identity(n, n) - basis * basis.adjoint();
    let eig = HermitianEigen::new(&projector);
    let keep = n - basis.ncols();
    eig.vectors.columns(0, keep).into_owned()
}

/// Gram-Schmidt step: appends the normalized residual of `v` to `basis` unless
/// it is negligible relative to `v`. Returns the residual norm before normalization.
pub fn extend_orthonormal(basis: &mut Vec<CVector>, v: &CVector) -> f64 {
    let original = v.norm();
    let mut r = v.clone();
    // two passes keep the basis orthonormal to working precision
    for _ in 0..2 {
        for q in basis.iter() {
            let coeff = q.dotc(&r);
            r -= q * coeff;
        }
    }
    let norm = r.norm();
    if norm > RANK_TOLERANCE.sqrt() * original.max(f64::MIN_POSITIVE) && norm > 0.0 {
        basis.push(r.unscale(norm));
    }
    norm
}

/// Residual of `v` after removing its component in span(`basis`) (orthonormal).
pub fn residual(basis: &[CVector], v: &CVector) -> CVector {
    let mut r = v.clone();
    for _ in 0..2 {
        for q in basis {
            let coeff = q.dotc(&r);
            r -= q * coeff;
        }
    }
    r
}

/// Largest singular value of `a - b` relative to that of `b`.
pub fn relative_spectral_error(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = operator_norm(b);
    let diff = operator_norm(&(a - b));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

pub fn columns_of(matrix: &CMatrix, indices: &[usize]) -> CMatrix {
    CMatrix::from_fn(matrix.nrows(), indices.len(), |i, j| {
        matrix[(i, indices[j])]
    })
}
