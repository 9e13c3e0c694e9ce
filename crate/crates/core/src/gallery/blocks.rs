use std::ops::Range;

use crate::error::{Error, Result};
use crate::frame::frame_operator;
use crate::linalg::{orthonormal_complement, CMatrix, CVector, HermitianEigen};
use crate::system::VectorSystem;

use super::{lemma51, weighted_exponentials, Sign};

/// Unit vector whose analysis mass `sum_i |<h, f_i>|^2` is small.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatVector {
    pub vector: CVector,
    pub mass: f64,
}

/// Bottom eigenvector of the frame operator, if its eigenvalue is within `budget`.
pub fn find_flat_vector(system: &VectorSystem, budget: f64) -> Result<FlatVector> {
    if budget.is_nan() || budget <= 0.0 {
        return Err(Error::BadParameter(format!(
            "budget must be positive, got {budget}"
        )));
    }
    let eig = HermitianEigen::new(&frame_operator(system));
    let n = system.dim();
    let mass = eig.min().max(0.0);
    if mass > budget {
        return Err(Error::NotFlat {
            budget,
            achieved: mass,
        });
    }
    let vector = eig.vectors.column(n - 1).into_owned();
    Ok(FlatVector { vector, mass })
}

/// Orthogonal direct sum: block `j` lives in its own coordinate slot.
pub fn assemble_block_system(blocks: &[VectorSystem]) -> Result<VectorSystem> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dim: usize = blocks.iter().map(|b| b.dim()).sum();
    let count: usize = blocks.iter().map(|b| b.count()).sum();
    let mut out = CMatrix::zeros(dim, count);
    let (mut row, mut col) = (0, 0);
    for b in blocks {
        out.view_mut((row, col), (b.dim(), b.count()))
            .copy_from(b.matrix());
        row += b.dim();
        col += b.count();
    }
    let labels = if blocks.iter().all(|b| b.labels().is_some()) {
        Some(
            blocks
                .iter()
                .enumerate()
                .flat_map(|(j, b)| {
                    b.labels()
                        .unwrap_or_default()
                        .iter()
                        .map(move |l| format!("b{j}:{l}"))
                })
                .collect(),
        )
    } else {
        None
    };
    VectorSystem::with_labels(out, labels)
}

/// `k` orthogonal copies of a normalized conditional basis `(h_i)`, with the
/// `k`-dimensional subspace spanned by copies of one flat vector `h`.
#[derive(Debug, Clone)]
pub struct Lemma52Block {
    pub system: VectorSystem,
    /// Orthonormal columns spanning the flat subspace `E`.
    pub flat_basis: CMatrix,
    /// `N` of the weighted exponential family used in each copy.
    pub order: usize,
    /// Dimension `2N + 1` of one copy.
    pub block_dim: usize,
    /// Analysis mass of `h` against one copy.
    pub mass: f64,
}

/// Doubles `N` from `start_order` until the normalized positive-exponent
/// family carries a unit vector of mass at most `eps / k`.
pub fn lemma52_block(
    k: usize,
    eps: f64,
    a: f64,
    start_order: usize,
    max_order: usize,
) -> Result<Lemma52Block> {
    if k == 0 {
        return Err(Error::BadParameter("k must be at least 1".into()));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::BadParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::BadParameter(format!(
            "a must lie in (0, 1/2), got {a}"
        )));
    }
    let budget = eps / k as f64;
    let mut order = start_order.max(1);
    loop {
        let basis = weighted_exponentials(a, order, Sign::Plus, true)?;
        match find_flat_vector(&basis, budget) {
            Ok(flat) => {
                let block_dim = basis.dim();
                let system = assemble_block_system(&vec![basis; k])?;
                let mut flat_basis = CMatrix::zeros(k * block_dim, k);
                for j in 0..k {
                    flat_basis
                        .view_mut((j * block_dim, j), (block_dim, 1))
                        .copy_from(&flat.vector);
                }
                return Ok(Lemma52Block {
                    system,
                    flat_basis,
                    order,
                    block_dim,
                    mass: flat.mass,
                });
            }
            Err(Error::NotFlat { achieved, .. }) if order * 2 > max_order => {
                return Err(Error::NotFlat { budget, achieved });
            }
            Err(Error::NotFlat { .. }) => order *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Layout of one block `m` of a truncated construction.
#[derive(Debug, Clone)]
pub struct Prop53Block {
    pub m: usize,
    pub eps: f64,
    pub order: usize,
    /// Coordinate range of this block in the ambient space.
    pub coords: Range<usize>,
    /// Column ranges of the conditional basis, the complement basis of `E_m`,
    /// and the flat tight frame for `E_m`.
    pub basis: Range<usize>,
    pub complement: Range<usize>,
    pub frame: Range<usize>,
    /// Orthonormal basis of `E_m` in ambient coordinates.
    pub flat_basis: CMatrix,
    /// Zero vectors of the tight frame dropped before normalization.
    pub dropped: usize,
}

#[derive(Debug, Clone)]
pub struct Prop53Truncation {
    pub system: VectorSystem,
    pub blocks: Vec<Prop53Block>,
}

/// Blocks `m = 1..=depth`, each holding the conditional basis of a `lemma52_block`
/// block with `k = m`, an orthonormal basis of the complement of its flat
/// subspace `E_m`, and the `m + 1` vector tight frame for `E_m`. All vectors
/// are normalized at the end.
pub fn prop53_truncation(
    depth: usize,
    eps: Option<&[f64]>,
    a: f64,
    start_order: usize,
    max_order: usize,
) -> Result<Prop53Truncation> {
    if depth == 0 {
        return Err(Error::BadParameter("depth M must be at least 1".into()));
    }
    let budgets: Vec<f64> = match eps {
        Some(e) if e.len() == depth => e.to_vec(),
        Some(e) => {
            return Err(Error::BadParameter(format!(
                "{} eps values for depth {depth}",
                e.len()
            )))
        }
        None => (1..=depth).map(|m| 0.1 / m as f64).collect(),
    };

    let mut parts: Vec<(CMatrix, Vec<String>, usize)> = Vec::new();
    let mut blocks = Vec::new();
    let (mut row, mut col) = (0, 0);
    for (idx, &eps_m) in budgets.iter().enumerate() {
        let m = idx + 1;
        let block = lemma52_block(m, eps_m, a, start_order, max_order)?;
        let n_m = block.system.dim();
        let q = block.flat_basis.clone();
        let complement = orthonormal_complement(&q);
        let tight = q.clone() * lemma51(m)?.into_matrix();
        let keep: Vec<usize> = (0..tight.ncols())
            .filter(|&j| tight.column(j).norm() > 1e-12)
            .collect();
        let dropped = tight.ncols() - keep.len();

        let g_count = block.system.count();
        let e_count = complement.ncols();
        let f_count = keep.len();
        let mut local = CMatrix::zeros(n_m, g_count + e_count + f_count);
        local
            .columns_mut(0, g_count)
            .copy_from(block.system.matrix());
        local.columns_mut(g_count, e_count).copy_from(&complement);
        for (t, &j) in keep.iter().enumerate() {
            local
                .column_mut(g_count + e_count + t)
                .copy_from(&tight.column(j));
        }
        let mut labels = Vec::new();
        labels.extend((1..=g_count).map(|i| format!("g{m}_{i}")));
        labels.extend((1..=e_count).map(|i| format!("e{m}_{i}")));
        labels.extend(keep.iter().map(|j| format!("f{m}_{}", j + 1)));

        // padded to the full ambient dimension once all blocks are known
        let mut flat_basis = CMatrix::zeros(row + n_m, m);
        flat_basis.rows_mut(row, n_m).copy_from(&q);

        blocks.push(Prop53Block {
            m,
            eps: eps_m,
            order: block.order,
            coords: row..row + n_m,
            basis: col..col + g_count,
            complement: col + g_count..col + g_count + e_count,
            frame: col + g_count + e_count..col + g_count + e_count + f_count,
            flat_basis,
            dropped,
        });
        parts.push((local, labels, n_m));
        row += n_m;
        col += g_count + e_count + f_count;
    }

    let (dim, count) = (row, col);
    let mut all = CMatrix::zeros(dim, count);
    let mut labels = Vec::with_capacity(count);
    let (mut r, mut c) = (0, 0);
    for (local, l, n_m) in parts {
        all.view_mut((r, c), (n_m, local.ncols())).copy_from(&local);
        r += n_m;
        c += local.ncols();
        labels.extend(l);
    }
    for b in blocks.iter_mut() {
        b.flat_basis = b
            .flat_basis
            .clone()
            .resize_vertically(dim, Default::default());
    }
    let system = VectorSystem::with_labels(all, Some(labels))?.normalized()?;
    Ok(Prop53Truncation { system, blocks })
}
