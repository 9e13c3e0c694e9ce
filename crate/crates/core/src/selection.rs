//! Column subset selection for restricted invertibility: find index subsets
//! whose columns have a large smallest singular value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    column_singular_values, columns_of, gram, hermitian_eigenvalues, CMatrix, CVector,
    HermitianEigen,
};
use crate::system::VectorSystem;

/// Default cap on the number of subsets an exhaustive search may visit.
pub const DEFAULT_SUBSET_GUARD: u128 = 1_000_000;

/// Default universal constant used to size selections.
pub const DEFAULT_C: f64 = 0.1;

// relative slack under which two bounds count as tied
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SelectionMethod {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectionResult {
    /// Strictly increasing, 0-based.
    pub subset: Vec<usize>,
    /// Smallest singular value of the selected columns.
    pub certified_lower_bound: f64,
    pub method: SelectionMethod,
    pub target_size: usize,
    pub normalization_applied: bool,
}

/// Smallest singular value of the given columns (0 when there are more
/// columns than rows).
pub fn smallest_singular_value(columns: &CMatrix) -> f64 {
    column_singular_values(columns)
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// Certified lower bound of `subset` recomputed from the parent system.
pub fn certified_bound(system: &VectorSystem, subset: &[usize]) -> f64 {
    smallest_singular_value(&columns_of(system.matrix(), subset))
}

fn beats(value: f64, incumbent: f64) -> bool {
    value > incumbent + TIE_TOLERANCE * incumbent.abs().max(1e-300)
}

/// `sigma_min` of a principal sub-Gram, via its smallest eigenvalue.
fn gram_sigma_min(gram: &CMatrix, subset: &[usize], dim: usize) -> f64 {
    if subset.len() > dim {
        return 0.0;
    }
    let k = subset.len();
    let sub = CMatrix::from_fn(k, k, |i, j| gram[(subset[i], subset[j])]);
    hermitian_eigenvalues(&sub)[k - 1].max(0.0).sqrt()
}

fn check_target(target: usize, count: usize) -> Result<()> {
    if target < 1 || target > count {
        return Err(Error::BadTarget { target, count });
    }
    Ok(())
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Advances `idx` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn select_exhaustive(system: &VectorSystem, target: usize) -> Result<SelectionResult> {
    select_exhaustive_with_guard(system, target, DEFAULT_SUBSET_GUARD)
}

/// Exact maximizer of `sigma_min` over all `target`-subsets; ties go to the
/// lexicographically smallest subset.
pub fn select_exhaustive_with_guard(
    system: &VectorSystem,
    target: usize,
    guard: u128,
) -> Result<SelectionResult> {
    let m = system.count();
    check_target(target, m)?;
    let subsets = binomial(m, target);
    if subsets > guard {
        return Err(Error::TooLarge { subsets, guard });
    }
    let g = gram(system.matrix());
    let dim = system.dim();

    // split on the leading index; each chunk scans its combinations in order
    let best = (0..=m - target)
        .into_par_iter()
        .map(|first| {
            let mut rest: Vec<usize> = (first + 1..first + target).collect();
            let mut best: Option<(f64, Vec<usize>)> = None;
            loop {
                let mut subset = Vec::with_capacity(target);
                subset.push(first);
                subset.extend_from_slice(&rest);
                let value = gram_sigma_min(&g, &subset, dim);
                if best.as_ref().is_none_or(|(b, _)| beats(value, *b)) {
                    best = Some((value, subset));
                }
                if rest.is_empty() || !advance_tail(&mut rest, first + 1, m) {
                    break;
                }
            }
            best.expect("every chunk has at least one subset")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|acc, next| if beats(next.0, acc.0) { next } else { acc })
        .expect("at least one chunk");

    Ok(SelectionResult {
        certified_lower_bound: certified_bound(system, &best.1),
        subset: best.1,
        method: SelectionMethod::Exhaustive,
        target_size: target,
        normalization_applied: false,
    })
}

/// Next combination of `rest` drawn from `lo..n`.
fn advance_tail(rest: &mut [usize], lo: usize, n: usize) -> bool {
    for x in rest.iter_mut() {
        *x -= lo;
    }
    let more = next_combination(rest, n - lo);
    for x in rest.iter_mut() {
        *x += lo;
    }
    more
}

/// One greedy step: the order in which indices were added and the
/// `sigma_min` of each prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyPath {
    pub order: Vec<usize>,
    pub bounds: Vec<f64>,
}

/// Greedy augmentation over the columns of `columns`, restricted to
/// `candidates`. Stops after `limit` additions, or as soon as the next
/// addition would push `sigma_min` below `floor` (when given).
pub fn greedy_path(
    columns: &CMatrix,
    candidates: &[usize],
    limit: usize,
    floor: Option<f64>,
) -> GreedyPath {
    let dim = columns.nrows();
    let g = gram(columns);
    let mut order: Vec<usize> = Vec::new();
    let mut bounds = Vec::new();
    let mut remaining: Vec<usize> = candidates.to_vec();
    remaining.sort_unstable();
    while order.len() < limit && !remaining.is_empty() {
        let s = order.len();
        let current = (s > 0)
            .then(|| HermitianEigen::new(&CMatrix::from_fn(s, s, |i, j| g[(order[i], order[j])])));
        let values: Vec<f64> = remaining
            .par_iter()
            .map(|&c| {
                if s >= dim {
                    return 0.0;
                }
                let gamma = g[(c, c)].re;
                match &current {
                    None => gamma.max(0.0).sqrt(),
                    Some(eig) => {
                        let border = CVector::from_fn(s, |i, _| g[(order[i], c)]);
                        let w = eig.vectors.adjoint() * border;
                        bordered_min_eigenvalue(&eig.values, &w, gamma)
                            .max(0.0)
                            .sqrt()
                    }
                }
            })
            .collect();
        let mut best = 0;
        for k in 1..values.len() {
            if beats(values[k], values[best]) {
                best = k;
            }
        }
        if floor.is_some_and(|f| values[best] < f) {
            break;
        }
        order.push(remaining.remove(best));
        bounds.push(values[best]);
    }
    GreedyPath { order, bounds }
}

/// Smallest eigenvalue of `[[diag(values), w], [w^*, gamma]]`, the root below
/// `min(values)` of `gamma - x - sum_i |w_i|^2 / (values_i - x)`, by bisection.
fn bordered_min_eigenvalue(values: &[f64], w: &CVector, gamma: f64) -> f64 {
    let bottom = values.iter().copied().fold(f64::INFINITY, f64::min);
    let secular = |x: f64| {
        gamma
            - x
            - values
                .iter()
                .zip(w.iter())
                .map(|(v, wi)| wi.norm_sqr() / (v - x))
                .sum::<f64>()
    };
    // the off-diagonal border has norm ||w||, so every eigenvalue is above lo
    let mut lo = bottom.min(gamma) - w.norm() - 1e-300;
    let mut hi = bottom;
    if lo >= hi {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if secular(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Adds, `target` times, the index that maximizes `sigma_min` of the augmented
/// set (ties to the lowest index).
pub fn select_greedy(system: &VectorSystem, target: usize) -> Result<SelectionResult> {
    check_target(target, system.count())?;
    let all: Vec<usize> = (0..system.count()).collect();
    let path = greedy_path(system.matrix(), &all, target, None);
    let mut subset = path.order;
    subset.sort_unstable();
    Ok(SelectionResult {
        certified_lower_bound: certified_bound(system, &subset),
        subset,
        method: SelectionMethod::Greedy,
        target_size: target,
        normalization_applied: false,
    })
}

/// `floor(c m / ||T||^2)`, the subset size guaranteed by restricted invertibility.
pub fn bt_guarantee_size(m: usize, operator_norm: f64, c: f64) -> Result<usize> {
    if !(operator_norm > 0.0 && operator_norm.is_finite()) {
        return Err(Error::BadParameter(format!(
            "operator norm must be positive and finite, got {operator_norm}"
        )));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::BadParameter(format!(
            "c must lie in (0, 1], got {c}"
        )));
    }
    Ok((c * m as f64 / (operator_norm * operator_norm)).floor() as usize)
}
