//! Extraction of a large, well-conditioned sub-family by projection peeling.
//!
//! Each round looks at the residuals `(I - P_{i-1}) ... (I - P_1) f_j` of the
//! not-yet-selected vectors, normalizes them into an operator `T_i`, selects a
//! well-invertible column subset of `T_i`, and projects the span of the
//! selected vectors away. The union of the per-round selections is returned
//! together with its directly computed Riesz constant.
//!
//! Two drivers share the loop:
//! * [`extract_biorthogonal`] for linearly independent, separated systems;
//!   every unselected residual stays at least the separation constant away
//!   from zero, and rounds continue until `(1 - eps) m` indices are covered.
//! * [`extract_frame`] for spanning frames; rounds only look at residuals of
//!   norm at least `delta` and stop once that residual set is small or the
//!   coverage target is reached.
//!
//! Per-round subset size is the larger of the restricted-invertibility
//! guarantee `floor(c m / ||T_i||^2)` and the longest greedy prefix whose
//! normalized smallest singular value stays at or above `sqrt(c)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{frame_report, DEFAULT_TOLERANCE};
use crate::linalg::{extend_orthonormal, operator_norm, residual, CMatrix, CVector};
use crate::metrics::{hilbertian_besselian, riesz_constant, separation_constant, ExtReal};
use crate::selection::{bt_guarantee_size, greedy_path, smallest_singular_value};
use crate::system::VectorSystem;

/// Hard cap on the number of peeling rounds.
pub const ROUND_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExtractionMode {
    Biorthogonal,
    Frame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StopReason {
    CoverageReached,
    ResidualSetSmall,
    GuaranteeEmpty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorm {
    pub index: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundRecord {
    /// 1-based round number.
    pub round: usize,
    /// Indices selected this round, increasing.
    pub selected: Vec<usize>,
    /// Residual norms of the candidates this round examined.
    pub residual_norms: Vec<ResidualNorm>,
    /// Operator norm of the normalized residual operator.
    pub operator_norm: f64,
    /// Size guaranteed by restricted invertibility for this round.
    pub guarantee_size: usize,
    /// Smallest singular value of the selected normalized residuals.
    pub normalized_bound: f64,
    /// Smallest singular value of the selected (unnormalized) residuals.
    pub certified_bound: f64,
    /// Rank of the cumulative projection after this round.
    pub projection_rank: usize,
    /// Number of unselected indices whose residual is at or above the
    /// candidate threshold after this round.
    pub residual_set_size: usize,
    /// Cumulative `|sigma| / n`.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractionParameters {
    pub mode: ExtractionMode,
    pub epsilon: f64,
    pub c: f64,
    /// Size the coverage is measured against (`count` for biorthogonal, `dim` for frames).
    pub reference_size: usize,
    pub required_size: usize,
    pub separation: Option<f64>,
    pub hilbertian: Option<f64>,
    pub delta: Option<f64>,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub min_norm: Option<f64>,
    pub max_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractionTrace {
    pub rounds: Vec<RoundRecord>,
    pub final_subset: Vec<usize>,
    pub final_riesz_constant: ExtReal,
    pub stop_reason: StopReason,
    pub parameters: ExtractionParameters,
    /// Frame mode only: `dn + (m-1)(d/delta^2)(eps/2)n` with `d = c/B^2`,
    /// the nominal coverage after `m` rounds. Logged, not used for control.
    pub nominal_coverage: Option<f64>,
}

impl ExtractionTrace {
    pub fn selected_count(&self) -> usize {
        self.final_subset.len()
    }
}

fn check_eps_c(epsilon: f64, c: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadParameter(format!(
            "eps must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::BadParameter(format!(
            "c must lie in (0, 1], got {c}"
        )));
    }
    Ok(())
}

fn required_size(epsilon: f64, n: usize) -> usize {
    ((1.0 - epsilon) * n as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Peeling for a linearly independent system with separation `d > 0`.
pub fn extract_biorthogonal(
    system: &VectorSystem,
    epsilon: f64,
    c: f64,
) -> Result<ExtractionTrace> {
    check_eps_c(epsilon, c)?;
    let separation = if system.count() < 2 {
        system.norms()[0]
    } else {
        separation_constant(system)?
    };
    if separation <= DEFAULT_TOLERANCE {
        return Err(Error::NotSeparated { separation });
    }
    let (hilbertian, _) = hilbertian_besselian(system);
    let n = system.count();
    let params = ExtractionParameters {
        mode: ExtractionMode::Biorthogonal,
        epsilon,
        c,
        reference_size: n,
        required_size: required_size(epsilon, n),
        separation: Some(separation),
        hilbertian: Some(hilbertian),
        delta: None,
        lower_bound: None,
        upper_bound: None,
        min_norm: None,
        max_norm: None,
    };
    // every unselected residual is at least `separation` long; any positive
    // threshold below that admits them all
    let threshold = 0.5 * separation;
    peel(system, params, threshold, None)
}

/// Largest `delta` with `(delta^2 / A)(B / alpha^2) <= eps / 2`.
pub fn default_delta(epsilon: f64, lower_bound: f64, upper_bound: f64, min_norm: f64) -> f64 {
    (epsilon * lower_bound * min_norm * min_norm / (2.0 * upper_bound)).sqrt()
}

/// Peeling for a spanning frame; candidates are residuals of norm `>= delta`.
pub fn extract_frame(
    system: &VectorSystem,
    epsilon: f64,
    c: f64,
    delta_override: Option<f64>,
) -> Result<ExtractionTrace> {
    check_eps_c(epsilon, c)?;
    let report = frame_report(system, DEFAULT_TOLERANCE);
    if !report.is_spanning {
        return Err(Error::NotSpanning {
            lower_bound: report.lower_bound,
        });
    }
    if report.min_norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let max_delta = default_delta(
        epsilon,
        report.lower_bound,
        report.upper_bound,
        report.min_norm,
    );
    let delta = match delta_override {
        None => max_delta,
        Some(d) if d > 0.0 && d <= max_delta * (1.0 + 1e-12) => d,
        Some(d) => {
            return Err(Error::InfeasibleDelta {
                delta: d,
                max_delta,
            })
        }
    };
    let n = system.dim();
    let params = ExtractionParameters {
        mode: ExtractionMode::Frame,
        epsilon,
        c,
        reference_size: n,
        required_size: required_size(epsilon, n),
        separation: None,
        hilbertian: None,
        delta: Some(delta),
        lower_bound: Some(report.lower_bound),
        upper_bound: Some(report.upper_bound),
        min_norm: Some(report.min_norm),
        max_norm: Some(report.max_norm),
    };
    let small_set = epsilon / 2.0 * n as f64;
    let mut trace = peel(system, params, delta, Some(small_set))?;
    let rounds = trace.rounds.len() as f64;
    let d = c / (report.upper_bound * report.upper_bound);
    trace.nominal_coverage =
        Some(d * n as f64 + (rounds - 1.0) * (d / (delta * delta)) * small_set);
    Ok(trace)
}

fn residual_norms(
    system: &VectorSystem,
    basis: &[CVector],
    selected: &[bool],
) -> Vec<(usize, CVector, f64)> {
    (0..system.count())
        .filter(|&j| !selected[j])
        .map(|j| {
            let r = residual(basis, &system.vector(j));
            let norm = r.norm();
            (j, r, norm)
        })
        .collect()
}

fn peel(
    system: &VectorSystem,
    mut params: ExtractionParameters,
    threshold: f64,
    small_set: Option<f64>,
) -> Result<ExtractionTrace> {
    let m = system.count();
    let c = params.c;
    let required = params.required_size;
    let reference = params.reference_size as f64;
    let mut selected = vec![false; m];
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<CVector> = Vec::new();
    let mut rounds = Vec::new();

    let mut residuals = residual_norms(system, &basis, &selected);
    let mut stop = None;
    for round in 1..=ROUND_LIMIT {
        let candidates: Vec<&(usize, CVector, f64)> = residuals
            .iter()
            .filter(|(_, _, norm)| *norm >= threshold)
            .collect();
        if candidates.is_empty() {
            stop = Some(if small_set.is_some() {
                StopReason::ResidualSetSmall
            } else {
                StopReason::GuaranteeEmpty
            });
            break;
        }

        let k = candidates.len();
        let normalized = CMatrix::from_fn(system.dim(), k, |i, j| {
            let (_, r, norm) = candidates[j];
            r[i] / *norm
        });
        let op_norm = operator_norm(&normalized);
        let guarantee = bt_guarantee_size(k, op_norm, c)?;
        let local: Vec<usize> = (0..k).collect();
        let mut path = greedy_path(&normalized, &local, k, Some(c.sqrt()));
        if guarantee > path.order.len() {
            path = greedy_path(&normalized, &local, guarantee, None);
        }
        if path.order.is_empty() {
            stop = Some(StopReason::GuaranteeEmpty);
            break;
        }

        let picked: Vec<usize> = path.order.iter().map(|&l| candidates[l].0).collect();
        let raw = CMatrix::from_fn(system.dim(), picked.len(), |i, j| {
            candidates[path.order[j]].1[i]
        });
        let certified_bound = smallest_singular_value(&raw);
        if certified_bound <= 0.0 {
            return Err(Error::GuaranteeEmpty);
        }
        let normalized_bound = *path.bounds.last().expect("nonempty path");
        let examined: Vec<ResidualNorm> = candidates
            .iter()
            .map(|(index, _, norm)| ResidualNorm {
                index: *index,
                norm: *norm,
            })
            .collect();

        for &j in &picked {
            extend_orthonormal(&mut basis, &system.vector(j));
            selected[j] = true;
        }
        chosen.extend_from_slice(&picked);
        let mut this_round = picked;
        this_round.sort_unstable();

        residuals = residual_norms(system, &basis, &selected);
        let residual_set_size = residuals.iter().filter(|(_, _, n)| *n >= threshold).count();
        rounds.push(RoundRecord {
            round,
            selected: this_round,
            residual_norms: examined,
            operator_norm: op_norm,
            guarantee_size: guarantee,
            normalized_bound,
            certified_bound,
            projection_rank: basis.len(),
            residual_set_size,
            coverage: chosen.len() as f64 / reference,
        });

        if chosen.len() >= required {
            stop = Some(StopReason::CoverageReached);
            break;
        }
        if let Some(limit) = small_set {
            if residual_set_size as f64 <= limit {
                stop = Some(StopReason::ResidualSetSmall);
                break;
            }
        }
        if chosen.len() == m {
            stop = Some(StopReason::GuaranteeEmpty);
            break;
        }
    }
    let stop_reason = stop.ok_or(Error::RoundLimit(ROUND_LIMIT))?;
    if chosen.len() < required {
        return Err(Error::CoverageShortfall {
            selected: chosen.len(),
            required,
        });
    }
    chosen.sort_unstable();
    let final_riesz_constant = riesz_constant(&system.subsystem(&chosen)?);
    params.required_size = required;
    Ok(ExtractionTrace {
        rounds,
        final_subset: chosen,
        final_riesz_constant,
        stop_reason,
        parameters: params,
        nominal_coverage: None,
    })
}

/// Intermediate quantities of the explicit Riesz-constant certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoreticalBound {
    /// `c d^2 / L^2`.
    pub b: f64,
    /// Smallest `m >= 1` with `(1 - b)^(m-1) <= eps`.
    pub rounds: u32,
    /// `max(2, 1 + 2L/(cd)) + 1`.
    pub r: f64,
    /// `r^-(m+1) / 2`.
    pub a: f64,
    /// `max(L, (r - 1)/(L a))`.
    pub value: f64,
}

pub fn theoretical_bound_details(epsilon: f64, d: f64, l: f64, c: f64) -> Result<TheoreticalBound> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadParameter(format!(
            "eps must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::BadParameter(format!(
            "d must lie in (0, 1], got {d}"
        )));
    }
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::BadParameter(format!(
            "L must be at least 1, got {l}"
        )));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::BadParameter(format!(
            "c must lie in (0, 1], got {c}"
        )));
    }
    let b = c * d * d / (l * l);
    let mut rounds: u32 = 1;
    while (1.0 - b).powi(rounds as i32 - 1) > epsilon {
        rounds += 1;
    }
    let r = f64::max(2.0, 1.0 + 2.0 * l / (c * d)) + 1.0;
    let r_pow = r.powi(rounds as i32 + 1);
    let a = 0.5 / r_pow;
    // (r - 1)/(L a) written without the reciprocal so integer inputs stay exact
    let besselian = (r - 1.0) * 2.0 * r_pow / l;
    Ok(TheoreticalBound {
        b,
        rounds,
        r,
        a,
        value: l.max(besselian),
    })
}

/// Explicit, dimension-free Riesz-constant certificate `g(eps, d, L)`.
pub fn theoretical_bound(epsilon: f64, d: f64, l: f64, c: f64) -> Result<f64> {
    theoretical_bound_details(epsilon, d, l, c).map(|t| t.value)
}
