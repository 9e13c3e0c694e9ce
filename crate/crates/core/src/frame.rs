//! Frame operators, frame bounds, real powers of the frame operator, the
//! canonical dual reconstruction and the norm/count inequalities relating
//! frame bounds to the dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram, CMatrix, CVector, HermitianEigen};
use crate::system::{inner, VectorSystem};

/// Default relative tolerance for spectral decisions.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// `S = sum_i f_i f_i*`.
pub fn frame_operator(system: &VectorSystem) -> CMatrix {
    let f = system.matrix();
    f * f.adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub min_norm: f64,
    pub max_norm: f64,
    pub is_tight: bool,
    pub is_spanning: bool,
    pub tolerance: f64,
}

/// Optimal frame bounds (extreme eigenvalues of `S`) and the norm range.
pub fn frame_report(system: &VectorSystem, tolerance: f64) -> FrameReport {
    let values = crate::linalg::hermitian_eigenvalues(&frame_operator(system));
    // roundoff can push a zero eigenvalue slightly negative
    let upper_bound = values[0].max(0.0);
    let lower_bound = values[values.len() - 1].clamp(0.0, upper_bound);
    let norms = system.norms();
    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    FrameReport {
        lower_bound,
        upper_bound,
        min_norm,
        max_norm,
        is_tight: upper_bound - lower_bound <= tolerance * upper_bound,
        is_spanning: lower_bound > tolerance,
        tolerance,
    }
}

/// Spectral data of a frame operator together with the exponent to apply.
#[derive(Debug, Clone)]
pub struct OperatorPower {
    pub exponent: f64,
    pub spectrum: HermitianEigen,
}

impl OperatorPower {
    pub fn of_frame(system: &VectorSystem, exponent: f64) -> Self {
        let mut spectrum = HermitianEigen::new(&frame_operator(system));
        for v in spectrum.values.iter_mut() {
            *v = v.max(0.0);
        }
        OperatorPower { exponent, spectrum }
    }

    /// `S^exponent`. Eigenvalues at or below `tolerance * lambda_max` are treated
    /// as zero; a negative exponent then fails with `NotSpanning`.
    pub fn matrix(&self, tolerance: f64) -> Result<CMatrix> {
        let top = self.spectrum.max();
        let cutoff = tolerance * top;
        let p = self.exponent;
        if p < 0.0 && (top <= 0.0 || self.spectrum.min() <= cutoff) {
            return Err(Error::NotSpanning {
                lower_bound: self.spectrum.min(),
            });
        }
        Ok(self.spectrum.map(|v| {
            if v <= cutoff {
                if p == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                v.powf(p)
            }
        }))
    }
}

/// `(S^{(a-1)/2} f_i)_i`, a frame whose frame operator is `S^a`.
///
/// `a = 0` gives the canonical tight frame (frame operator = identity) and
/// `a = 1` returns the input.
pub fn power_transform(system: &VectorSystem, a: f64, tolerance: f64) -> Result<VectorSystem> {
    if !a.is_finite() {
        return Err(Error::BadParameter(format!("exponent {a} is not finite")));
    }
    if a == 1.0 {
        return Ok(system.clone());
    }
    let map = OperatorPower::of_frame(system, (a - 1.0) / 2.0).matrix(tolerance)?;
    system.mapped(&map)
}

/// Canonical tight frame `(S^{-1/2} f_i)`.
pub fn canonical_tight(system: &VectorSystem, tolerance: f64) -> Result<VectorSystem> {
    power_transform(system, 0.0, tolerance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualReconstruction {
    /// `c_i = <S^{-1} f, f_i>`.
    pub coefficients: CVector,
    /// `sum_i c_i f_i`.
    pub reconstruction: CVector,
    /// `<f, S^{-1} f>`.
    pub parseval: f64,
    /// `sum_i |c_i|^2`.
    pub coefficient_energy: f64,
}

pub fn canonical_dual_reconstruct(
    system: &VectorSystem,
    f: &CVector,
    tolerance: f64,
) -> Result<DualReconstruction> {
    if f.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            found: f.len(),
        });
    }
    let inverse = OperatorPower::of_frame(system, -1.0).matrix(tolerance)?;
    let s_inv_f = &inverse * f;
    let coefficients = system.analysis_apply(&s_inv_f)?;
    let reconstruction = system.synthesis_apply(&coefficients)?;
    Ok(DualReconstruction {
        parseval: inner(f, &s_inv_f).re,
        coefficient_energy: coefficients.norm_squared(),
        coefficients,
        reconstruction,
    })
}

/// Slacks (right side minus left side) of `n <= (beta^2/A) m` and `m <= (B/alpha^2) n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CountingSlacks {
    pub dim: usize,
    pub count: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub min_norm: f64,
    pub max_norm: f64,
    /// `None` when the system does not span (the inequality needs `A > 0`).
    pub lower_bound_slack: Option<f64>,
    pub upper_bound_slack: f64,
}

impl CountingSlacks {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.lower_bound_slack.is_none_or(|s| s >= -tolerance)
            && self.upper_bound_slack >= -tolerance
    }
}

pub fn check_counting_lemmas(system: &VectorSystem, tolerance: f64) -> Result<CountingSlacks> {
    let report = frame_report(system, tolerance);
    if report.min_norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let n = system.dim() as f64;
    let m = system.count() as f64;
    let lower_bound_slack = report
        .is_spanning
        .then(|| report.max_norm.powi(2) / report.lower_bound * m - n);
    Ok(CountingSlacks {
        dim: system.dim(),
        count: system.count(),
        lower_bound: report.lower_bound,
        upper_bound: report.upper_bound,
        min_norm: report.min_norm,
        max_norm: report.max_norm,
        lower_bound_slack,
        upper_bound_slack: report.upper_bound / report.min_norm.powi(2) * n - m,
    })
}

/// `sum_i ||f_i||^2`, the trace of the frame operator.
pub fn total_energy(system: &VectorSystem) -> f64 {
    system.norms().iter().map(|x| x * x).sum()
}

/// Gram matrix `[<f_j, f_i>]_{ij}` of the system.
pub fn gram_matrix(system: &VectorSystem) -> CMatrix {
    gram(system.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;

    fn diag_system() -> VectorSystem {
        VectorSystem::from_real_columns(2, &[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn duplicated_onb() -> VectorSystem {
        VectorSystem::from_real_columns(
            2,
            &[
                vec![1.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 1.0],
            ],
        )
        .unwrap()
    }

    fn is_diag(m: &CMatrix, d: &[f64], tol: f64) -> bool {
        let expected = CMatrix::from_fn(d.len(), d.len(), |i, j| {
            real(if i == j { d[i] } else { 0.0 })
        });
        (m - expected).norm() < tol
    }

    #[test]
    fn frame_operators_of_simple_systems() {
        let onb = VectorSystem::orthonormal(3).unwrap();
        assert!(is_diag(&frame_operator(&onb), &[1.0, 1.0, 1.0], 1e-15));
        assert!(is_diag(
            &frame_operator(&duplicated_onb()),
            &[2.0, 2.0],
            1e-15
        ));
        assert!(is_diag(&frame_operator(&diag_system()), &[4.0, 1.0], 1e-15));
    }

    #[test]
    fn reports() {
        let r = frame_report(&VectorSystem::orthonormal(4).unwrap(), DEFAULT_TOLERANCE);
        assert!((r.lower_bound - 1.0).abs() < 1e-12 && (r.upper_bound - 1.0).abs() < 1e-12);
        assert_eq!((r.min_norm, r.max_norm), (1.0, 1.0));
        assert!(r.is_tight && r.is_spanning);

        let r = frame_report(&duplicated_onb(), DEFAULT_TOLERANCE);
        assert!((r.lower_bound - 2.0).abs() < 1e-12 && (r.upper_bound - 2.0).abs() < 1e-12);

        let r = frame_report(&diag_system(), DEFAULT_TOLERANCE);
        assert!(!r.is_tight);
        assert!((r.lower_bound - 1.0).abs() < 1e-12 && (r.upper_bound - 4.0).abs() < 1e-12);
    }

    #[test]
    fn non_spanning_is_flagged_not_an_error() {
        let sys = VectorSystem::from_real_columns(2, &[vec![1.0, 0.0]]).unwrap();
        let r = frame_report(&sys, DEFAULT_TOLERANCE);
        assert!(!r.is_spanning);
        assert_eq!(r.lower_bound, 0.0);
    }

    #[test]
    fn power_transform_of_diagonal_system() {
        let sys = diag_system();
        assert_eq!(power_transform(&sys, 1.0, DEFAULT_TOLERANCE).unwrap(), sys);

        let tight = power_transform(&sys, 0.0, DEFAULT_TOLERANCE).unwrap();
        assert!(is_diag(tight.matrix(), &[1.0, 1.0], 1e-12));
        assert!(is_diag(&frame_operator(&tight), &[1.0, 1.0], 1e-12));

        let squared = power_transform(&sys, 2.0, DEFAULT_TOLERANCE).unwrap();
        assert!(is_diag(squared.matrix(), &[4.0, 1.0], 1e-12));
        assert!(is_diag(&frame_operator(&squared), &[16.0, 1.0], 1e-12));
    }

    #[test]
    fn negative_power_needs_spanning() {
        let sys = VectorSystem::from_real_columns(2, &[vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            power_transform(&sys, 0.0, DEFAULT_TOLERANCE),
            Err(Error::NotSpanning { .. })
        ));
        // nonnegative powers are fine
        let out = power_transform(&sys, 3.0, DEFAULT_TOLERANCE).unwrap();
        assert!(is_diag(&frame_operator(&out), &[1.0, 0.0], 1e-12));
    }

    #[test]
    fn dual_reconstruction_simple_cases() {
        let onb = VectorSystem::orthonormal(3).unwrap();
        let f = CVector::from_vec(vec![real(1.0), real(0.0), real(0.0)]);
        let d = canonical_dual_reconstruct(&onb, &f, DEFAULT_TOLERANCE).unwrap();
        assert!((d.coefficients.clone() - f.clone()).norm() < 1e-12);
        assert!((d.reconstruction - f).norm() < 1e-12);
        assert!((d.parseval - 1.0).abs() < 1e-12);

        let f = CVector::from_vec(vec![real(1.0), real(0.0)]);
        let d = canonical_dual_reconstruct(&duplicated_onb(), &f, DEFAULT_TOLERANCE).unwrap();
        let expected = CVector::from_vec(vec![real(0.5), real(0.5), real(0.0), real(0.0)]);
        assert!((d.coefficients - expected).norm() < 1e-12);
        assert!((d.parseval - 0.5).abs() < 1e-12);
        assert!((d.coefficient_energy - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dual_reconstruction_errors() {
        let sys = VectorSystem::from_real_columns(2, &[vec![1.0, 0.0]]).unwrap();
        let f = CVector::from_vec(vec![real(1.0), real(0.0)]);
        assert!(matches!(
            canonical_dual_reconstruct(&sys, &f, DEFAULT_TOLERANCE),
            Err(Error::NotSpanning { .. })
        ));
        let g = CVector::from_vec(vec![real(1.0)]);
        assert!(matches!(
            canonical_dual_reconstruct(&duplicated_onb(), &g, DEFAULT_TOLERANCE),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn counting_lemmas() {
        let s = check_counting_lemmas(&VectorSystem::orthonormal(5).unwrap(), DEFAULT_TOLERANCE)
            .unwrap();
        assert!(s.lower_bound_slack.unwrap().abs() < 1e-12);
        assert!(s.upper_bound_slack.abs() < 1e-12);

        let s = check_counting_lemmas(&duplicated_onb(), DEFAULT_TOLERANCE).unwrap();
        assert!(s.upper_bound_slack.abs() < 1e-12);

        let with_zero =
            VectorSystem::from_real_columns(2, &[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(
            check_counting_lemmas(&with_zero, DEFAULT_TOLERANCE),
            Err(Error::ZeroNorm)
        );

        let thin = VectorSystem::from_real_columns(2, &[vec![1.0, 0.0]]).unwrap();
        let s = check_counting_lemmas(&thin, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(s.lower_bound_slack, None);
    }

    #[test]
    fn trace_identity() {
        let sys = duplicated_onb();
        let trace: f64 = frame_operator(&sys).trace().re;
        assert!((trace - total_energy(&sys)).abs() < 1e-12);
    }
}
