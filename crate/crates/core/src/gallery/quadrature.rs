//! Gauss-Legendre quadrature for `int_0^pi x^p cos(kx) dx`, `-1 < p < 1`.
//!
//! The interval is cut into dyadic panels `[pi/2^(j+1), pi/2^j]` shrinking
//! toward the (possibly singular) endpoint 0; each panel is further split so
//! no piece holds more than half an oscillation, and the last piece
//! `[0, pi/2^DEPTH]` is integrated from the term-wise Taylor series of the
//! cosine, which is exact up to roundoff there.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of dyadic panels.
pub const DEPTH: u32 = 40;
/// A-posteriori error allowed on a single moment.
pub const ERROR_LIMIT: f64 = 1e-8;

const LOW_ORDER: usize = 16;
const HIGH_ORDER: usize = 24;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

struct Rules {
    low: (Vec<f64>, Vec<f64>),
    high: (Vec<f64>, Vec<f64>),
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        low: gauss_legendre(LOW_ORDER),
        high: gauss_legendre(HIGH_ORDER),
    })
}

fn apply(rule: &(Vec<f64>, Vec<f64>), lo: f64, hi: f64, f: &impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// `int_0^h x^p cos(kx) dx` by the cosine series; valid for small `k h`.
fn head_series(p: f64, k: f64, h: f64) -> f64 {
    let mut total = 0.0;
    let mut factorial = 1.0;
    let kh2 = (k * h) * (k * h);
    let mut power = 1.0;
    for l in 0..30 {
        if l > 0 {
            factorial *= (2 * l - 1) as f64 * (2 * l) as f64;
            power *= -kh2;
        }
        let term = power / factorial * h.powf(p + 1.0) / (p + 2.0 * l as f64 + 1.0);
        total += term;
        if term.abs() < 1e-18 * total.abs().max(1e-300) {
            break;
        }
    }
    total
}

/// `int_0^pi x^p cos(kx) dx` with an a-posteriori error estimate.
pub fn cosine_moment(p: f64, k: u32) -> Result<(f64, f64)> {
    if !(p > -1.0 && p < 1.0) {
        return Err(Error::BadParameter(format!("exponent {p} outside (-1, 1)")));
    }
    let kf = k as f64;
    let f = |x: f64| x.powf(p) * (kf * x).cos();
    let r = rules();
    let mut low = 0.0;
    let mut high = 0.0;
    let mut hi = PI;
    for _ in 0..DEPTH {
        let lo = 0.5 * hi;
        let pieces = ((hi - lo) * kf / PI * 2.0).ceil().max(1.0) as usize;
        let step = (hi - lo) / pieces as f64;
        for s in 0..pieces {
            let a = lo + s as f64 * step;
            let b = if s + 1 == pieces { hi } else { a + step };
            low += apply(&r.low, a, b, &f);
            high += apply(&r.high, a, b, &f);
        }
        hi = lo;
    }
    let head = head_series(p, kf, hi);
    let value = high + head;
    let estimate = (high - low).abs();
    Ok((value, estimate))
}

/// `int_{-pi}^{pi} |x|^p dx`.
pub fn weight_mass(p: f64) -> f64 {
    2.0 * PI.powf(p + 1.0) / (p + 1.0)
}

/// `int_{-pi}^{pi} |x|^p e^{ikx} dx` for `k = 0..=max_k`, checked against the
/// error limit and, at `k = 0`, against the closed form.
pub fn weighted_fourier_moments(p: f64, max_k: u32) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(max_k as usize + 1);
    for k in 0..=max_k {
        let (v, est) = cosine_moment(p, k)?;
        if est > ERROR_LIMIT {
            return Err(Error::QuadratureFailure {
                estimate: est,
                limit: ERROR_LIMIT,
            });
        }
        out.push(2.0 * v);
    }
    let exact = weight_mass(p);
    let diag_err = (out[0] - exact).abs() / exact;
    if diag_err > 1e-9 {
        return Err(Error::QuadratureFailure {
            estimate: diag_err,
            limit: 1e-9,
        });
    }
    Ok(out)
}
