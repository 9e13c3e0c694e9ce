//! Explicit frames and bases: the flat tight frame with one averaging vector,
//! repeated and near-parallel families, weighted exponential conditional
//! bases, block direct sums with flat subspaces, and seeded random frames.

mod blocks;
pub mod quadrature;

use nalgebra::Cholesky;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, real, CMatrix, HermitianEigen};
use crate::system::VectorSystem;

pub use blocks::{
    assemble_block_system, find_flat_vector, lemma52_block, prop53_truncation, FlatVector,
    Lemma52Block, Prop53Block, Prop53Truncation,
};

pub const DEFAULT_BLOCK_EXPONENT: f64 = 0.45;
pub const DEFAULT_START_ORDER: usize = 4;
pub const DEFAULT_MAX_ORDER: usize = 256;

/// Sign of the weight exponent in `|x|^(sign a) e^{inx}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-", alias = "minus")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn yes() -> bool {
    true
}
fn default_block_exponent() -> f64 {
    DEFAULT_BLOCK_EXPONENT
}
fn default_start_order() -> usize {
    DEFAULT_START_ORDER
}
fn default_max_order() -> usize {
    DEFAULT_MAX_ORDER
}
fn default_cond() -> f64 {
    10.0
}

/// Description of a gallery system; the JSON payload of `gen`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum GallerySpec {
    Orthonormal {
        n: usize,
    },
    /// `n + 1` vectors in `C^n`: `e_i - (1/n) sum e_j` and `(1/sqrt n) sum e_j`.
    Lemma51 {
        n: usize,
    },
    /// Each `e_i` twice, in `C^n`, or in `C^2n` when `halfSpace` is set.
    Duplicated {
        n: usize,
        #[serde(default, rename = "halfSpace")]
        half_space: bool,
    },
    /// `(e_{2i-1}, e_{2i-1} + (1/n) e_{2i})` in `C^2n`.
    PerturbedPairs {
        n: usize,
    },
    /// `2N + 1` functions `|x|^(sign a) e^{ikx}` on `[-pi, pi]`.
    WeightedExponentials {
        a: f64,
        #[serde(rename = "N")]
        order: usize,
        sign: Sign,
        #[serde(default = "yes")]
        normalized: bool,
    },
    Lemma52Block {
        k: usize,
        eps: f64,
        #[serde(default = "default_block_exponent")]
        a: f64,
        #[serde(default = "default_start_order", rename = "startN")]
        start_order: usize,
        #[serde(default = "default_max_order", rename = "maxN")]
        max_order: usize,
    },
    Prop53Truncation {
        #[serde(rename = "M")]
        depth: usize,
        /// Per-block flatness budgets; defaults to `0.1 / m`.
        #[serde(default)]
        eps: Option<Vec<f64>>,
        #[serde(default = "default_block_exponent")]
        a: f64,
        #[serde(default = "default_start_order", rename = "startN")]
        start_order: usize,
        #[serde(default = "default_max_order", rename = "maxN")]
        max_order: usize,
    },
    RandomFrame {
        n: usize,
        m: usize,
        seed: u64,
        #[serde(default = "default_cond")]
        cond: f64,
    },
}

pub fn generate(spec: &GallerySpec) -> Result<VectorSystem> {
    match *spec {
        GallerySpec::Orthonormal { n } => {
            positive(n, "n")?;
            VectorSystem::orthonormal(n)
        }
        GallerySpec::Lemma51 { n } => lemma51(n),
        GallerySpec::Duplicated { n, half_space } => duplicated(n, half_space),
        GallerySpec::PerturbedPairs { n } => perturbed_pairs(n),
        GallerySpec::WeightedExponentials {
            a,
            order,
            sign,
            normalized,
        } => {
            if !(a > 0.0 && a < 0.5) {
                return Err(Error::BadParameter(format!(
                    "a must lie in (0, 1/2), got {a}"
                )));
            }
            weighted_exponentials(a, order, sign, normalized)
        }
        GallerySpec::Lemma52Block {
            k,
            eps,
            a,
            start_order,
            max_order,
        } => Ok(lemma52_block(k, eps, a, start_order, max_order)?.system),
        GallerySpec::Prop53Truncation {
            depth,
            ref eps,
            a,
            start_order,
            max_order,
        } => Ok(prop53_truncation(depth, eps.as_deref(), a, start_order, max_order)?.system),
        GallerySpec::RandomFrame { n, m, seed, cond } => random_frame(n, m, seed, cond),
    }
}

fn positive(n: usize, name: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::BadParameter(format!("{name} must be at least 1")));
    }
    Ok(())
}

pub fn lemma51(n: usize) -> Result<VectorSystem> {
    positive(n, "n")?;
    let inv = 1.0 / n as f64;
    let tail = 1.0 / (n as f64).sqrt();
    let m = CMatrix::from_fn(n, n + 1, |i, j| {
        if j == n {
            real(tail)
        } else if i == j {
            real(1.0 - inv)
        } else {
            real(-inv)
        }
    });
    VectorSystem::new(m)
}

pub fn duplicated(n: usize, half_space: bool) -> Result<VectorSystem> {
    positive(n, "n")?;
    let dim = if half_space { 2 * n } else { n };
    VectorSystem::new(CMatrix::from_fn(dim, 2 * n, |i, j| {
        real(if i == j / 2 { 1.0 } else { 0.0 })
    }))
}

pub fn perturbed_pairs(n: usize) -> Result<VectorSystem> {
    positive(n, "n")?;
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    let eps = 1.0 / n as f64;
    for i in 0..n {
        m[(2 * i, 2 * i)] = real(1.0);
        m[(2 * i, 2 * i + 1)] = real(1.0);
        m[(2 * i + 1, 2 * i + 1)] = real(eps);
    }
    VectorSystem::new(m)
}

/// Frequencies of the first `2N + 1` functions: `0, -1, 1, -2, 2, ...` for the
/// negative exponent family and `0, 1, -1, 2, -2, ...` for the positive one.
pub fn exponential_frequencies(order: usize, sign: Sign) -> Vec<i64> {
    let mut out = vec![0];
    for k in 1..=order as i64 {
        match sign {
            Sign::Minus => out.extend([-k, k]),
            Sign::Plus => out.extend([k, -k]),
        }
    }
    out
}

/// Gram matrix `[int |x|^(2 sign a) e^{i(n_j - n_k)x} dx]_{jk}` of the first
/// `2N + 1` weighted exponentials. `a = 0` gives plain exponentials.
pub fn weighted_exponential_gram(a: f64, order: usize, sign: Sign) -> Result<CMatrix> {
    if !(a > -0.5 && a < 0.5) {
        return Err(Error::BadParameter(format!(
            "a must lie in (-1/2, 1/2), got {a}"
        )));
    }
    let p = 2.0 * sign.factor() * a;
    let freqs = exponential_frequencies(order, sign);
    let moments = quadrature::weighted_fourier_moments(p, 2 * order as u32)?;
    let size = freqs.len();
    Ok(CMatrix::from_fn(size, size, |j, k| {
        real(moments[(freqs[j] - freqs[k]).unsigned_abs() as usize])
    }))
}

/// Coordinates (up to isometry) of a family with the given Gram matrix:
/// columns `f_j` with `<f_j, f_k> = gram[(j, k)]`.
pub fn realize_gram(gram: &CMatrix) -> Result<VectorSystem> {
    // F* F must equal conj(gram) under the first-argument-linear convention
    let target = gram.map(|z| z.conj());
    let factor = match Cholesky::new(target.clone()) {
        Some(ch) => ch.l().adjoint(),
        None => {
            let eig = HermitianEigen::new(&target);
            let mut f = eig.vectors.adjoint();
            for (i, v) in eig.values.iter().enumerate() {
                let s = real(v.max(0.0).sqrt());
                for j in 0..f.ncols() {
                    f[(i, j)] *= s;
                }
            }
            f
        }
    };
    VectorSystem::new(factor)
}

pub fn weighted_exponentials(
    a: f64,
    order: usize,
    sign: Sign,
    normalized: bool,
) -> Result<VectorSystem> {
    let mut g = weighted_exponential_gram(a, order, sign)?;
    if normalized {
        let diag = g[(0, 0)].re;
        g.unscale_mut(diag);
    }
    let labels = exponential_frequencies(order, sign)
        .iter()
        .map(|k| format!("k={k}"))
        .collect();
    VectorSystem::with_labels(realize_gram(&g)?.into_matrix(), Some(labels))
}

/// Seeded complex Gaussian frame whose frame operator has condition number `cond`.
pub fn random_frame(n: usize, m: usize, seed: u64, cond: f64) -> Result<VectorSystem> {
    positive(n, "n")?;
    if m < n {
        return Err(Error::BadParameter(format!(
            "need m >= n to span, got m = {m}, n = {n}"
        )));
    }
    if !(cond >= 1.0 && cond.is_finite()) {
        return Err(Error::BadParameter(format!(
            "cond must be >= 1, got {cond}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = CMatrix::from_fn(n, m, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        c64(re, im)
    });
    let svd = raw.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut scaled = u;
    for j in 0..n {
        let s = if n == 1 {
            1.0
        } else {
            cond.powf(-(j as f64) / (2.0 * (n - 1) as f64))
        };
        for i in 0..n {
            scaled[(i, j)] *= real(s);
        }
    }
    VectorSystem::new(scaled * v_t)
}
