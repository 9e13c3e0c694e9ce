//! Basis-quality constants of a finite vector system, all computed as exact
//! spectral quantities of the synthesis matrix `F` (columns `f_i`).
//!
//! * Hilbertian constant `L = sigma_max(F)`
//! * Besselian constant `1 / sigma_min(F)` (infinite when the columns are dependent)
//! * Riesz constant `M = max(L, Besselian)`
//! * Schauder basis constant: largest norm of the prefix coordinate projections
//! * separation: smallest distance from a vector to the span of the others

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    column_singular_values, columns_of, gram, numerical_rank, operator_norm, pseudo_inverse,
    singular_values, CMatrix, HermitianEigen,
};
use crate::system::VectorSystem;

/// A nonnegative constant that may be `+inf`. Serialized as a JSON number or
/// the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            ExtReal::Finite(x)
        } else {
            ExtReal::Infinite
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Infinite => None,
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        ExtReal::from_f64(self.to_f64().max(other.to_f64()))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;
        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a finite number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
                if v == "inf" {
                    Ok(ExtReal::Infinite)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(ExtVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BasisMetrics {
    pub riesz: ExtReal,
    pub hilbertian: f64,
    pub besselian: ExtReal,
    pub schauder: ExtReal,
    pub separation: f64,
    pub singular_values: Vec<f64>,
}

/// All constants at once, Schauder constant in storage order.
pub fn basis_metrics(system: &VectorSystem) -> BasisMetrics {
    let singular_values = column_singular_values(system.matrix());
    let (hilbertian, besselian) = extremes(&singular_values);
    let separation = if system.count() < 2 {
        system.norms()[0]
    } else {
        separation_from(system, besselian.is_finite())
    };
    let natural: Vec<usize> = (0..system.count()).collect();
    BasisMetrics {
        riesz: besselian.max(ExtReal::Finite(hilbertian)),
        hilbertian,
        besselian,
        schauder: schauder_in_order(system, &natural, besselian.is_finite()),
        separation,
        singular_values,
    }
}

fn extremes(values: &[f64]) -> (f64, ExtReal) {
    let top = values[0];
    let rank = numerical_rank(values);
    let besselian = if rank == values.len() {
        ExtReal::Finite(1.0 / values[values.len() - 1])
    } else {
        ExtReal::Infinite
    };
    (top, besselian)
}

/// `max(sigma_max, 1 / sigma_min)` of the synthesis matrix.
pub fn riesz_constant(system: &VectorSystem) -> ExtReal {
    let (l, b) = hilbertian_besselian(system);
    b.max(ExtReal::Finite(l))
}

pub fn hilbertian_besselian(system: &VectorSystem) -> (f64, ExtReal) {
    extremes(&column_singular_values(system.matrix()))
}

/// Basis constant of the system taken in `order` (a permutation of `0..m`).
pub fn schauder_basis_constant(system: &VectorSystem, order: &[usize]) -> Result<ExtReal> {
    let m = system.count();
    let mut seen = vec![false; m];
    if order.len() != m
        || order
            .iter()
            .any(|&i| i >= m || std::mem::replace(&mut seen[i], true))
    {
        return Err(Error::BadParameter(format!(
            "order must be a permutation of 0..{m}"
        )));
    }
    let independent = hilbertian_besselian(system).1.is_finite();
    Ok(schauder_in_order(system, order, independent))
}

fn schauder_in_order(system: &VectorSystem, order: &[usize], independent: bool) -> ExtReal {
    if !independent {
        return ExtReal::Infinite;
    }
    let f = columns_of(system.matrix(), order);
    let m = f.ncols();
    // rows of the pseudoinverse are the coordinate functionals on the span
    let coords = pseudo_inverse(&f);
    let k = (1..m)
        .map(|p| {
            let projection = f.columns(0, p) * coords.rows(0, p);
            operator_norm(&projection)
        })
        .fold(1.0, f64::max);
    ExtReal::Finite(k)
}

/// Smallest distance from some `f_j` to the span of the others.
pub fn separation_constant(system: &VectorSystem) -> Result<f64> {
    if system.count() < 2 {
        return Err(Error::TooFewVectors(system.count()));
    }
    let independent = hilbertian_besselian(system).1.is_finite();
    Ok(separation_from(system, independent))
}

fn separation_from(system: &VectorSystem, independent: bool) -> f64 {
    if !independent {
        return 0.0;
    }
    // row j of the pseudoinverse is the functional dual to f_j; its norm is
    // the reciprocal of the distance from f_j to the span of the others
    let coords = pseudo_inverse(system.matrix());
    (0..system.count())
        .map(|j| 1.0 / coords.row(j).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Smallest `K` with `K^-1 ||sum a_i f_i|| <= ||sum a_i g_i|| <= K ||sum a_i f_i||`.
pub fn equivalence_constant(a: &VectorSystem, b: &VectorSystem) -> Result<ExtReal> {
    if a.count() != b.count() {
        return Err(Error::CountMismatch {
            left: a.count(),
            right: b.count(),
        });
    }
    let f = a.matrix();
    let g = b.matrix();
    let m = a.count();
    let stacked = CMatrix::from_fn(f.nrows() + g.nrows(), m, |i, j| {
        if i < f.nrows() {
            f[(i, j)]
        } else {
            g[(i - f.nrows(), j)]
        }
    });
    let rank_f = numerical_rank(&singular_values(f));
    let rank_g = numerical_rank(&singular_values(g));
    let rank_both = numerical_rank(&singular_values(&stacked));
    if rank_f != rank_g || rank_f != rank_both {
        return Ok(ExtReal::Infinite);
    }
    if rank_f == 0 {
        return Ok(ExtReal::Finite(1.0));
    }
    // restrict both Gram matrices to the common complement of the kernel
    let gram_a = gram(f);
    let gram_b = gram(g);
    let eig_a = HermitianEigen::new(&gram_a);
    let q = eig_a.vectors.columns(0, rank_f).into_owned();
    let a_r = q.adjoint() * &gram_a * &q;
    let b_r = q.adjoint() * &gram_b * &q;
    let whiten = HermitianEigen::new(&a_r).map(|v| v.max(0.0).sqrt().recip());
    let pencil = HermitianEigen::new(&(&whiten * b_r * &whiten));
    let hi = pencil.max().max(0.0).sqrt();
    let lo = pencil.min().max(0.0).sqrt();
    if lo <= 0.0 {
        return Ok(ExtReal::Infinite);
    }
    Ok(ExtReal::Finite(hi.max(1.0 / lo)))
}
