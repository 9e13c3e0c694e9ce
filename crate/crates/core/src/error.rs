use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid vector system: {0}")]
    InvalidSystem(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("system does not span its ambient space (lower frame bound {lower_bound:e})")]
    NotSpanning { lower_bound: f64 },

    #[error("system contains a zero-norm vector")]
    ZeroNorm,

    #[error("operation needs at least 2 vectors, got {0}")]
    TooFewVectors(usize),

    #[error("vector counts differ: {left} vs {right}")]
    CountMismatch { left: usize, right: usize },

    #[error("exhaustive search over {subsets} subsets exceeds the guard of {guard}")]
    TooLarge { subsets: u128, guard: u128 },

    #[error("target size {target} is outside 1..={count}")]
    BadTarget { target: usize, count: usize },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("system is not separated (separation constant {separation:e})")]
    NotSeparated { separation: f64 },

    #[error("selection guarantee is empty and greedy could not certify a positive bound")]
    GuaranteeEmpty,

    #[error("delta {delta} violates (delta^2/A)(B/alpha^2) <= eps/2 (max admissible {max_delta})")]
    InfeasibleDelta { delta: f64, max_delta: f64 },

    #[error("extraction did not finish within {0} rounds")]
    RoundLimit(usize),

    #[error("extraction stopped with {selected} indices, {required} required")]
    CoverageShortfall { selected: usize, required: usize },

    #[error("quadrature error estimate {estimate:e} exceeds {limit:e}")]
    QuadratureFailure { estimate: f64, limit: f64 },

    #[error("no vector with analysis mass <= {budget}: best achieved {achieved}")]
    NotFlat { budget: f64, achieved: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("schema error at {context}: {message}")]
    Schema { context: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Stable variant name used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSystem(_) => "InvalidSystem",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotSpanning { .. } => "NotSpanning",
            Error::ZeroNorm => "ZeroNorm",
            Error::TooFewVectors(_) => "TooFewVectors",
            Error::CountMismatch { .. } => "CountMismatch",
            Error::TooLarge { .. } => "TooLarge",
            Error::BadTarget { .. } => "BadTarget",
            Error::BadParameter(_) => "BadParameter",
            Error::NotSeparated { .. } => "NotSeparated",
            Error::GuaranteeEmpty => "GuaranteeEmpty",
            Error::InfeasibleDelta { .. } => "InfeasibleDelta",
            Error::RoundLimit(_) => "RoundLimit",
            Error::CoverageShortfall { .. } => "CoverageShortfall",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::NotFlat { .. } => "NotFlat",
            Error::EmptyInput => "EmptyInput",
            Error::Schema { .. } => "SchemaError",
            Error::Numerical(_) => "Numerical",
        }
    }
}
