//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors surfaced by exact-arithmetic operations.
///
/// The arithmetic layer never guesses: whenever a valuation or a leading
/// coefficient cannot be certified from the tracked precision window, the
/// operation fails with an explicit error instead of returning wrong digits.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("valuation cannot be determined at the available precision")]
    IndeterminateValuation,
    #[error("division by exact zero")]
    DivisionByZero,
    #[error("twisted series is not normalized: constant coefficient must be 1")]
    NotNormalized,
    #[error("Newton polygon is malformed: {0}")]
    MalformedPolygon(String),
    #[error("generators are linearly dependent over the base field")]
    DependentGenerators,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("lattice truncation did not stabilize below the degree cap {0}")]
    TruncationNotStabilized(u32),
    #[error("exponent {0} is not a multiple of q-1, value would be ill defined")]
    IllDefinedExponent(i64),
    #[error("Carlitz coefficient index {0} exceeds the degree of a")]
    ZeroCarlitzCoefficient(u32),
    #[error("frame is not in the required subdomain: log of the next-to-last coordinate must be at least {0}")]
    NotInFk(i64),
    #[error("frame is not in the fundamental domain: {0}")]
    NotInFundamentalDomain(String),
    #[error("evaluator is not constant on the sampled fiber: {0}")]
    FiberNotConstant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
