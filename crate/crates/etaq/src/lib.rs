//! Exact arithmetic for integral-weight eta-quotients.
//!
//! The crate computes, with no floating point on any result path:
//!
//! - truncated q-expansions of eta-quotients with arbitrary-precision
//!   integer coefficients ([`qseries`]),
//! - the invariants attached to a level/exponent pair: weight, the auxiliary
//!   product and its squarefree part, the coefficient modulus, cusp numbers
//!   ([`etaquotient`]),
//! - dimensions of the ambient modular-form spaces by an exact rational
//!   formula ([`dimension`]),
//! - the coefficient action of extended Hecke operators on those expansions,
//!   together with a closed divisor-sum formula for the Fourier coefficients
//!   of a catalogued family of eta-quotients ([`hecke`]),
//! - the embedded 83-row catalog itself, end-to-end verification of every
//!   row, and a bounded exponent-box search that re-derives the catalog
//!   level by level ([`catalog`]).
//!
//! The companion `etaq` binary exposes all of this as batch subcommands.

pub mod catalog;
pub mod dimension;
pub mod etaquotient;
pub mod hecke;
pub mod numtheory;
pub mod qseries;

pub use catalog::{EnumerationConfig, TableEntry, VerificationReport};
pub use etaquotient::{DerivedInvariants, EtaQuotient};
pub use hecke::{FourthRoot, GaussianRational, HeckeContext};
pub use qseries::QSeries;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Errors reported by fallible operations across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("level must be a positive integer")]
    InvalidLevel,
    #[error("level {level} has {expected} divisors, but {got} exponents were supplied")]
    ExponentCount {
        level: u64,
        expected: usize,
        got: usize,
    },
    #[error("{n} is not a divisor of level {level}")]
    NotADivisor { level: u64, n: u64 },
    #[error("malformed exponent string: {0}")]
    ParseRString(String),
    #[error("series offset {0} does not lie in (1/24)Z")]
    OffsetDenominator(Box<BigRational>),
    #[error(
        "coefficient of q^{exponent} requested, but the series is only correct below q^{limit}"
    )]
    InsufficientPrecision {
        exponent: Box<BigRational>,
        limit: Box<BigRational>,
    },
    #[error("index {l} is not congruent to 1 modulo m_r = {m_r}")]
    NonAdmissibleIndex { l: u64, m_r: u64 },
    #[error("exponent {n} is not on the series lattice {offset} + Z")]
    OffLattice {
        n: Box<BigRational>,
        offset: Box<BigRational>,
    },
    #[error("weight is not an integer (sum of exponents is odd)")]
    HalfIntegralWeight,
    #[error("operation requires weight k >= 1, got k = {k}")]
    WeightTooSmall { k: i64 },
    #[error("argument {a} is not coprime to the level {level}")]
    NotCoprime { a: u64, level: u64 },
    #[error("parity condition fails at level {level} for even index {l}: N(k+delta) = 2 (mod 4)")]
    Condition7Violated { l: u64, level: u64 },
    #[error("radical condition fails: rad({w}, {l}) does not divide the level {level}")]
    RadConditionViolated { w: Box<BigInt>, l: u64, level: u64 },
    #[error("dimension formula is not applicable: the weight does not exceed the threshold")]
    FormulaNotApplicable,
    #[error("embedded catalog is corrupt: {0}")]
    CorruptTable(String),
    #[error("invalid JSON for a q-series: {0}")]
    BadSeriesJson(String),
}

pub type Result<T> = std::result::Result<T, Error>;
