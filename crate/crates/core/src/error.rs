use num_bigint::BigUint;
use thiserror::Error;

use crate::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("digit {digit} at position {position} is outside [0, {base})")]
    DigitOutOfRange {
        position: BigUint,
        digit: BigUint,
        base: BigUint,
    },

    #[error("position {0} is invalid: positions start at 1")]
    InvalidPosition(BigUint),

    #[error("position {position} exceeds the scanning limit {limit}")]
    PositionTooLarge { position: BigUint, limit: u64 },

    #[error("{what} = {value} is out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: String,
    },

    #[error("carry at position {position} unresolved with lookahead {lookahead}")]
    UnresolvedCarry { position: u64, lookahead: u64 },

    #[error("certification did not resolve within {cap} bits of precision")]
    PrecisionExhausted { cap: u64 },

    #[error("work of {needed} exceeds the budget of {budget}")]
    BudgetExceeded { needed: BigUint, budget: u64 },

    #[error("digit set I_{0} is empty")]
    EmptyDigitSet(u64),

    #[error("r * E = {product} is not an integer")]
    ProductNotInteger { product: Rational },

    #[error("r * E = {product} does not fit below the block modulus {modulus}")]
    ProductOverflow { product: Rational, modulus: BigUint },

    #[error("r * E = {product} is negative")]
    ProductNegative { product: Rational },

    #[error("point {0} is outside [0, 1)")]
    PointOutOfUnitInterval(Rational),

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by running out of a configured resource
    /// (lookahead, precision or enumeration budget) rather than bad input.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::UnresolvedCarry { .. }
                | Error::PrecisionExhausted { .. }
                | Error::BudgetExceeded { .. }
                | Error::PositionTooLarge { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::DigitOutOfRange { .. } => "digit_out_of_range",
            Error::InvalidPosition(_) => "invalid_position",
            Error::PositionTooLarge { .. } => "position_too_large",
            Error::OutOfRange { .. } => "out_of_range",
            Error::UnresolvedCarry { .. } => "unresolved_carry",
            Error::PrecisionExhausted { .. } => "precision_exhausted",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::EmptyDigitSet(_) => "empty_digit_set",
            Error::ProductNotInteger { .. } => "product_not_integer",
            Error::ProductOverflow { .. } => "product_overflow",
            Error::ProductNegative { .. } => "product_negative",
            Error::PointOutOfUnitInterval(_) => "point_out_of_unit_interval",
            Error::MalformedRational(_) => "malformed_rational",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
