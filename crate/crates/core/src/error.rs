use thiserror::Error;

use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index must be at least 1 (got 0)")]
    ZeroIndex,

    #[error("base must be at least 2 (got {0})")]
    InvalidBase(u64),

    #[error("precision of {0} bits is below the 16-bit minimum")]
    PrecisionTooLow(u32),

    #[error("precision-unreachable: {0}")]
    PrecisionUnreachable(String),

    #[error(
        "budget-exhausted after {terms} terms; best certified error {}",
        crate::numerics::render::format_upper_sci(.best_error, 3)
    )]
    BudgetExhausted { terms: u64, best_error: Rational },

    #[error("unaligned-cut: {series} cannot be certified after {terms} terms")]
    UnalignedCut { series: String, terms: u64 },

    #[error("index {index} is below the start index {start} of {series}")]
    IndexBelowStart { series: String, index: u64, start: u64 },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("{0} has irrational terms, so no exact term or partial sum exists")]
    NotRational(String),

    #[error("division by an enclosure containing zero")]
    DivisionByZero,

    #[error("invalid number: {0}")]
    Parse(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
