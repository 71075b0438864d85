//! Exact-rational and certified-interval evaluation of Vacca-type series for
//! Euler's constant γ and its alternating analog ln(4/π).
//!
//! The crate is organised bottom-up:
//!
//! * [`digits`]: binary digit counts, floor logarithms and the Carlitz weight.
//! * [`numerics`]: canonical rationals, dyadic floats, outward-rounded
//!   enclosures and a certified `ln((n+1)/n)`.
//! * [`series`]: the catalog of series, exact partial sums, certified tail
//!   bounds and target-precision evaluation.
//! * [`acceleration`]: the polynomials `P_q` of the accelerated family and
//!   the identities behind them.
//! * [`verification`]: finite-range executable checks of every identity and
//!   bound used by the derivations.
//! * [`bench`]: certified-error-versus-terms convergence tables.

pub mod acceleration;
pub mod bench;
pub mod digits;
mod error;
pub mod numerics;
pub mod series;
pub mod verification;

pub use error::{Error, Result};
pub use numerics::{Dyadic, Enclosure, Rational};
pub use series::{EvalReport, Family, SeriesId, Sign};

/// Working precision used when the caller does not choose one.
pub const DEFAULT_PRECISION_BITS: u32 = 64;
