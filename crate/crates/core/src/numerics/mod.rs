//! Exact rationals, dyadic floats and certified enclosures, plus the one
//! transcendental this crate needs: `ln((n+1)/n)`.

use std::borrow::Borrow;

mod dyadic;
mod enclosure;
mod log;
mod rational;
pub mod render;

pub use dyadic::{Dyadic, Round};
pub use enclosure::Enclosure;
pub use log::{a_term, ln_int, log_ratio, ATerm, MIN_PRECISION_BITS};
pub use rational::{fraction_sum, gcd, rational_sum, Rational};
pub use render::DecimalRender;

/// Encloses an exact sum of rationals with a single outward rounding.
///
/// The sum is formed by binary splitting without intermediate reduction,
/// which keeps the cost near-linear in the total size of the terms.
pub fn exact_sum_enclosure(terms: &[Rational], precision_bits: u32) -> Enclosure {
    let (num, den) = fraction_sum(terms);
    Enclosure::from_fraction(&num, &den, precision_bits)
}

/// Encloses a sum of rationals by rounding each term outward with
/// `log2(count_hint) + 8` guard bits and adding the dyadic bounds exactly.
///
/// The accumulated error is at most `2^(1 - work) * Σ|t|`; for heavily
/// cancelling sums the result is wider than one ulp but still certified.
pub fn rounded_sum_enclosure<T: Borrow<Rational>>(
    terms: impl IntoIterator<Item = T>,
    count_hint: usize,
    precision_bits: u32,
) -> Enclosure {
    let guard = 64 - (count_hint as u64).leading_zeros() + 8;
    let work = precision_bits + guard;
    let mut lo = Dyadic::zero();
    let mut hi = Dyadic::zero();
    for t in terms {
        let t = t.borrow();
        lo = &lo + &Dyadic::from_rational_round(t, work, Round::Down);
        hi = &hi + &Dyadic::from_rational_round(t, work, Round::Up);
    }
    Enclosure::new(lo, hi, precision_bits)
}
