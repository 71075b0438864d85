//! Integer combinatorics behind the rational series: binary digit counts,
//! the signed digit balance `Δ±`, exact floor logarithms and the Carlitz
//! weight `ε`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Selects between the γ series (`Plus`) and the ln(4/π) analogs (`Minus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(±1)^(n-1)`: always 1 for `Plus`, alternating from +1 at n = 1 for `Minus`.
    pub fn alternation(self, n: u64) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus if n % 2 == 1 => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Counts of 0 bits (`N0`) and 1 bits (`N1`) of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitCounts {
    pub n: BigUint,
    pub zeros: u64,
    pub ones: u64,
}

impl DigitCounts {
    pub fn delta(&self, sign: Sign) -> i64 {
        let (ones, zeros) = (self.ones as i64, self.zeros as i64);
        match sign {
            Sign::Plus => ones + zeros,
            Sign::Minus => ones - zeros,
        }
    }
}

/// `Δ±(n)` tagged with the sign it was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedDelta {
    pub sign: Sign,
    pub value: i64,
}

/// Bit counts of `n` written in base 2 without leading zeros.
pub fn count_binary_digits(n: u64) -> Result<DigitCounts> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    let (zeros, ones) = counts_u64(n);
    Ok(DigitCounts {
        n: BigUint::from(n),
        zeros,
        ones,
    })
}

/// Arbitrary-size variant of [`count_binary_digits`].
pub fn count_binary_digits_big(n: &BigUint) -> Result<DigitCounts> {
    if n.is_zero() {
        return Err(Error::ZeroIndex);
    }
    let ones = n.count_ones();
    let zeros = n.bits() - ones;
    Ok(DigitCounts {
        n: n.clone(),
        zeros,
        ones,
    })
}

#[inline]
fn counts_u64(n: u64) -> (u64, u64) {
    let ones = u64::from(n.count_ones());
    let len = u64::from(64 - n.leading_zeros());
    (len - ones, ones)
}

/// `Δ±(n) = N1(n) ± N0(n)`.
pub fn delta(n: u64, sign: Sign) -> Result<i64> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    Ok(delta_unchecked(n, sign))
}

pub fn signed_delta(n: u64, sign: Sign) -> Result<SignedDelta> {
    delta(n, sign).map(|value| SignedDelta { sign, value })
}

/// Hot-loop form of [`delta`]; `n` must be positive.
#[inline]
pub(crate) fn delta_unchecked(n: u64, sign: Sign) -> i64 {
    debug_assert!(n > 0);
    let (zeros, ones) = counts_u64(n);
    match sign {
        Sign::Plus => (ones + zeros) as i64,
        Sign::Minus => ones as i64 - zeros as i64,
    }
}

/// The unique `L` with `q^L <= n < q^(L+1)`, by exact comparison against
/// running powers of `q`.
pub fn floor_log(n: u64, q: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    Ok(floor_log_unchecked(n, q))
}

#[inline]
pub(crate) fn floor_log_unchecked(n: u64, q: u64) -> u32 {
    if q == 2 {
        return 63 - n.leading_zeros();
    }
    let mut level = 0;
    let mut power = q;
    while power <= n {
        level += 1;
        match power.checked_mul(q) {
            Some(next) => power = next,
            None => break,
        }
    }
    level
}

/// Arbitrary-size variant of [`floor_log`].
pub fn floor_log_big(n: &BigUint, q: u64) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::ZeroIndex);
    }
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    let base = BigUint::from(q);
    let mut level = 0;
    let mut power = base.clone();
    while &power <= n {
        level += 1;
        power *= &base;
    }
    Ok(level)
}

/// Carlitz weight: `q - 1` when `q | n`, otherwise `-1`.
pub fn epsilon(n: u64, q: u64) -> Result<i64> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    Ok(epsilon_unchecked(n, q))
}

#[inline]
pub(crate) fn epsilon_unchecked(n: u64, q: u64) -> i64 {
    if n.is_multiple_of(q) {
        q as i64 - 1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn digit_counts() {
        let one = count_binary_digits(1).unwrap();
        assert_eq!((one.zeros, one.ones), (0, 1));
        let six = count_binary_digits(6).unwrap();
        assert_eq!((six.zeros, six.ones), (1, 2));
        let eight = count_binary_digits(8).unwrap();
        assert_eq!((eight.zeros, eight.ones), (3, 1));
        assert_eq!(count_binary_digits(0), Err(Error::ZeroIndex));
    }

    #[test]
    fn big_digit_counts_match_u64() {
        for n in [1u64, 2, 6, 255, 256, 1 << 40, u64::MAX] {
            let small = count_binary_digits(n).unwrap();
            let big = count_binary_digits_big(&BigUint::from(n)).unwrap();
            assert_eq!(small, big);
        }
        let huge = BigUint::one() << 200u32;
        let c = count_binary_digits_big(&huge).unwrap();
        assert_eq!((c.zeros, c.ones), (200, 1));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(4, Sign::Minus), Ok(-1));
        assert_eq!(delta(7, Sign::Plus), Ok(3));
        assert_eq!(delta(5, Sign::Minus), Ok(1));
        assert_eq!(delta(0, Sign::Plus), Err(Error::ZeroIndex));
        assert_eq!(
            signed_delta(6, Sign::Minus),
            Ok(SignedDelta {
                sign: Sign::Minus,
                value: 1
            })
        );
    }

    #[test]
    fn floor_log_examples() {
        assert_eq!(floor_log(8, 2), Ok(3));
        assert_eq!(floor_log(7, 2), Ok(2));
        assert_eq!(floor_log(9, 3), Ok(2));
        assert_eq!(floor_log(1, 7), Ok(0));
        assert_eq!(floor_log(u64::MAX, 2), Ok(63));
        assert_eq!(floor_log(u64::MAX, 10), Ok(19));
        assert_eq!(floor_log(0, 2), Err(Error::ZeroIndex));
        assert_eq!(floor_log(5, 1), Err(Error::InvalidBase(1)));
    }

    #[test]
    fn floor_log_at_powers() {
        for q in 2u64..=12 {
            for level in 1u32..=40 {
                let Some(power) = q.checked_pow(level) else {
                    let p = BigUint::from(q).pow(level);
                    assert_eq!(floor_log_big(&p, q), Ok(u64::from(level)));
                    assert_eq!(floor_log_big(&(p - 1u32), q), Ok(u64::from(level) - 1));
                    continue;
                };
                assert_eq!(floor_log(power, q), Ok(level));
                assert_eq!(floor_log(power - 1, q), Ok(level - 1));
            }
        }
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(6, 3), Ok(2));
        assert_eq!(epsilon(7, 3), Ok(-1));
        assert_eq!(epsilon(4, 2), Ok(1));
        assert_eq!(epsilon(4, 1), Err(Error::InvalidBase(1)));
    }

    #[test]
    fn epsilon_blocks_cancel() {
        for q in 2u64..=12 {
            for n in 1u64..=1_000_000 {
                let block: i64 = (0..q).map(|m| epsilon_unchecked(q * n + m, q)).sum();
                assert_eq!(block, 0, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn digit_step_identity_small_range() {
        for n in 2u64..=1 << 16 {
            for sign in [Sign::Plus, Sign::Minus] {
                let lhs = delta_unchecked(n / 2, sign) + sign.alternation(n);
                assert_eq!(lhs, delta_unchecked(n, sign), "n={n} {sign}");
            }
            assert_eq!(delta_unchecked(n / 2, Sign::Plus), i64::from(floor_log_unchecked(n, 2)));
        }
    }

    proptest! {
        #[test]
        fn counts_match_binary_string(n in 1u64..) {
            let s = format!("{n:b}");
            let c = count_binary_digits(n).unwrap();
            prop_assert_eq!(c.zeros as usize, s.chars().filter(|&ch| ch == '0').count());
            prop_assert_eq!(c.ones as usize, s.chars().filter(|&ch| ch == '1').count());
            prop_assert_eq!(c.zeros + c.ones, u64::from(floor_log(n, 2).unwrap()) + 1);
        }

        #[test]
        fn minus_delta_bounded_by_length(n in 1u64.., q in 2u64..40) {
            let len = i64::from(floor_log(n, 2).unwrap()) + 1;
            prop_assert!(delta(n, Sign::Minus).unwrap().abs() <= len);
            prop_assert_eq!(delta(n, Sign::Plus).unwrap(), len);
            let level = floor_log(n, q).unwrap();
            let lower = BigUint::from(q).pow(level);
            prop_assert!(lower <= BigUint::from(n));
            prop_assert!(BigUint::from(n) < lower * q);
        }
    }
}
