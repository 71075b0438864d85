use num_bigint::BigInt;

use super::dyadic::{Dyadic, Round};
use super::{Enclosure, Rational};
use crate::{Error, Result};

/// Smallest precision accepted by the certified logarithm.
pub const MIN_PRECISION_BITS: u32 = 16;

/// `A_n = 1/n - ln((n+1)/n)` with its certified enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ATerm {
    pub n: u64,
    pub value: Enclosure,
}

impl ATerm {
    /// Telescoping upper bound `1/n - 1/(n+1)`.
    pub fn upper_bound(&self) -> Rational {
        Rational::new(1, BigInt::from(self.n) * (self.n + 1))
    }
}

/// Certified enclosure of `ln((n+1)/n)` of width at most `2^(1-precision_bits)`.
///
/// Sums `2 * Σ_k 1/((2k+1) m^(2k+1))` with `m = 2n+1`, rounding each term
/// outward with guard bits. The omitted tail is at most the first omitted term
/// over `1 - m^-2`, and is added to the upper endpoint.
pub fn log_ratio(n: u64, precision_bits: u32) -> Result<Enclosure> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    if precision_bits < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(precision_bits));
    }
    let m: BigInt = BigInt::from(n) * 2u32 + 1u32;
    let m2 = &m * &m;
    let work = precision_bits + 24;
    // Terms until the tail drops below 2^-work relative to 2/m.
    let threshold = BigInt::from(1) << (work + 2);
    let mut lo = Dyadic::zero();
    let mut hi = Dyadic::zero();
    let mut power = m.clone(); // m^(2k+1)
    let mut k: u64 = 0;
    loop {
        let den = &power * (2 * k + 1);
        let two = BigInt::from(2);
        lo = &lo + &Dyadic::from_ratio_round(&two, &den, work, Round::Down);
        hi = &hi + &Dyadic::from_ratio_round(&two, &den, work, Round::Up);
        k += 1;
        power *= &m2;
        // First omitted term 2/((2k+1) m^(2k+1)), relative to 2/m: m^(2k) (2k+1).
        let ratio = (&power / &m) * (2 * k + 1);
        if ratio >= threshold {
            break;
        }
    }
    // tail <= 2 / ((2k+1) m^(2k+1) (1 - m^-2)) = 2 m^2 / ((2k+1) m^(2k+1) (m^2 - 1))
    let tail_num = BigInt::from(2) * &m2;
    let tail_den = &power * (2 * k + 1) * (&m2 - 1);
    hi = &hi + &Dyadic::from_ratio_round(&tail_num, &tail_den, work, Round::Up);
    Ok(Enclosure::new(lo, hi, precision_bits))
}

/// Certified `A_n = 1/n - ln((n+1)/n)`.
///
/// The subtraction cancels about `2 log2(n)` leading bits, so both operands
/// are evaluated with that many extra guard bits before the single outward
/// rounding to `precision_bits`.
pub fn a_term(n: u64, precision_bits: u32) -> Result<ATerm> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    if precision_bits < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(precision_bits));
    }
    let guard = 2 * (64 - n.leading_zeros()) + 8;
    let work = precision_bits + guard;
    let inv = Enclosure::from_rational(&Rational::recip_int(n), work);
    let log = log_ratio(n, work)?;
    let diff = &inv - &log;
    Ok(ATerm {
        n,
        value: diff.with_precision(precision_bits),
    })
}

/// Certified `ln q` assembled as `Σ_{j=1}^{q-1} ln((j+1)/j)`.
pub fn ln_int(q: u64, precision_bits: u32) -> Result<Enclosure> {
    if q == 0 {
        return Err(Error::ZeroIndex);
    }
    let work = precision_bits + 2 * (64 - q.leading_zeros()) + 8;
    let parts = (1..q).map(|j| log_ratio(j, work)).collect::<Result<Vec<_>>>()?;
    Ok(Enclosure::sum(&parts, work).with_precision(precision_bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact-rational atanh partial sums until the geometric tail is below `2^-bits`.
    fn ln_ratio_oracle(n: u64, bits: i64) -> (Rational, Rational) {
        let m = Rational::from(2 * n as i64 + 1);
        let m2 = &m * &m;
        let mut sum = Rational::zero();
        let mut power = m.clone();
        let mut k = 0i64;
        loop {
            sum += &Rational::new(2, 1) / &(&power * &Rational::from(2 * k + 1));
            k += 1;
            power = &power * &m2;
            let first_omitted = &Rational::new(2, 1) / &(&power * &Rational::from(2 * k + 1));
            let tail = &first_omitted / &(Rational::one() - m2.recip());
            if tail < Rational::pow2(-bits) {
                return (sum.clone(), &sum + &tail);
            }
        }
    }

    /// ln 2 = Σ 1/(k 2^k), a second independent route.
    fn ln2_oracle(bits: i64) -> (Rational, Rational) {
        let mut sum = Rational::zero();
        for k in 1..=(bits + 8) {
            sum += Rational::new(1, BigInt::from(k) << k as u64);
        }
        // Tail after K terms < 2^-K.
        let tail = Rational::pow2(-(bits + 8));
        (sum.clone(), &sum + &tail)
    }

    /// The oracle interval is far narrower than `e`, so overlap certifies agreement.
    fn assert_contains_interval(e: &Enclosure, lo: &Rational, hi: &Rational) {
        assert!(&e.lo().to_rational() <= hi, "{e:?} lo above {hi}");
        assert!(lo <= &e.hi().to_rational(), "{e:?} hi below {lo}");
    }

    #[test]
    fn ln2_enclosure() {
        let e = log_ratio(1, 64).unwrap();
        let (lo, hi) = ln_ratio_oracle(1, 100);
        assert_contains_interval(&e, &lo, &hi);
        let (lo2, hi2) = ln2_oracle(100);
        assert_contains_interval(&e, &lo2, &hi2);
        assert!(e.width() <= Dyadic::new(1, -63));
        assert!((e.midpoint().to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn ln_four_thirds() {
        let e = log_ratio(3, 32).unwrap();
        let (lo, hi) = ln_ratio_oracle(3, 80);
        assert_contains_interval(&e, &lo, &hi);
        assert!(e.width() <= Dyadic::new(1, -31));
        assert!((e.midpoint().to_f64() - 0.287682072).abs() < 1e-9);
    }

    #[test]
    fn large_n_between_reciprocals() {
        let n = 1_000_000u64;
        let e = log_ratio(n, 64).unwrap();
        assert!(e.lo().to_rational() > Rational::recip_int(n + 1));
        assert!(e.hi().to_rational() < Rational::recip_int(n));
    }

    #[test]
    fn width_bound_many_n() {
        for n in (1..2000u64).chain([1 << 20, 1 << 40, u64::MAX / 4]) {
            for p in [16u32, 53, 64, 96] {
                let e = log_ratio(n, p).unwrap();
                assert!(e.width() <= Dyadic::new(1, 1 - i64::from(p)), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(log_ratio(1, 15), Err(Error::PrecisionTooLow(15)));
        assert_eq!(log_ratio(0, 64), Err(Error::ZeroIndex));
        assert_eq!(a_term(0, 64), Err(Error::ZeroIndex));
    }

    #[test]
    fn a_term_values() {
        let a1 = a_term(1, 64).unwrap();
        let (lo, hi) = ln_ratio_oracle(1, 100);
        assert_contains_interval(&a1.value, &(Rational::one() - hi), &(Rational::one() - lo));
        assert!((a1.value.midpoint().to_f64() - 0.306852819).abs() < 1e-9);
        let a2 = a_term(2, 64).unwrap();
        assert!((a2.value.midpoint().to_f64() - 0.0945348919).abs() < 1e-9);
        for n in [1u64, 7, 1000, 123_456_789] {
            for p in [16u32, 64, 96] {
                let a = a_term(n, p).unwrap();
                assert!(a.value.width() <= Dyadic::new(1, 2 - i64::from(p)));
            }
        }
    }

    #[test]
    fn a_term_strict_bounds() {
        for n in 1..=10_000u64 {
            let a = a_term(n, 64).unwrap();
            assert!(a.value.lo().signum() > 0, "n={n}");
            assert!(a.value.hi().to_rational() < a.upper_bound(), "n={n}");
        }
    }

    #[test]
    fn halving_recursion() {
        for n in 1..=1000u64 {
            let lhs = a_term(n, 96).unwrap().value;
            let rhs = &(&Enclosure::from_rational(&Rational::new(1, BigInt::from(2 * n) * (2 * n + 1)), 96)
                + &a_term(2 * n, 96).unwrap().value)
                + &a_term(2 * n + 1, 96).unwrap().value;
            let residual = &lhs - &rhs;
            assert!(residual.contains_zero(), "n={n}");
            assert!(residual.width() <= Dyadic::new(1, -64), "n={n}");
        }
    }

    #[test]
    fn logs_are_additive() {
        // ln 2 = ln(4/3) + ln(3/2)
        let ln2 = log_ratio(1, 64).unwrap();
        let sum = &log_ratio(3, 64).unwrap() + &log_ratio(2, 64).unwrap();
        assert!(ln2.intersects(&sum));
        let ln4 = ln_int(4, 64).unwrap();
        assert!(ln4.intersects(&ln2.scale(2)));
    }
}
