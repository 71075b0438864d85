use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use super::dyadic::{Dyadic, Round};
use super::Rational;
use crate::{Error, Result};

/// Certified interval `[lo, hi]` with dyadic endpoints.
///
/// Every operation rounds its lower endpoint down and its upper endpoint up to
/// `precision_bits` significant bits, so the result contains the exact result
/// of the operation applied to any points of the inputs.
#[derive(Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
}

impl Enclosure {
    /// Builds `[lo, hi]`, rounding outward to `precision_bits`.
    pub fn new(lo: Dyadic, hi: Dyadic, precision_bits: u32) -> Self {
        assert!(lo <= hi, "inverted enclosure {lo:?} > {hi:?}");
        Enclosure {
            lo: lo.round(precision_bits, Round::Down),
            hi: hi.round(precision_bits, Round::Up),
            precision_bits,
        }
    }

    pub fn point(value: Dyadic, precision_bits: u32) -> Self {
        Enclosure::new(value.clone(), value, precision_bits)
    }

    pub fn from_rational(value: &Rational, precision_bits: u32) -> Self {
        Enclosure {
            lo: Dyadic::from_rational_round(value, precision_bits, Round::Down),
            hi: Dyadic::from_rational_round(value, precision_bits, Round::Up),
            precision_bits,
        }
    }

    /// Encloses the (not necessarily reduced) fraction `num/den`.
    pub fn from_fraction(num: &BigInt, den: &BigInt, precision_bits: u32) -> Self {
        Enclosure {
            lo: Dyadic::from_ratio_round(num, den, precision_bits, Round::Down),
            hi: Dyadic::from_ratio_round(num, den, precision_bits, Round::Up),
            precision_bits,
        }
    }

    /// Smallest enclosure of the rational interval `[lo, hi]`.
    pub fn from_rational_bounds(lo: &Rational, hi: &Rational, precision_bits: u32) -> Self {
        assert!(lo <= hi, "inverted bounds");
        Enclosure {
            lo: Dyadic::from_rational_round(lo, precision_bits, Round::Down),
            hi: Dyadic::from_rational_round(hi, precision_bits, Round::Up),
            precision_bits,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Certified error bound `hi - lo` (exact).
    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    /// Half-width, exact.
    pub fn radius(&self) -> Dyadic {
        self.width().shl(-1)
    }

    pub fn midpoint(&self) -> Dyadic {
        (&self.lo + &self.hi).shl(-1)
    }

    /// Re-rounds the endpoints outward at a different precision.
    pub fn with_precision(&self, precision_bits: u32) -> Self {
        Enclosure::new(self.lo.clone(), self.hi.clone(), precision_bits)
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        &self.lo.to_rational() <= x && x <= &self.hi.to_rational()
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    /// True when `other` lies entirely inside `self`.
    pub fn contains(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Enclosure) -> Option<Enclosure> {
        if !self.intersects(other) {
            return None;
        }
        Some(Enclosure {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            precision_bits: self.precision_bits.max(other.precision_bits),
        })
    }

    /// Widens to `[lo - below, hi + above]`, both nonnegative.
    pub fn widen(&self, below: &Rational, above: &Rational) -> Self {
        assert!(below.signum() >= 0 && above.signum() >= 0, "negative widening");
        let p = self.precision_bits;
        let down = Dyadic::from_rational_round(below, p, Round::Up);
        let up = Dyadic::from_rational_round(above, p, Round::Up);
        Enclosure::new(&self.lo - &down, &self.hi + &up, p)
    }

    pub fn abs(&self) -> Self {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            -self
        } else {
            let hi = (-&self.lo).max(self.hi.clone());
            Enclosure {
                lo: Dyadic::zero(),
                hi,
                precision_bits: self.precision_bits,
            }
        }
    }

    /// Exact scaling by a machine integer (no rounding needed beyond the
    /// output precision).
    pub fn scale(&self, k: i64) -> Self {
        let (a, b) = (self.lo.mul_int(k), self.hi.mul_int(k));
        let (lo, hi) = if k >= 0 { (a, b) } else { (b, a) };
        Enclosure::new(lo, hi, self.precision_bits)
    }

    pub fn div(&self, rhs: &Enclosure) -> Result<Enclosure> {
        if rhs.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.precision_bits.max(rhs.precision_bits);
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let lo = pairs.iter().map(|(a, b)| a.div_round(b, p, Round::Down)).min().unwrap();
        let hi = pairs.iter().map(|(a, b)| a.div_round(b, p, Round::Up)).max().unwrap();
        Ok(Enclosure {
            lo,
            hi,
            precision_bits: p,
        })
    }

    /// Sums enclosures exactly and rounds once at `precision_bits`.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Enclosure>, precision_bits: u32) -> Self {
        let (lo, hi) = items.into_iter().fold((Dyadic::zero(), Dyadic::zero()), |(lo, hi), e| {
            (&lo + &e.lo, &hi + &e.hi)
        });
        Enclosure::new(lo, hi, precision_bits)
    }
}

impl Add<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure::new(
            &self.lo + &rhs.lo,
            &self.hi + &rhs.hi,
            self.precision_bits.max(rhs.precision_bits),
        )
    }
}

impl Sub<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure::new(
            &self.lo - &rhs.hi,
            &self.hi - &rhs.lo,
            self.precision_bits.max(rhs.precision_bits),
        )
    }
}

impl Mul<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Enclosure::new(lo, hi, self.precision_bits.max(rhs.precision_bits))
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
            precision_bits: self.precision_bits,
        }
    }
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]@{}", self.lo, self.hi, self.precision_bits)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
