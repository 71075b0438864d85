use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Rounding direction for directed (outward) rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

/// Exact binary float `mantissa * 2^exponent`.
///
/// Normalised so the mantissa is odd (or zero with exponent 0), which makes
/// structural equality coincide with numeric equality. Sums, differences and
/// products are exact; only [`Dyadic::round`] and the `*_round` constructors
/// lose information, and they do so in a caller-chosen direction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mantissa = mantissa.into();
        if mantissa.is_zero() {
            return Dyadic::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            BigSign::Minus => -1,
            BigSign::NoSign => 0,
            BigSign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Multiplies by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Dyadic::new(&self.mantissa * k, self.exponent)
    }

    /// Exponent of the leading bit: the value lies in `[2^(m-1), 2^m)` in
    /// magnitude where `m` is the returned number. `None` for zero.
    pub fn magnitude_exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exponent + self.mantissa.bits() as i64)
        }
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << self.exponent.unsigned_abs())
        }
    }

    /// Nearest `f64`; for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits();
        let drop = bits.saturating_sub(60);
        let m = (&self.mantissa >> drop).to_f64().unwrap_or(0.0);
        m * 2f64.powi((self.exponent + drop as i64).clamp(-2000, 2000) as i32)
    }

    /// Rounds to at most `precision` significant bits in direction `dir`.
    pub fn round(&self, precision: u32, dir: Round) -> Self {
        let bits = self.mantissa.bits();
        if bits <= u64::from(precision) {
            return self.clone();
        }
        let drop = bits - u64::from(precision);
        let magnitude = self.mantissa.magnitude();
        let truncated = magnitude >> drop;
        // Normalised mantissas are odd, so dropping bits always loses something.
        let away = matches!((self.signum() > 0, dir), (true, Round::Up) | (false, Round::Down));
        let magnitude = if away { truncated + 1u32 } else { truncated };
        let sign = if self.signum() < 0 { BigSign::Minus } else { BigSign::Plus };
        Dyadic::new(BigInt::from_biguint(sign, magnitude), self.exponent + drop as i64)
    }

    /// `num/den` rounded to `precision` significant bits in direction `dir`.
    pub fn from_ratio_round(num: &BigInt, den: &BigInt, precision: u32, dir: Round) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Dyadic::zero();
        }
        let negative = num.is_negative() != den.is_negative();
        let (n, d) = (num.magnitude(), den.magnitude());
        // Scale so the integer quotient carries at least precision + 1 bits.
        let shift = i64::from(precision) + 1 + d.bits() as i64 - n.bits() as i64;
        let (scaled_n, scaled_d): (BigUint, BigUint) = if shift >= 0 {
            (n << shift as u64, d.clone())
        } else {
            (n.clone(), d << shift.unsigned_abs())
        };
        let (q, r) = scaled_n.div_rem(&scaled_d);
        let away = !r.is_zero()
            && matches!((negative, dir), (false, Round::Up) | (true, Round::Down));
        let q = if away { q + 1u32 } else { q };
        let sign = if negative { BigSign::Minus } else { BigSign::Plus };
        Dyadic::new(BigInt::from_biguint(sign, q), -shift).round(precision, dir)
    }

    pub fn from_rational_round(value: &Rational, precision: u32, dir: Round) -> Self {
        Dyadic::from_ratio_round(value.numer(), value.denom(), precision, dir)
    }

    /// `self / rhs` rounded in direction `dir`.
    pub fn div_round(&self, rhs: &Dyadic, precision: u32, dir: Round) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        Dyadic::from_ratio_round(&self.mantissa, &rhs.mantissa, precision, dir)
            .shl(self.exponent - rhs.exponent)
    }

    /// Truncation toward zero of `self * 10^digits`.
    pub(crate) fn scaled_decimal_trunc(&self, digits: u32) -> BigInt {
        let scaled = &self.mantissa * BigInt::from(10u32).pow(digits);
        if self.exponent >= 0 {
            scaled << self.exponent as u64
        } else {
            let magnitude = scaled.magnitude() >> self.exponent.unsigned_abs();
            let sign = if self.signum() < 0 { BigSign::Minus } else { BigSign::Plus };
            BigInt::from_biguint(sign, magnitude)
        }
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        // Same nonzero sign: compare magnitudes by leading-bit position first.
        let (ma, mb) = (self.magnitude_exponent().unwrap(), other.magnitude_exponent().unwrap());
        let by_magnitude = if ma != mb {
            ma.cmp(&mb)
        } else {
            let e = self.exponent.min(other.exponent);
            let a = self.mantissa.magnitude() << (self.exponent - e) as u64;
            let b = other.mantissa.magnitude() << (other.exponent - e) as u64;
            a.cmp(&b)
        };
        if sa > 0 {
            by_magnitude
        } else {
            by_magnitude.reverse()
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_exact(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let e = a.exponent.min(b.exponent);
    let ma = &a.mantissa << (a.exponent - e) as u64;
    let mb = &b.mantissa << (b.exponent - e) as u64;
    Dyadic::new(ma + mb, e)
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        add_exact(self, rhs)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        add_exact(&self, &rhs)
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        add_exact(self, &-rhs)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        add_exact(&self, &-rhs)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}
