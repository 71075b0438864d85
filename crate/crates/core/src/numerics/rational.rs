use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Exact fraction kept in canonical form: `gcd(|num|, den) = 1`, `den >= 1`.
///
/// Addition follows the small-gcd scheme (Knuth, TAOCP 4.5.1) so that adding a
/// term with a small denominator to a partial sum with a huge one costs time
/// linear in the size of the partial sum.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

/// Greatest common divisor, always nonnegative.
///
/// Runs Euclid with big remainders until both operands fit in a machine word,
/// which makes the common case of one small operand linear time.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut x: BigUint = a.magnitude().clone();
    let mut y: BigUint = b.magnitude().clone();
    if x < y {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        if y.is_zero() {
            return BigInt::from(x);
        }
        if let (Some(xs), Some(ys)) = (x.to_u64(), y.to_u64()) {
            return BigInt::from(xs.gcd(&ys));
        }
        let r = &x % &y;
        x = y;
        y = r;
    }
}

impl Rational {
    /// Builds `num/den` in canonical form. Panics when `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let (mut num, mut den) = (num.into(), den.into());
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = gcd(&num, &den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        if num.is_zero() {
            den = BigInt::one();
        }
        Rational { num, den }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Rational::from_integer(0)
    }

    pub fn one() -> Self {
        Rational::from_integer(1)
    }

    /// `1/n`.
    pub fn recip_int(n: impl Into<BigInt>) -> Self {
        Rational::new(1, n)
    }

    /// `2^exp` for any signed exponent.
    pub fn pow2(exp: i64) -> Self {
        if exp >= 0 {
            Rational::from_integer(BigInt::one() << exp as u64)
        } else {
            Rational {
                num: BigInt::one(),
                den: BigInt::one() << exp.unsigned_abs(),
            }
        }
    }

    /// `10^exp` for any signed exponent.
    pub fn pow10(exp: i64) -> Self {
        let p: BigInt = Pow::pow(BigInt::from(10), exp.unsigned_abs());
        if exp >= 0 {
            Rational::from_integer(p)
        } else {
            Rational {
                num: BigInt::one(),
                den: p,
            }
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn into_parts(self) -> (BigInt, BigInt) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn signum(&self) -> i32 {
        match self.num.sign() {
            BigSign::Minus => -1,
            BigSign::NoSign => 0,
            BigSign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational::new(self.den.clone(), self.num.clone())
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> BigInt {
        -((-&self.num).div_floor(&self.den))
    }

    /// Multiplies by a machine integer.
    pub fn mul_int(&self, k: i64) -> Self {
        if k == 0 || self.is_zero() {
            return Rational::zero();
        }
        let k = BigInt::from(k);
        let g = gcd(&k, &self.den);
        Rational {
            num: &self.num * (&k / &g),
            den: &self.den / &g,
        }
    }

    /// Nearest `f64`; for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        // Scale so both parts fit comfortably before converting.
        let shift = self.num.bits().max(self.den.bits()).saturating_sub(1000) as usize;
        let n = (&self.num >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (&self.den >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn add_ref(&self, rhs: &Rational) -> Rational {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let d1 = gcd(&self.den, &rhs.den);
        if d1.is_one() {
            return Rational {
                num: &self.num * &rhs.den + &rhs.num * &self.den,
                den: &self.den * &rhs.den,
            };
        }
        let lhs_den = &self.den / &d1;
        let rhs_den = &rhs.den / &d1;
        let t = &self.num * &rhs_den + &rhs.num * &lhs_den;
        if t.is_zero() {
            return Rational::zero();
        }
        let d2 = gcd(&t, &d1);
        if d2.is_one() {
            Rational {
                num: t,
                den: lhs_den * &rhs.den,
            }
        } else {
            Rational {
                num: t / &d2,
                den: lhs_den * (&rhs.den / d2),
            }
        }
    }

    fn mul_ref(&self, rhs: &Rational) -> Rational {
        if self.is_zero() || rhs.is_zero() {
            return Rational::zero();
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        Rational {
            num: (&self.num / &g1) * (&rhs.num / &g2),
            den: (&self.den / &g2) * (&rhs.den / &g1),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -self.clone()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &Rational, b: &Rational| a.add_ref(b));
forward_binop!(Sub, sub, |a: &Rational, b: &Rational| a.add_ref(&-b));
forward_binop!(Mul, mul, |a: &Rational, b: &Rational| a.mul_ref(b));
forward_binop!(Div, div, |a: &Rational, b: &Rational| a.mul_ref(&b.recip()));

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = self.add_ref(rhs);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = self.add_ref(&rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = self.add_ref(&-rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `p`, `p/q`, decimals (`0.25`) and scientific notation (`1e-10`).
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Rational::new(n, d));
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (negative, mantissa) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
        value = value * Rational::pow10(exponent - frac_part.len() as i64);
        Ok(if negative { -value } else { value })
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact sum in canonical form, accumulated left to right.
pub fn rational_sum<'a>(terms: impl IntoIterator<Item = &'a Rational>) -> Rational {
    terms.into_iter().sum()
}

/// Exact but unreduced sum of fractions by binary splitting.
///
/// Returns `(num, den)` with `den > 0` equal to the product of the term
/// denominators. Used where a huge sum only needs to be rounded once, so the
/// final gcd can be skipped.
pub fn fraction_sum(terms: &[Rational]) -> (BigInt, BigInt) {
    match terms.len() {
        0 => (BigInt::zero(), BigInt::one()),
        1 => (terms[0].num.clone(), terms[0].den.clone()),
        len => {
            let (left, right) = terms.split_at(len / 2);
            let (ln, ld) = fraction_sum(left);
            let (rn, rd) = fraction_sum(right);
            if ld == rd {
                (ln + rn, ld)
            } else {
                (ln * &rd + rn * &ld, ld * rd)
            }
        }
    }
}
