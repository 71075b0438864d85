//! Locale-independent decimal rendering: `<sign><integer part>.<digits>`,
//! with ` (± 1e<k>)` appended for enclosures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, Zero};

use super::{Dyadic, Enclosure, Rational};
use crate::{Error, Result};

/// Upper limit on digits examined when searching for agreement.
pub const MAX_AGREED_DIGITS: u32 = 200;

pub trait DecimalRender {
    /// Renders `digits` decimals, or fails with precision-unreachable when the
    /// value is not known to that many digits.
    fn decimal_render(&self, digits: u32) -> Result<String>;
}

/// `t / 10^digits` written out in fixed point.
fn format_scaled(t: &BigInt, digits: u32, negative: bool) -> String {
    let magnitude = t.abs().to_string();
    let digits = digits as usize;
    let padded = if magnitude.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - magnitude.len()), magnitude)
    } else {
        magnitude
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

impl DecimalRender for Rational {
    /// Exact value rounded half away from zero.
    fn decimal_render(&self, digits: u32) -> Result<String> {
        let scale: BigInt = Pow::pow(BigInt::from(10), digits);
        let scaled: BigInt = self.numer().abs() * scale * 2u32 + self.denom();
        let rounded = scaled.div_floor(&(self.denom() * 2));
        let negative = self.signum() < 0 && !rounded.is_zero();
        Ok(format_scaled(&rounded, digits, negative))
    }
}

/// Truncated common prefix of both endpoints at `digits` decimals, if any.
fn common_prefix(e: &Enclosure, digits: u32) -> Option<String> {
    let lo = e.lo().scaled_decimal_trunc(digits);
    let hi = e.hi().scaled_decimal_trunc(digits);
    if lo != hi {
        return None;
    }
    if lo.is_zero() {
        // Both endpoints within 10^-digits of zero; no sign to report unless shared.
        let negative = e.hi().signum() < 0;
        return Some(format_scaled(&lo, digits, negative));
    }
    Some(format_scaled(&lo, digits, lo.is_negative()))
}

/// Largest number of decimals (up to `max`) on which both endpoints agree.
pub fn agreed_digits(e: &Enclosure, max: u32) -> Option<u32> {
    common_prefix(e, 0)?;
    let (mut good, mut bad) = (0u32, max + 1);
    // Agreement is monotone in the number of digits, so bisect.
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if common_prefix(e, mid).is_some() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some(good)
}

/// The agreed decimal prefix (possibly just the integer part), or `None` when
/// even the integer parts differ.
pub fn agreed_prefix(e: &Enclosure) -> Option<String> {
    let digits = agreed_digits(e, MAX_AGREED_DIGITS)?;
    common_prefix(e, digits)
}

/// Smallest `k` with `value <= 10^k`, for positive `value`.
pub fn decimal_exponent_ceil(value: &Rational) -> i64 {
    assert!(value.signum() > 0);
    let mut k = value.to_f64().log10().ceil() as i64;
    while &Rational::pow10(k - 1) >= value {
        k -= 1;
    }
    while &Rational::pow10(k) < value {
        k += 1;
    }
    k
}

/// Radius written as a power of ten bounding it from above.
pub fn radius_label(radius: &Dyadic) -> String {
    if radius.is_zero() {
        "0".to_string()
    } else {
        format!("1e{}", decimal_exponent_ceil(&radius.to_rational()))
    }
}

impl DecimalRender for Enclosure {
    fn decimal_render(&self, digits: u32) -> Result<String> {
        match common_prefix(self, digits) {
            Some(prefix) => Ok(format!("{prefix} (± {})", radius_label(&self.radius()))),
            None => {
                let have = agreed_digits(self, digits).map_or("no".to_string(), |d| d.to_string());
                Err(Error::PrecisionUnreachable(format!(
                    "enclosure {self} agrees on {have} decimals, {digits} requested"
                )))
            }
        }
    }
}

/// Scientific notation with `sig` significant digits, rounded up, so the
/// printed number is never below `value`. Used for certified error columns.
pub fn format_upper_sci(value: &Rational, sig: u32) -> String {
    if value.signum() <= 0 {
        return if value.is_zero() {
            "0".to_string()
        } else {
            format!("-{}", format_lower_sci(&-value, sig))
        };
    }
    let k = decimal_exponent_ceil(value);
    // value <= 10^k, so value / 10^(k - sig) <= 10^sig.
    let scaled = value * &Rational::pow10(i64::from(sig) - k);
    let mut mantissa = scaled.ceil();
    let mut exponent = k - 1;
    let limit: BigInt = Pow::pow(BigInt::from(10), sig);
    if mantissa >= limit {
        mantissa /= 10;
        exponent += 1;
    }
    sci_string(&mantissa, sig, exponent)
}

fn format_lower_sci(value: &Rational, sig: u32) -> String {
    let k = decimal_exponent_ceil(value);
    let scaled = value * &Rational::pow10(i64::from(sig) - k);
    let mantissa = scaled.floor();
    sci_string(&mantissa, sig, k - 1)
}

fn sci_string(mantissa: &BigInt, sig: u32, exponent: i64) -> String {
    let digits = mantissa.to_string();
    let digits = format!("{:0<width$}", digits, width = sig as usize);
    let (lead, rest) = digits.split_at(1);
    if rest.is_empty() {
        format!("{lead}e{exponent}")
    } else {
        format!("{lead}.{rest}e{exponent}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(lo: &str, hi: &str) -> Enclosure {
        Enclosure::from_rational_bounds(&lo.parse().unwrap(), &hi.parse().unwrap(), 80)
    }

    #[test]
    fn rational_rendering() {
        assert_eq!(Rational::new(1, 2).decimal_render(3).unwrap(), "0.500");
        assert_eq!(Rational::new(11, 35).decimal_render(5).unwrap(), "0.31429");
        assert_eq!(Rational::new(-2, 3).decimal_render(2).unwrap(), "-0.67");
        assert_eq!(Rational::new(5, 2).decimal_render(0).unwrap(), "3");
        assert_eq!(Rational::new(-1, 1000).decimal_render(2).unwrap(), "0.00");
        assert_eq!(Rational::new(1234, 1).decimal_render(1).unwrap(), "1234.0");
    }

    #[test]
    fn enclosure_prefix() {
        let e = enc("0.5772156", "0.5772157");
        assert_eq!(e.decimal_render(6).unwrap(), "0.577215 (± 1e-7)");
        let wide = enc("0.57", "0.58");
        assert!(matches!(wide.decimal_render(6), Err(Error::PrecisionUnreachable(_))));
        assert_eq!(wide.decimal_render(1).unwrap(), "0.5 (± 1e-2)");
        assert_eq!(agreed_digits(&wide, 10), Some(1));
        let neg = enc("-0.2416", "-0.2415");
        assert_eq!(neg.decimal_render(3).unwrap(), "-0.241 (± 1e-4)");
        let around_zero = enc("-0.00004", "0.00004");
        assert_eq!(around_zero.decimal_render(3).unwrap(), "0.000 (± 1e-4)");
        assert_eq!(agreed_prefix(&enc("0.25", "0.25")).unwrap().len(), 2 + MAX_AGREED_DIGITS as usize);
        assert_eq!(agreed_prefix(&enc("0.9", "1.1")), None);
    }

    #[test]
    fn upper_scientific() {
        assert_eq!(format_upper_sci(&Rational::new(1, 3), 3), "3.34e-1");
        assert_eq!(format_upper_sci(&Rational::new(1, 1000), 3), "1.00e-3");
        assert_eq!(format_upper_sci(&Rational::new(999_999, 1000), 2), "1.0e3");
        assert_eq!(format_upper_sci(&Rational::zero(), 2), "0");
        let parsed: Rational = format_upper_sci(&Rational::new(7, 13), 4).parse().unwrap();
        assert!(parsed >= Rational::new(7, 13));
    }

    #[test]
    fn exponent_ceil() {
        assert_eq!(decimal_exponent_ceil(&Rational::pow10(-7)), -7);
        assert_eq!(decimal_exponent_ceil(&Rational::new(5, 100_000_000)), -7);
        assert_eq!(decimal_exponent_ceil(&Rational::new(11, 10)), 1);
    }
}
