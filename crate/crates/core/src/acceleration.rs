//! The polynomials `P_q` of the accelerated family
//!
//! ```text
//! P_q(x) = (qx+1)(qx+2)...(qx+q-1) * Σ_{m=1}^{q-1} m(q-m)/(qx+m)
//! ```
//!
//! together with the exact identities used to derive the accelerated series
//! and the asymptotic rate model `(1 - q^-2)/ln q * ln n / (6 n^3)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numerics::{ln_int, Enclosure, Rational};
use crate::{Error, Result};

/// `P_q` with exact integer coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPoly {
    q: u64,
    coefficients: Vec<BigInt>,
}

impl PPoly {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coefficients.last().expect("nonempty")
    }

    /// Expected leading coefficient `q^(q-2) * q(q^2-1)/6`.
    pub fn expected_leading(q: u64) -> BigInt {
        let q_big = BigInt::from(q);
        num_traits::pow(q_big.clone(), (q - 2) as usize) * weight_sum(q)
    }

    /// Horner evaluation at an integer point.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coefficients
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_u64(&self, x: u64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// Copy with one coefficient replaced; used to inject faults into the
    /// verification suites.
    pub fn with_coefficient(&self, index: usize, value: BigInt) -> PPoly {
        let mut coefficients = self.coefficients.clone();
        coefficients[index] = value;
        PPoly {
            q: self.q,
            coefficients,
        }
    }
}

/// `Σ_{m=1}^{q-1} m(q-m) = q(q^2-1)/6`.
fn weight_sum(q: u64) -> BigInt {
    let q = BigInt::from(q);
    &q * (&q * &q - 1u32) / 6u32
}

fn check_base(q: u64) -> Result<()> {
    if q < 2 {
        Err(Error::InvalidBase(q))
    } else {
        Ok(())
    }
}

/// Multiplies an ascending coefficient list by `(a x + b)`.
fn mul_linear(poly: &[BigInt], a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); poly.len() + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i] += c * b;
        out[i + 1] += c * a;
    }
    out
}

/// Expands `P_q` by convolving linear factors: for each `m` the product
/// `Π_{j≠m} (qx + j)` is expanded, scaled by `m(q-m)` and accumulated.
pub fn build_p_poly(q: u64) -> Result<PPoly> {
    check_base(q)?;
    let a = BigInt::from(q);
    let degree = (q - 2) as usize;
    let mut coefficients = vec![BigInt::zero(); degree + 1];
    for m in 1..q {
        let mut product = vec![BigInt::one()];
        for j in (1..q).filter(|&j| j != m) {
            product = mul_linear(&product, &a, &BigInt::from(j));
        }
        let weight = BigInt::from(m * (q - m));
        for (acc, c) in coefficients.iter_mut().zip(&product) {
            *acc += c * &weight;
        }
    }
    Ok(PPoly { q, coefficients })
}

/// `P_q(x)` straight from the unexpanded sum-of-fractions form, as an
/// independent route for checking [`build_p_poly`].
pub fn p_poly_direct(q: u64, x: u64) -> Result<Rational> {
    check_base(q)?;
    let qx = BigInt::from(q) * x;
    let product: BigInt = (1..q).map(|j| &qx + j).product();
    let sum: Rational = (1..q)
        .map(|m| Rational::new(m * (q - m), &qx + m))
        .sum();
    Ok(Rational::from_integer(product) * sum)
}

/// `qn (qn+1) ... (qn+q)`.
pub fn block_denominator(q: u64, n: u64) -> BigInt {
    let qn = BigInt::from(q) * n;
    (0..=q).map(|i| &qn + i).product()
}

/// `[(q-1)/(qn) - Σ_m 2/(qn+m) + (q-1)/(qn+q)] - 2 P_q(n) / (qn ... (qn+q))`.
///
/// The averaging step of the acceleration argument says this is zero.
pub fn averaged_identity_residual(q: u64, n: u64) -> Result<Rational> {
    let poly = build_p_poly(q)?;
    averaged_identity_residual_with(&poly, n)
}

/// Same as [`averaged_identity_residual`] against a caller-supplied `P_q`.
pub fn averaged_identity_residual_with(poly: &PPoly, n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    let q = poly.q();
    let qn = q * n;
    let q1 = (q - 1) as i64;
    let mut lhs = Rational::new(q1, qn) + Rational::new(q1, BigInt::from(qn) + q);
    for m in 1..q {
        lhs -= &Rational::new(2, BigInt::from(qn) + m);
    }
    let rhs = Rational::new(poly.eval_u64(n) * 2u32, block_denominator(q, n));
    Ok(lhs - rhs)
}

/// `Σ_{m=1}^{q-1} (2m - q)`.
pub fn two_m_minus_q_sum(q: u64) -> Result<i64> {
    check_base(q)?;
    let q = q as i64;
    Ok((1..q).map(|m| 2 * m - q).sum())
}

/// Certified `(1 - q^-2) / ln q`, the leading factor of the term asymptotics.
pub fn speedup_factor(q: u64, precision_bits: u32) -> Result<Enclosure> {
    check_base(q)?;
    let work = precision_bits + 16;
    let q2 = BigInt::from(q) * q;
    let numerator = Enclosure::from_rational(&Rational::new(&q2 - 1u32, q2), work);
    let ln_q = ln_int(q, work)?;
    Ok(numerator.div(&ln_q)?.with_precision(precision_bits))
}

/// Floor-free part of the term asymptotics:
/// `[P_q(n) / (qn ... (qn+q))] / [(1 - q^-2) / (6 n^3)]`, which tends to 1.
pub fn shape_ratio(q: u64, n: u64) -> Result<Rational> {
    let poly = build_p_poly(q)?;
    shape_ratio_with(&poly, n)
}

pub fn shape_ratio_with(poly: &PPoly, n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    let q = poly.q();
    let algebraic = Rational::new(poly.eval_u64(n), block_denominator(q, n));
    let q2 = BigInt::from(q) * q;
    let n3 = BigInt::from(n).pow(3);
    let model = Rational::new(&q2 - 1u32, q2 * n3 * 6u32);
    Ok(algebraic / model)
}

/// Certified `⌊log_q(qn)⌋ ln q - ln n`, which lies in `(0, ln q]`; the
/// staircase half of the asymptotic statement.
pub fn staircase_gap(q: u64, n: u64, precision_bits: u32) -> Result<Enclosure> {
    check_base(q)?;
    let level = crate::digits::floor_log(n, q)? as i64 + 1;
    let ln_q = ln_int(q, precision_bits)?;
    let ln_n = if n == 1 {
        Enclosure::from_rational(&Rational::zero(), precision_bits)
    } else {
        ln_int(n, precision_bits)?
    };
    Ok(&ln_q.scale(level) - &ln_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Dyadic;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_polynomials() {
        assert_eq!(build_p_poly(2).unwrap().coefficients(), ints(&[1]).as_slice());
        assert_eq!(build_p_poly(3).unwrap().coefficients(), ints(&[6, 12]).as_slice());
        assert_eq!(build_p_poly(4).unwrap().coefficients(), ints(&[36, 160, 160]).as_slice());
        assert_eq!(build_p_poly(1), Err(Error::InvalidBase(1)));
    }

    #[test]
    fn structure_of_coefficients() {
        for q in 2..=40u64 {
            let p = build_p_poly(q).unwrap();
            assert_eq!(p.degree() as u64, q - 2);
            assert!(p.coefficients().iter().all(|c| c > &BigInt::zero()), "q={q}");
            assert_eq!(p.leading(), &PPoly::expected_leading(q), "q={q}");
        }
    }

    #[test]
    fn expansion_matches_direct_form() {
        for q in 2..=12u64 {
            let p = build_p_poly(q).unwrap();
            for x in 1..=100u64 {
                assert_eq!(Rational::from_integer(p.eval_u64(x)), p_poly_direct(q, x).unwrap());
            }
        }
    }

    #[test]
    fn averaging_identity() {
        assert!(averaged_identity_residual(2, 1).unwrap().is_zero());
        assert!(averaged_identity_residual(3, 5).unwrap().is_zero());
        assert!(averaged_identity_residual(12, 100).unwrap().is_zero());
        let bad = build_p_poly(5).unwrap();
        let bad = bad.with_coefficient(1, bad.coefficients()[1].clone() + 1);
        assert!(!averaged_identity_residual_with(&bad, 3).unwrap().is_zero());
    }

    #[test]
    fn symmetric_sum_vanishes() {
        for q in 2..=200 {
            assert_eq!(two_m_minus_q_sum(q), Ok(0));
        }
    }

    #[test]
    fn speedup_values() {
        let two = speedup_factor(2, 64).unwrap();
        assert!((two.midpoint().to_f64() - 0.75 / std::f64::consts::LN_2).abs() < 1e-12);
        let three = speedup_factor(3, 64).unwrap();
        assert!((three.midpoint().to_f64() - (8.0 / 9.0) / 3f64.ln()).abs() < 1e-12);
        let ten = speedup_factor(10, 64).unwrap();
        assert!(ten.hi() < three.lo());
    }

    #[test]
    fn shape_ratio_values() {
        assert_eq!(shape_ratio(2, 1).unwrap(), Rational::new(1, 3));
        for q in [2u64, 3, 10] {
            let r = shape_ratio(q, 1000).unwrap();
            assert!((r - Rational::one()).abs() <= Rational::new(1, 100), "q={q}");
        }
    }

    #[test]
    fn staircase_gap_is_within_one_log() {
        for q in [2u64, 3, 7, 10] {
            let ln_q = ln_int(q, 64).unwrap();
            for n in [1u64, 2, 9, 10, 11, 99, 100, 1000, 1024] {
                let gap = staircase_gap(q, n, 64).unwrap();
                assert!(gap.lo() > &Dyadic::zero(), "q={q} n={n}");
                assert!((&gap - &ln_q).lo().signum() <= 0, "q={q} n={n}");
            }
        }
    }
}
