//! Catalog of the series for γ and ln(4/π): term generators, exact partial
//! sums, certified tail bounds and target-precision evaluation.
//!
//! Index conventions: `Vacca3` and `Rational5` start at n = 2, everything
//! else at n = 1. A partial sum "with N terms" covers the first N indices from
//! the start. Leading constants (1/2 for `Addison7` and `Theorem2_9`, 1 for
//! `GroupedLast18`) belong to the partial sum, never to a term.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::acceleration::{block_denominator, build_p_poly, PPoly};
use crate::digits::{delta_unchecked, epsilon_unchecked, floor_log_unchecked};
pub use crate::digits::Sign;
use crate::numerics::{a_term, rounded_sum_enclosure, Enclosure, Rational};
use crate::{Error, Result};

/// Default cap on terms per evaluation.
pub const DEFAULT_TERM_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `Σ (±1)^(n-1) (1/n - ln((n+1)/n))`
    #[serde(rename = "base4")]
    Base4,
    /// `Σ_{n≥2} (-1)^n ⌊log₂ n⌋ / n`
    #[serde(rename = "vacca")]
    Vacca3,
    /// `Σ_{n≥2} (-1)^n Δ±(⌊n/2⌋) / n`
    #[serde(rename = "rational5")]
    Rational5,
    /// `Σ Δ±(n) / (2n(2n+1))`
    #[serde(rename = "paired6")]
    Paired6,
    /// `1/2 + Σ ⌊log₂ 2n⌋ / (2n(2n+1)(2n+2))`
    #[serde(rename = "addison")]
    Addison7,
    /// `1/2 + Σ ⌊log_q qn⌋ P_q(n) / (qn(qn+1)...(qn+q))`
    #[serde(rename = "theorem2")]
    Theorem2_9,
    /// `Σ ε(n) ⌊log_q n⌋ / n`
    #[serde(rename = "carlitz")]
    Carlitz10,
    /// Carlitz terms grouped in q-tuples with positive first member.
    #[serde(rename = "grouped17")]
    GroupedFirst17,
    /// `1 +` Carlitz terms grouped in q-tuples with positive last member.
    #[serde(rename = "grouped18")]
    GroupedLast18,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Base4,
        Family::Vacca3,
        Family::Rational5,
        Family::Paired6,
        Family::Addison7,
        Family::Theorem2_9,
        Family::Carlitz10,
        Family::GroupedFirst17,
        Family::GroupedLast18,
    ];

    /// Families with an ln(4/π) analog.
    pub fn has_minus(self) -> bool {
        matches!(self, Family::Base4 | Family::Rational5 | Family::Paired6)
    }

    pub fn uses_q(self) -> bool {
        matches!(
            self,
            Family::Theorem2_9 | Family::Carlitz10 | Family::GroupedFirst17 | Family::GroupedLast18
        )
    }

    pub fn is_rational(self) -> bool {
        self != Family::Base4
    }

    pub fn start_index(self) -> u64 {
        match self {
            Family::Vacca3 | Family::Rational5 => 2,
            _ => 1,
        }
    }

    /// Command-line method name.
    pub fn name(self) -> &'static str {
        match self {
            Family::Base4 => "base4",
            Family::Vacca3 => "vacca",
            Family::Rational5 => "rational5",
            Family::Paired6 => "paired6",
            Family::Addison7 => "addison",
            Family::Theorem2_9 => "theorem2",
            Family::Carlitz10 => "carlitz",
            Family::GroupedFirst17 => "grouped17",
            Family::GroupedLast18 => "grouped18",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidSeries(format!("unknown method `{s}`")))
    }
}

/// The two constants the catalog converges to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constant {
    Gamma,
    Ln4pi,
}

impl Constant {
    pub fn sign(self) -> Sign {
        match self {
            Constant::Gamma => Sign::Plus,
            Constant::Ln4pi => Sign::Minus,
        }
    }
}

/// One series of the catalog, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeriesId {
    family: Family,
    sign: Sign,
    q: u64,
}

impl SeriesId {
    pub fn new(family: Family, sign: Sign, q: u64) -> Result<Self> {
        if sign == Sign::Minus && !family.has_minus() {
            return Err(Error::InvalidSeries(format!("{family} has no ln(4/pi) analog")));
        }
        if family.uses_q() {
            if q < 2 {
                return Err(Error::InvalidBase(q));
            }
        } else if q != 2 {
            return Err(Error::InvalidSeries(format!("{family} takes no base parameter")));
        }
        Ok(SeriesId { family, sign, q })
    }

    /// γ series of a family without a base parameter (`q = 2`).
    pub fn gamma(family: Family) -> Self {
        SeriesId::new(family, Sign::Plus, 2).expect("every family has a q = 2 γ form")
    }

    pub fn signed(family: Family, sign: Sign) -> Result<Self> {
        SeriesId::new(family, sign, 2)
    }

    pub fn with_base(family: Family, q: u64) -> Result<Self> {
        SeriesId::new(family, Sign::Plus, q)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn constant(&self) -> Constant {
        match self.sign {
            Sign::Plus => Constant::Gamma,
            Sign::Minus => Constant::Ln4pi,
        }
    }
}

impl fmt::Display for SeriesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if self.family.has_minus() {
            write!(f, "{}", if self.sign == Sign::Plus { "+" } else { "-" })?;
        }
        if self.family.uses_q() {
            write!(f, "[q={}]", self.q)?;
        }
        Ok(())
    }
}

/// Partial sums are exact for rational families and enclosed for the
/// logarithmic base series (or when a large rational sum is only rounded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Partial {
    Exact(Rational),
    Enclosed(Enclosure),
}

impl Partial {
    pub fn to_enclosure(&self, precision_bits: u32) -> Enclosure {
        match self {
            Partial::Exact(r) => Enclosure::from_rational(r, precision_bits),
            Partial::Enclosed(e) => e.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Partial::Exact(r) => Some(r),
            Partial::Enclosed(_) => None,
        }
    }

    /// Width of the partial itself (zero when exact).
    pub fn width(&self) -> Rational {
        match self {
            Partial::Exact(_) => Rational::zero(),
            Partial::Enclosed(e) => e.width().to_rational(),
        }
    }
}

/// Which side of the partial sum the omitted remainder lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemainderSign {
    NonNegative,
    NonPositive,
    Either,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub series: SeriesId,
    pub terms_used: u64,
    pub partial: Partial,
    /// Certified bound on `|limit - partial|`.
    pub tail: Rational,
    /// Partial widened by the tail on the side(s) the remainder can lie on.
    pub value: Enclosure,
    pub elapsed: Duration,
}

impl EvalReport {
    /// `tail + width(partial)`: bound on the distance from any point of the
    /// partial to the limit.
    pub fn certified_error(&self) -> Rational {
        &self.tail + &self.partial.width()
    }
}

/// Stateful term source; caches `P_q` for the accelerated family.
#[derive(Debug, Clone)]
pub struct TermGenerator {
    id: SeriesId,
    poly: Option<PPoly>,
}

impl TermGenerator {
    pub fn new(id: SeriesId) -> Result<Self> {
        if !id.family.is_rational() {
            return Err(Error::NotRational(id.to_string()));
        }
        let poly = match id.family {
            Family::Theorem2_9 => Some(build_p_poly(id.q)?),
            _ => None,
        };
        Ok(TermGenerator { id, poly })
    }

    pub fn series(&self) -> SeriesId {
        self.id
    }

    /// Exact term at index `n`.
    pub fn term(&self, n: u64) -> Result<Rational> {
        let start = self.id.family.start_index();
        if n < start {
            return Err(Error::IndexBelowStart {
                series: self.id.to_string(),
                index: n,
                start,
            });
        }
        Ok(self.term_unchecked(n))
    }

    fn term_unchecked(&self, n: u64) -> Rational {
        let q = self.id.q;
        let alternating = |n: u64| if n.is_multiple_of(2) { 1i64 } else { -1 };
        match self.id.family {
            Family::Base4 => unreachable!("rejected in TermGenerator::new"),
            Family::Vacca3 => {
                Rational::new(alternating(n) * i64::from(floor_log_unchecked(n, 2)), n)
            }
            Family::Rational5 => {
                Rational::new(alternating(n) * delta_unchecked(n / 2, self.id.sign), n)
            }
            Family::Paired6 => Rational::new(
                delta_unchecked(n, self.id.sign),
                BigInt::from(2 * n) * (2 * n + 1),
            ),
            Family::Addison7 => {
                let level = i64::from(floor_log_unchecked(2 * n, 2));
                Rational::new(level, BigInt::from(2 * n) * (2 * n + 1) * (2 * n + 2))
            }
            Family::Theorem2_9 => {
                let level = i64::from(floor_log_unchecked(n, q)) + 1;
                let poly = self.poly.as_ref().expect("built for Theorem2_9");
                Rational::new(poly.eval_u64(n) * level, block_denominator(q, n))
            }
            Family::Carlitz10 => {
                Rational::new(epsilon_unchecked(n, q) * i64::from(floor_log_unchecked(n, q)), n)
            }
            Family::GroupedFirst17 => {
                // (q-1)/(qn) - Σ_{m=1}^{q-1} 1/(qn+m) over D = qn (qn+1)...(qn+q-1)
                let qn = BigInt::from(q) * n;
                let factors: Vec<BigInt> = (0..q).map(|i| &qn + i).collect();
                let den: BigInt = factors.iter().product();
                let mut num = &den / &factors[0] * (q - 1);
                for f in &factors[1..] {
                    num -= &den / f;
                }
                let level = i64::from(floor_log_unchecked(n, q)) + 1;
                Rational::new(num * level, den)
            }
            Family::GroupedLast18 => {
                // -Σ_{m=1}^{q-1} 1/(qn+m) + (q-1)/(qn+q) over D = (qn+1)...(qn+q)
                let qn = BigInt::from(q) * n;
                let factors: Vec<BigInt> = (1..=q).map(|i| &qn + i).collect();
                let den: BigInt = factors.iter().product();
                let (last, rest) = factors.split_last().expect("q >= 2");
                let mut num = &den / last * (q - 1);
                for f in rest {
                    num -= &den / f;
                }
                let level = i64::from(floor_log_unchecked(n, q)) + 1;
                Rational::new(num * level, den)
            }
        }
    }

    /// Terms for indices `start..start+count`.
    pub fn terms(&self, count: u64) -> impl Iterator<Item = Rational> + '_ {
        let start = self.id.family.start_index();
        (start..start + count).map(move |n| self.term_unchecked(n))
    }
}

/// Exact term of a rational family at index `n`.
pub fn rational_term(series: SeriesId, n: u64) -> Result<Rational> {
    TermGenerator::new(series)?.term(n)
}

/// `(±1)^(n-1) A_n`, enclosed.
pub fn base_term(sign: Sign, n: u64, precision_bits: u32) -> Result<Enclosure> {
    let a = a_term(n, precision_bits)?;
    Ok(a.value.scale(sign.alternation(n)))
}

/// Additive constant owned by the partial sum.
pub fn constant_offset(series: SeriesId) -> Rational {
    match series.family {
        Family::Addison7 | Family::Theorem2_9 => Rational::new(1, 2),
        Family::GroupedLast18 => Rational::one(),
        _ => Rational::zero(),
    }
}

/// Partial sum with `terms` terms (plus the family's constant).
pub fn partial_sum(series: SeriesId, terms: u64, precision_bits: u32) -> Result<Partial> {
    if series.family == Family::Base4 {
        return Ok(Partial::Enclosed(base_partial(series.sign, terms, precision_bits)?));
    }
    let generator = TermGenerator::new(series)?;
    let mut sum = constant_offset(series);
    for t in generator.terms(terms) {
        sum += t;
    }
    Ok(Partial::Exact(sum))
}

fn base_partial(sign: Sign, terms: u64, precision_bits: u32) -> Result<Enclosure> {
    let parts = (1..=terms)
        .map(|n| base_term(sign, n, precision_bits + 8))
        .collect::<Result<Vec<_>>>()?;
    Ok(Enclosure::sum(&parts, precision_bits))
}

/// Enclosure of the exact partial sum, computed by rounding each exact term
/// outward instead of reducing the (very large) exact fraction.
pub fn partial_enclosure(series: SeriesId, terms: u64, precision_bits: u32) -> Result<Enclosure> {
    if series.family == Family::Base4 {
        return base_partial(series.sign, terms, precision_bits);
    }
    let generator = TermGenerator::new(series)?;
    let offset = constant_offset(series);
    let terms_iter = std::iter::once(offset).chain(generator.terms(terms));
    Ok(rounded_sum_enclosure(terms_iter, terms as usize + 1, precision_bits))
}

/// Whether a certified tail bound exists after `terms` terms.
pub fn is_aligned_cut(series: SeriesId, terms: u64) -> bool {
    match series.family {
        Family::Vacca3 | Family::Rational5 => terms.is_multiple_of(2),
        Family::Carlitz10 => (terms + 1).is_multiple_of(series.q),
        _ => true,
    }
}

/// Term count of the `cut`-th aligned cut point (cut 0 is the first).
fn cut_terms(series: SeriesId, cut: u64) -> u64 {
    match series.family {
        Family::Vacca3 | Family::Rational5 => 2 * cut,
        Family::Carlitz10 => series.q * cut + series.q - 1,
        _ => cut,
    }
}

/// Smallest aligned cut with at least `terms` terms.
pub fn align_up(series: SeriesId, terms: u64) -> u64 {
    let mut cut = match series.family {
        Family::Vacca3 | Family::Rational5 => terms.div_ceil(2),
        Family::Carlitz10 => (terms + 1).div_ceil(series.q).saturating_sub(1),
        _ => terms,
    };
    while cut_terms(series, cut) < terms {
        cut += 1;
    }
    cut_terms(series, cut)
}

/// Side of the partial sum on which the true value lies.
pub fn remainder_sign(series: SeriesId, terms: u64) -> RemainderSign {
    use RemainderSign::*;
    match (series.family, series.sign) {
        // The next term (index terms+1) has sign (-1)^terms and dominates the rest.
        (Family::Base4, Sign::Minus) if terms.is_multiple_of(2) => NonNegative,
        (Family::Base4, Sign::Minus) => NonPositive,
        (Family::Rational5 | Family::Paired6, Sign::Minus) => Either,
        (Family::GroupedLast18, _) => NonPositive,
        _ => NonNegative,
    }
}

/// Upper bound on `Σ_{n>N} (⌊log_q n⌋ + 1) / n^p` for `p >= 2`.
///
/// Each `n^-p` is below `∫_{n-1/2}^{n+1/2} x^-p dx`, so a run of indices
/// `[a, b]` sums to less than `y(a) - y(b+1)` with
/// `y(a) = (a - 1/2)^(1-p) / (p-1)`. Summing over the q-adic blocks
/// `[q^j, q^(j+1))`, where the weight is `j + 1`, and applying Abel summation
/// gives `(j0+1) y(N+1) + y(q^J) + Σ_{j>J} y(q^j)` with `j0 = ⌊log_q(N+1)⌋`,
/// `J = j0 + 1`; the last sum is at most `y(q^(J+1)) / (1 - q^(1-p))`.
/// The bound is nonincreasing in N.
pub fn weighted_power_tail(q: u64, after: u64, p: u32) -> Rational {
    assert!(q >= 2 && p >= 2);
    let y = |a: &BigInt| -> Rational {
        // (a - 1/2)^(1-p)/(p-1) = 2^(p-1) / ((p-1) (2a-1)^(p-1))
        let base: BigInt = a * 2u32 - 1u32;
        Rational::new(BigInt::from(1u64 << (p - 1)), base.pow(p - 1) * (p - 1))
    };
    let first = BigInt::from(after) + 1u32;
    let j0 = crate::digits::floor_log_big(first.magnitude(), q).expect("positive index");
    let qb = BigInt::from(q);
    let q_j = qb.pow(j0 as u32 + 1);
    let q_j1 = &q_j * &qb;
    let geometric = Rational::one() - Rational::new(1, qb.pow(p - 1));
    y(&first).mul_int(j0 as i64 + 1) + y(&q_j) + y(&q_j1) / geometric
}

/// Certified bound on `|limit - partial_sum(series, terms)|`.
pub fn tail_bound(series: SeriesId, terms: u64) -> Result<Rational> {
    if !is_aligned_cut(series, terms) {
        return Err(Error::UnalignedCut {
            series: series.to_string(),
            terms,
        });
    }
    let q = series.q;
    let n1 = BigInt::from(terms) + 1u32;
    Ok(match series.family {
        // Σ_{n>N} A_n < Σ (1/n - 1/(n+1)) = 1/(N+1).
        Family::Base4 if series.sign == Sign::Plus => Rational::new(1, n1),
        // Alternating with decreasing A_n: |tail| <= A_{N+1} < 1/((N+1)(N+2)).
        Family::Base4 => Rational::new(1, &n1 * (&n1 + 1u32)),
        // |Δ±(n)| <= ⌊log₂ n⌋ + 1 and 1/(2n(2n+1)) < 1/(4n²).
        Family::Paired6 => weighted_power_tail(2, terms, 2) * Rational::new(1, 4),
        // Pair-aligned cuts leave exactly the paired tail.
        Family::Vacca3 | Family::Rational5 => weighted_power_tail(2, terms / 2, 2) * Rational::new(1, 4),
        Family::Addison7 | Family::Theorem2_9 => accelerated_tail(q, terms),
        // Groups are (L+1) Σ_m m/(qn(qn+m)) <= (L+1)(q-1)/(2q n²); likewise for (18).
        Family::GroupedFirst17 | Family::GroupedLast18 => {
            weighted_power_tail(q, terms, 2) * Rational::new(q - 1, 2 * q)
        }
        Family::Carlitz10 => {
            let groups = (terms + 1) / q - 1;
            weighted_power_tail(q, groups, 2) * Rational::new(q - 1, 2 * q)
        }
    })
}

/// Tail of the accelerated series.
///
/// `P_q(n) <= (qn+q)^(q-2) q(q²-1)/6` and `Π_{i=0}^{q}(qn+i) >= (qn)³ (qn+q)
/// (qn+3)^(q-3)`, so each term is at most
/// `(L+1) (q²-1)/(6q²) ((qn+q)/(qn+3))^(q-3) / n³`, and the bracket is
/// largest at the first omitted index.
fn accelerated_tail(q: u64, terms: u64) -> Rational {
    let q_big = BigInt::from(q);
    let q2 = &q_big * &q_big;
    let mut constant = Rational::new(&q2 - 1u32, q2 * 6u32);
    if q > 3 {
        let qn = &q_big * (terms + 1);
        let ratio = Rational::new(&qn + q, &qn + 3u32);
        let mut factor = Rational::one();
        for _ in 0..q - 3 {
            factor = &factor * &ratio;
        }
        constant = constant * factor;
    }
    weighted_power_tail(q, terms, 3) * constant
}

/// Widens a partial-sum enclosure by the tail on the side the remainder lies.
fn certify_value(series: SeriesId, terms: u64, partial: &Enclosure, tail: &Rational) -> Enclosure {
    let zero = Rational::zero();
    match remainder_sign(series, terms) {
        RemainderSign::NonNegative => partial.widen(&zero, tail),
        RemainderSign::NonPositive => partial.widen(tail, &zero),
        RemainderSign::Either => partial.widen(tail, tail),
    }
}

/// Exact partial sum at a fixed term count, with its certified enclosure.
pub fn certify(series: SeriesId, terms: u64, precision_bits: u32) -> Result<EvalReport> {
    let started = Instant::now();
    let tail = tail_bound(series, terms)?;
    let partial = partial_sum(series, terms, precision_bits)?;
    let value = certify_value(series, terms, &partial.to_enclosure(precision_bits), &tail);
    Ok(EvalReport {
        series,
        terms_used: terms,
        partial,
        tail,
        value,
        elapsed: started.elapsed(),
    })
}

/// Like [`certify`] but encloses the partial sum instead of reducing it;
/// fast for large term counts.
pub fn certify_enclosed(series: SeriesId, terms: u64, precision_bits: u32) -> Result<EvalReport> {
    let started = Instant::now();
    let tail = tail_bound(series, terms)?;
    let partial = partial_enclosure(series, terms, precision_bits)?;
    let value = certify_value(series, terms, &partial, &tail);
    Ok(EvalReport {
        series,
        terms_used: terms,
        partial: Partial::Enclosed(partial),
        tail,
        value,
        elapsed: started.elapsed(),
    })
}

/// Evaluates to within `target_error` using the default term budget.
pub fn evaluate(series: SeriesId, target_error: &Rational, precision_bits: u32) -> Result<EvalReport> {
    evaluate_with_budget(series, target_error, precision_bits, DEFAULT_TERM_BUDGET)
}

/// Smallest aligned term count whose tail bound is at most `goal`, or `None`
/// when even `max_terms` does not reach it.
fn terms_for_tail(series: SeriesId, goal: &Rational, max_terms: u64) -> Result<Option<u64>> {
    let tail_at_cut = |cut: u64| tail_bound(series, cut_terms(series, cut));
    let within = |cut: u64| cut_terms(series, cut) <= max_terms;
    if !within(0) {
        return Ok(None);
    }
    if &tail_at_cut(0)? <= goal {
        return Ok(Some(cut_terms(series, 0)));
    }
    // Exponential search for a passing cut, then bisect (tails are monotone).
    let mut bad = 0u64;
    let mut good = 1u64;
    loop {
        if !within(good) {
            let mut cap = good;
            while !within(cap) {
                cap = bad + (cap - bad) / 2;
                if cap == bad {
                    return Ok(None);
                }
            }
            if &tail_at_cut(cap)? > goal {
                // Largest in-budget cut still fails.
                let mut hi = good;
                let mut lo = cap;
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if within(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if &tail_at_cut(lo)? > goal {
                    return Ok(None);
                }
                good = lo;
            } else {
                good = cap;
            }
            break;
        }
        if &tail_at_cut(good)? <= goal {
            break;
        }
        bad = good;
        good *= 2;
    }
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if &tail_at_cut(mid)? <= goal {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Some(cut_terms(series, good)))
}

/// Largest aligned term count not exceeding `max_terms`.
fn last_cut_within(series: SeriesId, max_terms: u64) -> Option<u64> {
    let aligned = align_up(series, max_terms);
    if aligned == max_terms {
        return Some(aligned);
    }
    let step = match series.family {
        Family::Vacca3 | Family::Rational5 => 2,
        Family::Carlitz10 => series.q,
        _ => 1,
    };
    aligned.checked_sub(step)
}

/// Evaluates until `tail + width(partial) <= target_error`.
///
/// Fails with budget-exhausted when more than `max_terms` terms would be
/// needed, and with precision-unreachable when the rounding width at
/// `precision_bits` alone exceeds the target.
pub fn evaluate_with_budget(
    series: SeriesId,
    target_error: &Rational,
    precision_bits: u32,
    max_terms: u64,
) -> Result<EvalReport> {
    if target_error.signum() <= 0 {
        return Err(Error::PrecisionUnreachable("target error must be positive".into()));
    }
    // Every constant here lies in (1/8, 1), so a p-bit enclosure of a
    // non-dyadic value is at least 2^-(p+3) wide.
    if target_error < &Rational::pow2(-i64::from(precision_bits) - 3) {
        return Err(Error::PrecisionUnreachable(format!(
            "target {:.3e} is below the resolution of {precision_bits}-bit arithmetic",
            target_error.to_f64()
        )));
    }
    let started = Instant::now();
    let budget_error = || -> Error {
        let best_terms = last_cut_within(series, max_terms);
        let best_error = best_terms
            .and_then(|t| tail_bound(series, t).ok())
            .unwrap_or_else(Rational::one);
        Error::BudgetExhausted {
            terms: best_terms.unwrap_or(0),
            best_error,
        }
    };
    // Leave a small share of the target for rounding width.
    let mut goal = target_error * &Rational::new(15, 16);
    for _ in 0..4 {
        let Some(terms) = terms_for_tail(series, &goal, max_terms)? else {
            return Err(budget_error());
        };
        let mut report = certify_enclosed(series, terms, precision_bits)?;
        let width = report.partial.width();
        if &width >= target_error {
            return Err(Error::PrecisionUnreachable(format!(
                "rounding width {:.3e} at {precision_bits} bits exceeds target {:.3e}",
                width.to_f64(),
                target_error.to_f64()
            )));
        }
        if &report.certified_error() <= target_error {
            report.elapsed = started.elapsed();
            return Ok(report);
        }
        goal = target_error - &width;
    }
    Err(Error::PrecisionUnreachable(format!(
        "could not balance tail and rounding width for target {:.3e}",
        target_error.to_f64()
    )))
}
