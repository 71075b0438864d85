//! Finite-range checks of the lemmas and identities behind the catalog.
//!
//! Each suite walks a configured range and reports the number of cases, the
//! largest residual it saw and any failing inputs. Witnesses can be rechecked
//! one at a time with [`Witness::recheck`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::acceleration::{
    averaged_identity_residual_with, build_p_poly, p_poly_direct, shape_ratio_with, speedup_factor,
    staircase_gap, PPoly,
};
use crate::digits::{delta_unchecked, Sign};
use crate::numerics::{a_term, exact_sum_enclosure, ln_int, Dyadic, Enclosure, Rational};
use crate::series::{self, Family, SeriesId, TermGenerator};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma1,
    Lemma2,
    Lemma3,
    Remainder,
    Theorem1Limits,
    Pairing,
    VaccaIdentity,
    Grouping,
    Q2Addison,
    AveragedIdentity,
    ShapeRatio,
    Speedup,
    PPoly,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Lemma1,
        Suite::Lemma2,
        Suite::Lemma3,
        Suite::Remainder,
        Suite::Theorem1Limits,
        Suite::Pairing,
        Suite::VaccaIdentity,
        Suite::Grouping,
        Suite::Q2Addison,
        Suite::AveragedIdentity,
        Suite::ShapeRatio,
        Suite::Speedup,
        Suite::PPoly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Lemma3 => "lemma3",
            Suite::Remainder => "remainder",
            Suite::Theorem1Limits => "theorem1-limits",
            Suite::Pairing => "pairing",
            Suite::VaccaIdentity => "vacca-identity",
            Suite::Grouping => "grouping",
            Suite::Q2Addison => "q2-addison",
            Suite::AveragedIdentity => "averaged-identity",
            Suite::ShapeRatio => "shape-ratio",
            Suite::Speedup => "speedup",
            Suite::PPoly => "p-poly",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

/// Largest residual seen: an exact rational for exact suites, an enclosure
/// width for certified ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Residual {
    Exact(Rational),
    Width(Dyadic),
}

impl Residual {
    fn merge(self, other: Residual) -> Residual {
        match (self, other) {
            (Residual::Exact(a), Residual::Exact(b)) => Residual::Exact(a.max(b)),
            (Residual::Width(a), Residual::Width(b)) => Residual::Width(a.max(b)),
            (a, _) => a,
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(r) => write!(f, "{r}"),
            Residual::Width(w) => write!(f, "width {:.3e}", w.to_f64()),
        }
    }
}

impl Serialize for Residual {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Inputs of a single case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Case {
    Index { n: u64 },
    Signed { n: u64, sign: Sign },
    Base { q: u64, n: u64 },
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Index { n } => write!(f, "n={n}"),
            Case::Signed { n, sign } => write!(f, "n={n} sign={sign}"),
            Case::Base { q, n } => write!(f, "q={q} n={n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub suite: Suite,
    pub case: Case,
    pub detail: String,
}

impl Witness {
    /// Reruns just this case; `Some(detail)` if it still fails.
    pub fn recheck(&self, config: &VerifyConfig) -> Option<String> {
        check_case(self.suite, self.case, config).err()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub suite: Suite,
    pub cases_checked: u64,
    pub max_residual: Residual,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
}

/// A deliberate change to one `P_q` coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fault {
    pub q: u64,
    pub index: usize,
    pub delta: i64,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub precision_bits: u32,
    pub lemma1_n_max: u64,
    pub lemma2_n_max: u64,
    pub lemma3_k_max: u32,
    pub remainder_k_max: u32,
    /// Term count at which Paired6 and Base4 enclosures are compared.
    pub theorem1_terms: u64,
    pub pairing_n_max: u64,
    pub vacca_n_max: u64,
    pub grouping_qs: Vec<u64>,
    pub grouping_n_max: u64,
    pub addison_n_max: u64,
    pub averaged_qs: Vec<u64>,
    pub averaged_n_max: u64,
    pub shape_qs: Vec<u64>,
    pub shape_n: u64,
    pub speedup_q_max: u64,
    pub p_poly_q_max: u64,
    pub p_poly_points: u64,
    pub fault: Option<Fault>,
    /// Maximum witnesses kept per suite.
    pub max_witnesses: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            precision_bits: 96,
            lemma1_n_max: 1000,
            lemma2_n_max: 1 << 22,
            lemma3_k_max: 18,
            remainder_k_max: 18,
            theorem1_terms: 10_000,
            pairing_n_max: 10_000,
            vacca_n_max: 100_000,
            grouping_qs: vec![2, 3, 5, 10],
            grouping_n_max: 10_000,
            addison_n_max: 100_000,
            averaged_qs: (2..=12).collect(),
            averaged_n_max: 1000,
            shape_qs: vec![2, 3, 10],
            shape_n: 1000,
            speedup_q_max: 12,
            p_poly_q_max: 12,
            p_poly_points: 100,
            fault: None,
            max_witnesses: 10,
        }
    }
}

impl VerifyConfig {
    /// Small ranges; a few seconds in total.
    pub fn quick() -> Self {
        VerifyConfig {
            lemma1_n_max: 200,
            lemma2_n_max: 1 << 16,
            lemma3_k_max: 10,
            remainder_k_max: 10,
            theorem1_terms: 1000,
            pairing_n_max: 500,
            vacca_n_max: 5000,
            grouping_n_max: 300,
            addison_n_max: 5000,
            averaged_n_max: 100,
            ..VerifyConfig::default()
        }
    }

    /// Every range empty.
    pub fn empty() -> Self {
        VerifyConfig {
            lemma1_n_max: 0,
            lemma2_n_max: 0,
            lemma3_k_max: 0,
            remainder_k_max: 0,
            theorem1_terms: 0,
            pairing_n_max: 0,
            vacca_n_max: 0,
            grouping_qs: vec![],
            grouping_n_max: 0,
            addison_n_max: 0,
            averaged_qs: vec![],
            averaged_n_max: 0,
            shape_qs: vec![],
            shape_n: 0,
            speedup_q_max: 0,
            p_poly_q_max: 0,
            p_poly_points: 0,
            ..VerifyConfig::default()
        }
    }

    /// `P_q` as the suites see it, with the fault applied.
    pub fn p_poly(&self, q: u64) -> Result<PPoly> {
        let poly = build_p_poly(q)?;
        Ok(match self.fault {
            Some(f) if f.q == q && f.index < poly.coefficients().len() => {
                let c = poly.coefficients()[f.index].clone() + f.delta;
                poly.with_coefficient(f.index, c)
            }
            _ => poly,
        })
    }
}

/// Collects outcomes of one suite.
struct Tally {
    suite: Suite,
    cases: u64,
    max: Residual,
    witnesses: Vec<Witness>,
    failures: u64,
    keep: usize,
}

impl Tally {
    fn exact(suite: Suite, config: &VerifyConfig) -> Self {
        Tally::with(suite, Residual::Exact(Rational::zero()), config)
    }

    fn width(suite: Suite, config: &VerifyConfig) -> Self {
        Tally::with(suite, Residual::Width(Dyadic::zero()), config)
    }

    fn with(suite: Suite, max: Residual, config: &VerifyConfig) -> Self {
        Tally {
            suite,
            cases: 0,
            max,
            witnesses: Vec::new(),
            failures: 0,
            keep: config.max_witnesses.max(1),
        }
    }

    fn record(&mut self, case: Case, residual: Residual, outcome: std::result::Result<(), String>) {
        self.cases += 1;
        self.max = std::mem::replace(&mut self.max, Residual::Exact(Rational::zero())).merge(residual);
        if let Err(detail) = outcome {
            self.failures += 1;
            if self.witnesses.len() < self.keep {
                self.witnesses.push(Witness {
                    suite: self.suite,
                    case,
                    detail,
                });
            }
        }
    }

    fn finish(self) -> LemmaReport {
        LemmaReport {
            suite: self.suite,
            cases_checked: self.cases,
            max_residual: self.max,
            passed: self.failures == 0,
            witnesses: self.witnesses,
        }
    }
}

fn exact_eq(lhs: &Rational, rhs: &Rational) -> (Residual, std::result::Result<(), String>) {
    let diff = (lhs - rhs).abs();
    let outcome = if diff.is_zero() {
        Ok(())
    } else {
        Err(format!("{lhs} != {rhs}"))
    };
    (Residual::Exact(diff), outcome)
}

// ---- Lemma 1 --------------------------------------------------------------

fn lemma1_case(n: u64, p: u32) -> (Residual, std::result::Result<(), String>) {
    let a = |m: u64| a_term(m, p).expect("n >= 1").value;
    let an = a(n);
    let pair = Enclosure::from_rational(&Rational::new(1, BigInt::from(2 * n) * (2 * n + 1)), p);
    let rhs = Enclosure::sum([&pair, &a(2 * n), &a(2 * n + 1)], p);
    let residual = &an - &rhs;
    let width = residual.width();
    let tolerance = Dyadic::new(1, 4 - i64::from(p));
    let telescoping = Rational::new(1, BigInt::from(n) * (n + 1));
    let outcome = if !residual.contains_zero() {
        Err(format!("recursion residual {residual} excludes 0"))
    } else if width > tolerance {
        Err(format!("recursion residual width {} above 2^(4-p)", width.to_f64()))
    } else if an.lo().signum() <= 0 {
        Err(format!("A_n lower end {} not positive", an.lo()))
    } else if an.hi().to_rational() >= telescoping {
        Err(format!("A_n upper end {} not below {telescoping}", an.hi()))
    } else {
        Ok(())
    };
    (Residual::Width(width), outcome)
}

/// `A_n = 1/(2n(2n+1)) + A_2n + A_2n+1` and `0 < A_n < 1/n - 1/(n+1)`.
pub fn check_lemma1(n_max: u64, precision_bits: u32) -> LemmaReport {
    let config = VerifyConfig {
        precision_bits,
        ..VerifyConfig::default()
    };
    let mut tally = Tally::width(Suite::Lemma1, &config);
    for n in 1..=n_max {
        let (r, o) = lemma1_case(n, precision_bits);
        tally.record(Case::Index { n }, r, o);
    }
    tally.finish()
}

// ---- Lemma 2 --------------------------------------------------------------

fn lemma2_case(n: u64, sign: Sign) -> std::result::Result<(), String> {
    let lhs = delta_unchecked(n / 2, sign) + sign.alternation(n);
    let rhs = delta_unchecked(n, sign);
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("delta(n/2) + step = {lhs}, delta(n) = {rhs}"))
    }
}

/// `Δ±(⌊n/2⌋) + (±1)^(n-1) = Δ±(n)` for `2 <= n <= n_max`.
pub fn check_lemma2(n_max: u64) -> LemmaReport {
    let config = VerifyConfig::default();
    let mut tally = Tally::exact(Suite::Lemma2, &config);
    for sign in [Sign::Plus, Sign::Minus] {
        for n in 2..=n_max {
            let outcome = lemma2_case(n, sign);
            let residual = if outcome.is_ok() { Rational::zero() } else { Rational::one() };
            tally.record(Case::Signed { n, sign }, Residual::Exact(residual), outcome);
        }
    }
    tally.finish()
}

// ---- Lemma 3 and the remainder bound ----------------------------------------

/// Certified `A_n` for `1 <= n <= n_max`, shared across block checks.
struct ATable {
    values: Vec<Enclosure>,
}

impl ATable {
    fn new(n_max: u64, p: u32) -> Self {
        let values = (1..=n_max).map(|n| a_term(n, p).expect("n >= 1").value).collect();
        ATable { values }
    }

    fn get(&self, n: u64) -> &Enclosure {
        &self.values[(n - 1) as usize]
    }
}

/// Per-block pieces of Lemma 3 for one sign, block `j` covering
/// `[2^(j-1), 2^j - 1]`.
struct Blocks {
    /// `Σ (±1)^(n-1) A_n` over the block.
    base: Vec<Enclosure>,
    /// `Σ Δ±(n)/(2n(2n+1))`, summed exactly then enclosed.
    paired: Vec<Enclosure>,
    /// `R_j = Σ Δ±(n) A_n`.
    remainder: Vec<Enclosure>,
}

fn block_range(j: u32) -> std::ops::RangeInclusive<u64> {
    (1u64 << (j - 1))..=((1u64 << j) - 1)
}

fn blocks(table: &ATable, sign: Sign, k_max: u32, p: u32) -> Blocks {
    let mut out = Blocks {
        base: Vec::new(),
        paired: Vec::new(),
        remainder: Vec::new(),
    };
    let paired_gen = TermGenerator::new(SeriesId::signed(Family::Paired6, sign).expect("paired6 has both signs"))
        .expect("rational family");
    for j in 1..=k_max {
        let range = block_range(j);
        let base: Vec<Enclosure> = range.clone().map(|n| table.get(n).scale(sign.alternation(n))).collect();
        let remainder: Vec<Enclosure> =
            range.clone().map(|n| table.get(n).scale(delta_unchecked(n, sign))).collect();
        let paired: Vec<Rational> = range.map(|n| paired_gen.term(n).expect("n >= 1")).collect();
        out.base.push(Enclosure::sum(&base, p + 16));
        out.remainder.push(Enclosure::sum(&remainder, p + 16));
        out.paired.push(exact_sum_enclosure(&paired, p + 16));
    }
    out
}

fn lemma3_from_blocks(b: &Blocks, k: u32, p: u32) -> (Residual, std::result::Result<(), String>) {
    let k_idx = k as usize;
    let s = Enclosure::sum(&b.base[..k_idx], p);
    let paired = Enclosure::sum(&b.paired[..k_idx - 1], p);
    let rhs = &paired + &b.remainder[k_idx - 1].with_precision(p);
    let residual = &s - &rhs;
    let width = residual.width();
    let tolerance = Dyadic::new(1, i64::from(k) + 4 - i64::from(p));
    let outcome = if !residual.contains_zero() {
        Err(format!("S - (paired + R) = {residual} excludes 0"))
    } else if width > tolerance {
        Err(format!("residual width {} above 2^(k+4-p)", width.to_f64()))
    } else {
        Ok(())
    };
    (Residual::Width(width), outcome)
}

/// `S_(2^k - 1) = Σ_(n<2^(k-1)) Δ±(n)/(2n(2n+1)) + R_k` within `2^(k+4-p)`.
pub fn check_lemma3(k: u32, sign: Sign, precision_bits: u32) -> LemmaReport {
    let config = VerifyConfig::default();
    let mut tally = Tally::width(Suite::Lemma3, &config);
    if (1..=24).contains(&k) {
        let table = ATable::new((1u64 << k) - 1, precision_bits);
        let b = blocks(&table, sign, k, precision_bits);
        let (r, o) = lemma3_from_blocks(&b, k, precision_bits);
        tally.record(Case::Signed { n: u64::from(k), sign }, r, o);
    }
    tally.finish()
}

/// Strict `|R_k| < k/2^k`, escalating precision while undecided.
fn remainder_case(r: &Enclosure, k: u32, table_bits: u32, recompute: impl Fn(u32) -> Enclosure) -> (Residual, std::result::Result<(), String>) {
    let bound = Rational::new(i64::from(k), BigInt::from(1u64) << k);
    let mut enclosure = r.abs();
    let mut bits = table_bits;
    loop {
        let hi = enclosure.hi().to_rational();
        if hi < bound {
            return (Residual::Width(enclosure.width()), Ok(()));
        }
        if enclosure.lo().to_rational() >= bound || bits >= 4 * table_bits {
            return (
                Residual::Width(enclosure.width()),
                Err(format!("|R_k| upper end {} not below {bound}", enclosure.hi())),
            );
        }
        bits *= 2;
        enclosure = recompute(bits).abs();
    }
}

fn remainder_direct(k: u32, sign: Sign, p: u32) -> Enclosure {
    let parts: Vec<Enclosure> = block_range(k)
        .map(|n| a_term(n, p).expect("n >= 1").value.scale(delta_unchecked(n, sign)))
        .collect();
    Enclosure::sum(&parts, p)
}

pub fn check_remainder_bound(k: u32, sign: Sign, precision_bits: u32) -> LemmaReport {
    let config = VerifyConfig::default();
    let mut tally = Tally::width(Suite::Remainder, &config);
    if (1..=24).contains(&k) {
        let r = remainder_direct(k, sign, precision_bits);
        let (res, o) = remainder_case(&r, k, precision_bits, |bits| remainder_direct(k, sign, bits));
        tally.record(Case::Signed { n: u64::from(k), sign }, res, o);
    }
    tally.finish()
}

fn lemma3_and_remainder(config: &VerifyConfig, want_lemma3: bool, want_remainder: bool) -> Vec<LemmaReport> {
    let p = config.precision_bits;
    let k_lemma = if want_lemma3 { config.lemma3_k_max.min(24) } else { 0 };
    let k_rem = if want_remainder { config.remainder_k_max.min(24) } else { 0 };
    let k_max = k_lemma.max(k_rem);
    let mut lemma3 = Tally::width(Suite::Lemma3, config);
    let mut remainder = Tally::width(Suite::Remainder, config);
    if k_max > 0 {
        let table = ATable::new((1u64 << k_max) - 1, p);
        for sign in [Sign::Plus, Sign::Minus] {
            let b = blocks(&table, sign, k_max, p);
            for k in 1..=k_lemma {
                let (r, o) = lemma3_from_blocks(&b, k, p);
                lemma3.record(Case::Signed { n: u64::from(k), sign }, r, o);
            }
            for k in 1..=k_rem {
                let (r, o) = remainder_case(&b.remainder[k as usize - 1], k, p, |bits| {
                    remainder_direct(k, sign, bits)
                });
                remainder.record(Case::Signed { n: u64::from(k), sign }, r, o);
            }
        }
    }
    let mut out = Vec::new();
    if want_lemma3 {
        out.push(lemma3.finish());
    }
    if want_remainder {
        out.push(remainder.finish());
    }
    out
}

// ---- Theorem 1 limits -------------------------------------------------------

fn theorem1_case(sign: Sign, terms: u64, p: u32) -> (Residual, std::result::Result<(), String>) {
    let run = || -> Result<(Enclosure, Enclosure)> {
        let paired = series::certify_enclosed(SeriesId::signed(Family::Paired6, sign)?, terms, p)?;
        let base = series::certify_enclosed(SeriesId::signed(Family::Base4, sign)?, terms, p)?;
        Ok((paired.value, base.value))
    };
    match run() {
        Ok((paired, base)) => {
            let width = paired.width().max(base.width());
            let outcome = if paired.intersects(&base) {
                Ok(())
            } else {
                Err(format!("paired {paired} and base {base} are disjoint"))
            };
            (Residual::Width(width), outcome)
        }
        Err(e) => (Residual::Width(Dyadic::zero()), Err(e.to_string())),
    }
}

/// Paired-series and base-series enclosures after `terms` terms intersect.
pub fn check_theorem1_limits(sign: Sign, terms: u64, precision_bits: u32) -> LemmaReport {
    let config = VerifyConfig::default();
    let mut tally = Tally::width(Suite::Theorem1Limits, &config);
    if terms >= 1 {
        let (r, o) = theorem1_case(sign, terms, precision_bits);
        tally.record(Case::Signed { n: terms, sign }, r, o);
    }
    tally.finish()
}

// ---- exact identities -------------------------------------------------------

fn gen(family: Family, sign: Sign, q: u64) -> TermGenerator {
    TermGenerator::new(SeriesId::new(family, sign, q).expect("valid series")).expect("rational family")
}

/// Eq. 5 partial sums through `n = 2N+1` against Eq. 6 partial sums through N,
/// for every N up to `n_max`.
fn pairing(config: &VerifyConfig) -> LemmaReport {
    let mut tally = Tally::exact(Suite::Pairing, config);
    if config.pairing_n_max == 0 {
        return tally.finish();
    }
    for sign in [Sign::Plus, Sign::Minus] {
        let five = gen(Family::Rational5, sign, 2);
        let six = gen(Family::Paired6, sign, 2);
        let mut s5 = Rational::zero();
        let mut s6 = Rational::zero();
        for n in 1..=config.pairing_n_max {
            s5 += five.term(2 * n).expect("n >= 2");
            s5 += five.term(2 * n + 1).expect("n >= 2");
            s6 += six.term(n).expect("n >= 1");
            let (r, o) = exact_eq(&s5, &s6);
            tally.record(Case::Signed { n, sign }, r, o);
        }
    }
    tally.finish()
}

fn pairing_case(n: u64, sign: Sign) -> std::result::Result<(), String> {
    let five = series::partial_sum(SeriesId::signed(Family::Rational5, sign).unwrap(), 2 * n, 64);
    let six = series::partial_sum(SeriesId::signed(Family::Paired6, sign).unwrap(), n, 64);
    match (five, six) {
        (Ok(a), Ok(b)) => exact_eq(a.as_exact().unwrap(), b.as_exact().unwrap()).1,
        (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
    }
}

fn termwise(
    suite: Suite,
    config: &VerifyConfig,
    n_start: u64,
    n_max: u64,
    lhs: TermGenerator,
    rhs: TermGenerator,
) -> LemmaReport {
    let mut tally = Tally::exact(suite, config);
    for n in n_start..=n_max {
        let (r, o) = exact_eq(&lhs.term(n).expect("in range"), &rhs.term(n).expect("in range"));
        tally.record(Case::Index { n }, r, o);
    }
    tally.finish()
}

/// Eq. 10 partial sums at `qN + q - 1` terms against Eq. 17 partial sums at N.
fn grouping(config: &VerifyConfig) -> LemmaReport {
    let mut tally = Tally::exact(Suite::Grouping, config);
    for &q in &config.grouping_qs {
        let carlitz = gen(Family::Carlitz10, Sign::Plus, q);
        let grouped = gen(Family::GroupedFirst17, Sign::Plus, q);
        let mut s10 = Rational::zero();
        let mut s17 = Rational::zero();
        for n in 1..q {
            s10 += carlitz.term(n).expect("n >= 1");
        }
        let (r, o) = exact_eq(&s10, &s17);
        tally.record(Case::Base { q, n: 0 }, r, o);
        for big_n in 1..=config.grouping_n_max {
            for n in q * big_n..q * big_n + q {
                s10 += carlitz.term(n).expect("n >= 1");
            }
            s17 += grouped.term(big_n).expect("n >= 1");
            let (r, o) = exact_eq(&s10, &s17);
            tally.record(Case::Base { q, n: big_n }, r, o);
        }
    }
    tally.finish()
}

fn grouping_case(q: u64, n: u64) -> std::result::Result<(), String> {
    let run = || -> Result<(Rational, Rational)> {
        let c = series::partial_sum(SeriesId::with_base(Family::Carlitz10, q)?, q * n + q - 1, 64)?;
        let g = series::partial_sum(SeriesId::with_base(Family::GroupedFirst17, q)?, n, 64)?;
        Ok((c.as_exact().unwrap().clone(), g.as_exact().unwrap().clone()))
    };
    run().map_err(|e| e.to_string()).and_then(|(a, b)| exact_eq(&a, &b).1)
}

fn averaged_identity(config: &VerifyConfig) -> LemmaReport {
    let mut tally = Tally::exact(Suite::AveragedIdentity, config);
    for &q in &config.averaged_qs {
        let Ok(poly) = config.p_poly(q) else {
            tally.record(Case::Base { q, n: 0 }, Residual::Exact(Rational::zero()), Err("invalid base".into()));
            continue;
        };
        for n in 1..=config.averaged_n_max {
            let (r, o) = averaged_case(&poly, n);
            tally.record(Case::Base { q, n }, r, o);
        }
    }
    tally.finish()
}

fn averaged_case(poly: &PPoly, n: u64) -> (Residual, std::result::Result<(), String>) {
    let residual = averaged_identity_residual_with(poly, n).expect("n >= 1");
    let outcome = if residual.is_zero() {
        Ok(())
    } else {
        Err(format!("residual {residual}"))
    };
    (Residual::Exact(residual.abs()), outcome)
}

const SHAPE_TOLERANCE: (i64, i64) = (1, 100);

fn shape_case(config: &VerifyConfig, q: u64, n: u64) -> (Residual, std::result::Result<(), String>) {
    let deviation = config
        .p_poly(q)
        .and_then(|poly| shape_ratio_with(&poly, n))
        .map(|r| (r - Rational::one()).abs());
    let deviation = match deviation {
        Ok(d) => d,
        Err(e) => return (Residual::Exact(Rational::zero()), Err(e.to_string())),
    };
    let tolerance = Rational::new(SHAPE_TOLERANCE.0, SHAPE_TOLERANCE.1);
    let mut outcome = if deviation <= tolerance {
        Ok(())
    } else {
        Err(format!("|ratio - 1| = {:.4e}", deviation.to_f64()))
    };
    if outcome.is_ok() {
        let p = config.precision_bits;
        let gap = staircase_gap(q, n, p).and_then(|g| Ok((g, ln_int(q, p)?)));
        outcome = match gap {
            Ok((g, ln_q)) if g.lo().signum() > 0 && (&g - &ln_q).lo().signum() <= 0 => Ok(()),
            Ok((g, _)) => Err(format!("staircase gap {g} outside (0, ln q]")),
            Err(e) => Err(e.to_string()),
        };
    }
    (Residual::Exact(deviation), outcome)
}

/// `|shape_ratio - 1| <= 1/100` at the configured n, plus the deviation
/// shrinking across decades up to n and the staircase gap in `(0, ln q]`.
fn shape_ratio_suite(config: &VerifyConfig) -> LemmaReport {
    let mut tally = Tally::exact(Suite::ShapeRatio, config);
    if config.shape_n == 0 {
        return tally.finish();
    }
    for &q in &config.shape_qs {
        let (r, o) = shape_case(config, q, config.shape_n);
        tally.record(Case::Base { q, n: config.shape_n }, r, o);
        // O(1/n): each decade should cut the deviation at least in half.
        let mut previous: Option<Rational> = None;
        let mut n = 10u64;
        while n <= config.shape_n.max(10) {
            let deviation = config
                .p_poly(q)
                .and_then(|poly| shape_ratio_with(&poly, n))
                .map(|r| (r - Rational::one()).abs());
            let outcome = match (&deviation, &previous) {
                (Ok(d), Some(prev)) if d.mul_int(2) > *prev => {
                    Err(format!("deviation {:.3e} did not halve from {:.3e}", d.to_f64(), prev.to_f64()))
                }
                (Ok(_), _) => Ok(()),
                (Err(e), _) => Err(e.to_string()),
            };
            let d = deviation.unwrap_or_else(|_| Rational::zero());
            tally.record(Case::Base { q, n }, Residual::Exact(d.clone()), outcome);
            previous = Some(d);
            n *= 10;
        }
    }
    tally.finish()
}

fn speedup_case(q: u64, p: u32) -> (Residual, std::result::Result<(), String>) {
    let run = || -> Result<(Enclosure, Enclosure)> { Ok((speedup_factor(q, p)?, speedup_factor(q + 1, p)?)) };
    match run() {
        Ok((a, b)) => {
            let outcome = if b.hi() < a.lo() {
                Ok(())
            } else {
                Err(format!("factor({}) = {b} not strictly below factor({q}) = {a}", q + 1))
            };
            (Residual::Width(a.width().max(b.width())), outcome)
        }
        Err(e) => (Residual::Width(Dyadic::zero()), Err(e.to_string())),
    }
}

/// `(1 - q^-2)/ln q` strictly decreasing for `2 <= q <= speedup_q_max`.
fn speedup(config: &VerifyConfig) -> LemmaReport {
    let mut tally = Tally::width(Suite::Speedup, config);
    for q in 2..config.speedup_q_max {
        let (r, o) = speedup_case(q, config.precision_bits);
        tally.record(Case::Base { q, n: q + 1 }, r, o);
    }
    tally.finish()
}

fn p_poly_case(config: &VerifyConfig, q: u64, x: u64) -> (Residual, std::result::Result<(), String>) {
    let poly = match config.p_poly(q) {
        Ok(p) => p,
        Err(e) => return (Residual::Exact(Rational::zero()), Err(e.to_string())),
    };
    let expanded = Rational::from_integer(poly.eval_u64(x));
    let direct = p_poly_direct(q, x).expect("q >= 2");
    exact_eq(&expanded, &direct)
}

fn p_poly_suite(config: &VerifyConfig) -> LemmaReport {
    let mut tally = Tally::exact(Suite::PPoly, config);
    for q in 2..=config.p_poly_q_max {
        for x in 1..=config.p_poly_points {
            let (r, o) = p_poly_case(config, q, x);
            tally.record(Case::Base { q, n: x }, r, o);
        }
    }
    if config.p_poly_q_max >= 3 && config.p_poly_points > 0 {
        let known: [(u64, &[i64]); 2] = [(2, &[1]), (3, &[6, 12])];
        for (q, coefficients) in known {
            let expected: Vec<BigInt> = coefficients.iter().map(|&c| BigInt::from(c)).collect();
            let poly = config.p_poly(q).expect("q >= 2");
            let outcome = if poly.coefficients() == expected.as_slice() {
                Ok(())
            } else {
                Err(format!("P_{q} coefficients {:?}", poly.coefficients()))
            };
            tally.record(Case::Base { q, n: 0 }, Residual::Exact(Rational::zero()), outcome);
        }
    }
    tally.finish()
}

/// Checks a single case in isolation (used for witness rechecks).
pub fn check_case(suite: Suite, case: Case, config: &VerifyConfig) -> std::result::Result<(), String> {
    let p = config.precision_bits;
    let bad_case = || Err(format!("case {case} does not belong to suite {suite}"));
    match (suite, case) {
        (Suite::Lemma1, Case::Index { n }) => lemma1_case(n, p).1,
        (Suite::Lemma2, Case::Signed { n, sign }) => lemma2_case(n, sign),
        (Suite::Lemma3, Case::Signed { n, sign }) => {
            let r = check_lemma3(n as u32, sign, p);
            r.witnesses.first().map_or(Ok(()), |w| Err(w.detail.clone()))
        }
        (Suite::Remainder, Case::Signed { n, sign }) => {
            let r = check_remainder_bound(n as u32, sign, p);
            r.witnesses.first().map_or(Ok(()), |w| Err(w.detail.clone()))
        }
        (Suite::Theorem1Limits, Case::Signed { n, sign }) => theorem1_case(sign, n, p).1,
        (Suite::Pairing, Case::Signed { n, sign }) => pairing_case(n, sign),
        (Suite::VaccaIdentity, Case::Index { n }) => {
            let a = gen(Family::Vacca3, Sign::Plus, 2).term(n);
            let b = gen(Family::Rational5, Sign::Plus, 2).term(n);
            match (a, b) {
                (Ok(a), Ok(b)) => exact_eq(&a, &b).1,
                (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
            }
        }
        (Suite::Q2Addison, Case::Index { n }) => {
            let a = gen(Family::Theorem2_9, Sign::Plus, 2).term(n);
            let b = gen(Family::Addison7, Sign::Plus, 2).term(n);
            match (a, b) {
                (Ok(a), Ok(b)) => exact_eq(&a, &b).1,
                (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
            }
        }
        (Suite::Grouping, Case::Base { q, n }) => grouping_case(q, n),
        (Suite::AveragedIdentity, Case::Base { q, n }) => match config.p_poly(q) {
            Ok(poly) if n >= 1 => averaged_case(&poly, n).1,
            Ok(_) => Err("n must be positive".into()),
            Err(e) => Err(e.to_string()),
        },
        (Suite::ShapeRatio, Case::Base { q, n }) => shape_case(config, q, n).1,
        (Suite::Speedup, Case::Base { q, .. }) => speedup_case(q, p).1,
        (Suite::PPoly, Case::Base { q, n }) if n >= 1 => p_poly_case(config, q, n).1,
        _ => bad_case(),
    }
}

/// Runs one suite at the configured ranges.
pub fn run_suite(suite: Suite, config: &VerifyConfig) -> LemmaReport {
    let p = config.precision_bits;
    match suite {
        Suite::Lemma1 => {
            let mut r = check_lemma1(config.lemma1_n_max, p);
            r.witnesses.truncate(config.max_witnesses);
            r
        }
        Suite::Lemma2 => check_lemma2(config.lemma2_n_max),
        Suite::Lemma3 => lemma3_and_remainder(config, true, false).remove(0),
        Suite::Remainder => lemma3_and_remainder(config, false, true).remove(0),
        Suite::Theorem1Limits => {
            let mut tally = Tally::width(Suite::Theorem1Limits, config);
            if config.theorem1_terms >= 1 {
                for sign in [Sign::Plus, Sign::Minus] {
                    let (r, o) = theorem1_case(sign, config.theorem1_terms, p);
                    tally.record(Case::Signed { n: config.theorem1_terms, sign }, r, o);
                }
            }
            tally.finish()
        }
        Suite::Pairing => pairing(config),
        Suite::VaccaIdentity => termwise(
            suite,
            config,
            2,
            config.vacca_n_max,
            gen(Family::Vacca3, Sign::Plus, 2),
            gen(Family::Rational5, Sign::Plus, 2),
        ),
        Suite::Grouping => grouping(config),
        Suite::Q2Addison => termwise(
            suite,
            config,
            1,
            config.addison_n_max,
            gen(Family::Theorem2_9, Sign::Plus, 2),
            gen(Family::Addison7, Sign::Plus, 2),
        ),
        Suite::AveragedIdentity => averaged_identity(config),
        Suite::ShapeRatio => shape_ratio_suite(config),
        Suite::Speedup => speedup(config),
        Suite::PPoly => p_poly_suite(config),
    }
}

/// Runs every suite in a fixed order.
pub fn run_all(config: &VerifyConfig) -> Vec<LemmaReport> {
    let mut reports = Vec::new();
    for suite in Suite::ALL {
        match suite {
            // One pass over the A_n table serves both.
            Suite::Lemma3 => reports.extend(lemma3_and_remainder(config, true, true)),
            Suite::Remainder => {}
            _ => reports.push(run_suite(suite, config)),
        }
    }
    reports
}

pub fn all_passed(reports: &[LemmaReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma1_examples() {
        let r = check_lemma1(1, 96);
        assert!(r.passed && r.cases_checked == 1);
        assert!(check_lemma1(1000, 96).passed);
    }

    #[test]
    fn lemma3_small_k() {
        for sign in [Sign::Plus, Sign::Minus] {
            for k in 1..=8 {
                let r = check_lemma3(k, sign, 96);
                assert!(r.passed, "k={k} {sign}: {:?}", r.witnesses);
            }
        }
        // k = 1: the paired sum is empty and S_1 = A_1 = R_1.
        let table = ATable::new(1, 96);
        let b = blocks(&table, Sign::Minus, 1, 96);
        assert!(b.base[0].intersects(&b.remainder[0]));
    }

    #[test]
    fn remainder_examples() {
        for sign in [Sign::Plus, Sign::Minus] {
            assert!(check_remainder_bound(1, sign, 96).passed);
            assert!(check_remainder_bound(10, sign, 96).passed);
        }
    }

    #[test]
    fn theorem1_small_cut_is_trivially_consistent() {
        for sign in [Sign::Plus, Sign::Minus] {
            assert!(check_theorem1_limits(sign, 1, 64).passed);
            assert!(check_theorem1_limits(sign, 200, 64).passed);
        }
    }

    #[test]
    fn quick_config_passes() {
        let reports = run_all(&VerifyConfig::quick());
        for r in &reports {
            assert!(r.passed, "{}: {:?}", r.suite, r.witnesses);
            assert!(r.cases_checked > 0, "{}", r.suite);
        }
        assert_eq!(reports.len(), Suite::ALL.len());
    }

    #[test]
    fn empty_ranges_pass_vacuously() {
        for r in run_all(&VerifyConfig::empty()) {
            assert!(r.passed);
            assert_eq!(r.cases_checked, 0, "{}", r.suite);
        }
    }

    #[test]
    fn injected_fault_is_caught_and_reproducible() {
        let config = VerifyConfig {
            fault: Some(Fault { q: 5, index: 1, delta: 1 }),
            ..VerifyConfig::quick()
        };
        let r = run_suite(Suite::AveragedIdentity, &config);
        assert!(!r.passed);
        let w = &r.witnesses[0];
        assert!(matches!(w.case, Case::Base { q: 5, .. }));
        assert!(w.recheck(&config).is_some());
        assert!(w.recheck(&VerifyConfig::quick()).is_none());
        assert!(!run_suite(Suite::PPoly, &config).passed);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
    }
}
