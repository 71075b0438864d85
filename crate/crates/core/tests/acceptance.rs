//! Acceptance gate: one PASS/FAIL line per criterion, then a single assertion
//! that all of them passed. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use vacca_core::acceleration::{averaged_identity_residual, build_p_poly, p_poly_direct, shape_ratio, speedup_factor};
use vacca_core::digits::delta;
use vacca_core::numerics::render::agreed_prefix;
use vacca_core::numerics::Enclosure;
use vacca_core::series::{self, base_term, certify_enclosed, evaluate, Family, SeriesId, TermGenerator};
use vacca_core::verification::{run_suite, Suite, VerifyConfig};
use vacca_core::{Rational, Sign};

type Check = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass_if(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn generator(family: Family, sign: Sign, q: u64) -> TermGenerator {
    TermGenerator::new(SeriesId::new(family, sign, q).unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut bad = None;
    'outer: for sign in [Sign::Plus, Sign::Minus] {
        for n in 2..=(1u64 << 22) {
            let step = if sign == Sign::Plus || n % 2 == 1 { 1 } else { -1 };
            if delta(n / 2, sign).unwrap() + step != delta(n, sign).unwrap() {
                bad = Some((n, sign));
                break 'outer;
            }
        }
    }
    let elapsed = started.elapsed();
    pass_if(
        bad.is_none() && elapsed < Duration::from_secs(60),
        format!("2 <= n <= 2^22, both signs, {:.1} s, first failure {bad:?}", elapsed.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let mut bad = None;
    for sign in [Sign::Plus, Sign::Minus] {
        let five = generator(Family::Rational5, sign, 2);
        let six = generator(Family::Paired6, sign, 2);
        let (mut s5, mut s6) = (Rational::zero(), Rational::zero());
        for n in 1..=10_000u64 {
            s5 += five.term(2 * n).unwrap() + five.term(2 * n + 1).unwrap();
            s6 += six.term(n).unwrap();
            if s5 != s6 && bad.is_none() {
                bad = Some((n, sign));
            }
        }
    }
    pass_if(bad.is_none(), format!("N <= 10^4, both signs, first mismatch {bad:?}"))
}

fn criterion_3() -> Outcome {
    let vacca = generator(Family::Vacca3, Sign::Plus, 2);
    let five = generator(Family::Rational5, Sign::Plus, 2);
    let bad = (2..=100_000u64).find(|&n| vacca.term(n).unwrap() != five.term(n).unwrap());
    pass_if(bad.is_none(), format!("2 <= n <= 10^5, first mismatch {bad:?}"))
}

fn suite_outcome(suite: Suite, config: &VerifyConfig) -> Outcome {
    let r = run_suite(suite, config);
    let witness = r.witnesses.first().map(|w| format!("{}: {}", w.case, w.detail));
    pass_if(
        r.passed,
        format!("{} cases, max residual {}, witness {witness:?}", r.cases_checked, r.max_residual),
    )
}

fn criterion_4() -> Outcome {
    let config = VerifyConfig {
        precision_bits: 96,
        lemma3_k_max: 18,
        ..VerifyConfig::default()
    };
    suite_outcome(Suite::Lemma3, &config)
}

fn criterion_5() -> Outcome {
    let config = VerifyConfig {
        precision_bits: 96,
        remainder_k_max: 18,
        ..VerifyConfig::default()
    };
    suite_outcome(Suite::Remainder, &config)
}

fn criterion_6() -> Outcome {
    let mut bad = None;
    for q in 2..=12u64 {
        for n in 1..=1000u64 {
            if !averaged_identity_residual(q, n).unwrap().is_zero() && bad.is_none() {
                bad = Some((q, n));
            }
        }
    }
    pass_if(bad.is_none(), format!("q in 2..=12, n <= 10^3, first nonzero {bad:?}"))
}

fn criterion_7() -> Outcome {
    let t2 = generator(Family::Theorem2_9, Sign::Plus, 2);
    let addison = generator(Family::Addison7, Sign::Plus, 2);
    let bad = (1..=100_000u64).find(|&n| t2.term(n).unwrap() != addison.term(n).unwrap());
    let offsets = series::constant_offset(t2.series()) == series::constant_offset(addison.series());
    pass_if(bad.is_none() && offsets, format!("n <= 10^5, first mismatch {bad:?}, equal constants {offsets}"))
}

fn criterion_8() -> Outcome {
    let mut bad = None;
    for q in [2u64, 3, 5, 10] {
        let carlitz = generator(Family::Carlitz10, Sign::Plus, q);
        let grouped = generator(Family::GroupedFirst17, Sign::Plus, q);
        let mut s10: Rational = (1..q).map(|n| carlitz.term(n).unwrap()).sum();
        let mut s17 = Rational::zero();
        if s10 != s17 {
            bad = Some((q, 0));
        }
        for big_n in 1..=10_000u64 {
            for n in q * big_n..q * big_n + q {
                s10 += carlitz.term(n).unwrap();
            }
            s17 += grouped.term(big_n).unwrap();
            if s10 != s17 && bad.is_none() {
                bad = Some((q, big_n));
            }
        }
    }
    pass_if(bad.is_none(), format!("q in {{2,3,5,10}}, N <= 10^4, first mismatch {bad:?}"))
}

/// Number of decimals two rendered prefixes have in common.
fn shared_decimals(a: &str, b: &str) -> usize {
    let common = a.chars().zip(b.chars()).take_while(|(x, y)| x == y).count();
    let point = a.find('.').map_or(common, |p| p + 1);
    common.saturating_sub(point)
}

fn criterion_9() -> Outcome {
    let started = Instant::now();
    let target = Rational::pow10(-10);
    let ten = evaluate(SeriesId::with_base(Family::Theorem2_9, 10).unwrap(), &target, 64).unwrap();
    let three = evaluate(SeriesId::with_base(Family::Theorem2_9, 3).unwrap(), &target, 64).unwrap();
    let elapsed = started.elapsed();
    let p10 = agreed_prefix(&ten.value).unwrap_or_default();
    let p3 = agreed_prefix(&three.value).unwrap_or_default();
    let shared = shared_decimals(&p10, &p3);
    let checks = [
        ("terms <= 2*10^5", ten.terms_used <= 200_000),
        ("error <= 1e-10", ten.certified_error() <= target),
        ("prefix begins 0.577215664901", p10.starts_with("0.577215664901")),
        ("q=3 and q=10 intersect", ten.value.intersects(&three.value)),
        ("q=3 and q=10 share >= 10 decimals", shared >= 10),
        ("under 2 minutes", elapsed < Duration::from_secs(120)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    pass_if(
        failed.is_empty(),
        format!(
            "q=10: N={} prefix {p10}; q=3: N={} prefix {p3}; shared decimals {shared}; {:.1} s; failed: {failed:?}",
            ten.terms_used,
            three.terms_used,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_10() -> Outcome {
    let paired = evaluate(SeriesId::signed(Family::Paired6, Sign::Minus).unwrap(), &Rational::pow10(-4), 64).unwrap();
    // Independent route: alternating base series with |remainder| <= A_(N+1) < 1/(N+1)^2.
    let n = 10_000u64;
    let parts: Vec<Enclosure> = (1..=n).map(|k| base_term(Sign::Minus, k, 80).unwrap()).collect();
    let tail = Rational::new(1, (n + 1) * (n + 1));
    let oracle = Enclosure::sum(&parts, 64).widen(&tail, &tail);
    let contains = paired.value.contains(&oracle);
    let both = paired.value.intersection(&oracle);
    let prefix = both.as_ref().and_then(agreed_prefix).unwrap_or_default();
    pass_if(
        contains && paired.certified_error() <= Rational::pow10(-4) && prefix.starts_with("0.2415"),
        format!(
            "paired6- N={} {}; oracle {}; contains {contains}; intersection prefix {prefix}",
            paired.terms_used, paired.value, oracle
        ),
    )
}

fn criterion_11() -> Outcome {
    let n = 10_000u64;
    let error = |id: SeriesId| certify_enclosed(id, n, 64).unwrap().certified_error();
    let by_q: Vec<Rational> = [2u64, 3, 5, 10]
        .iter()
        .map(|&q| error(SeriesId::with_base(Family::Theorem2_9, q).unwrap()))
        .collect();
    let decreasing = by_q.windows(2).all(|w| w[1] < w[0]);
    let addison = error(SeriesId::gamma(Family::Addison7));
    let paired = error(SeriesId::gamma(Family::Paired6));
    let shown: Vec<String> = by_q.iter().map(|e| format!("{:.3e}", e.to_f64())).collect();
    pass_if(
        decreasing && addison < paired,
        format!(
            "theorem2 q=2,3,5,10: {shown:?}; addison {:.3e} < paired6+ {:.3e}",
            addison.to_f64(),
            paired.to_f64()
        ),
    )
}

fn criterion_12() -> Outcome {
    let tolerance = Rational::new(1, 100);
    let deviations: Vec<Rational> = [2u64, 3, 10]
        .iter()
        .map(|&q| (shape_ratio(q, 1000).unwrap() - Rational::one()).abs())
        .collect();
    let shape_ok = deviations.iter().all(|d| d <= &tolerance);
    let factors: Vec<Enclosure> = (2..=12u64).map(|q| speedup_factor(q, 64).unwrap()).collect();
    let decreasing = factors.windows(2).all(|w| w[1].hi() < w[0].lo());
    pass_if(
        shape_ok && decreasing,
        format!(
            "max |shape - 1| at n=10^3: {:.2e}; speedup strictly decreasing {decreasing}",
            deviations.iter().map(Rational::to_f64).fold(0.0, f64::max)
        ),
    )
}

fn criterion_13() -> Outcome {
    let mut bad = None;
    for q in 2..=12u64 {
        let poly = build_p_poly(q).unwrap();
        for x in 1..=100u64 {
            if Rational::from_integer(poly.eval_u64(x)) != p_poly_direct(q, x).unwrap() && bad.is_none() {
                bad = Some((q, x));
            }
        }
    }
    let p2 = build_p_poly(2).unwrap();
    let p3 = build_p_poly(3).unwrap();
    let small = p2.coefficients() == [1.into()] && p3.coefficients() == [6.into(), 12.into()];
    pass_if(bad.is_none() && small, format!("q <= 12 at 100 points, first mismatch {bad:?}; P_2 = 1, P_3 = 12x + 6: {small}"))
}

#[test]
fn acceptance() {
    let criteria: [Check; 13] = [
        ("digit-count step identity", criterion_1),
        ("pairing of partial sums", criterion_2),
        ("Vacca coincidence", criterion_3),
        ("partial sum / remainder identity", criterion_4),
        ("remainder bound k/2^k", criterion_5),
        ("averaging identity", criterion_6),
        ("q = 2 is Addison", criterion_7),
        ("grouping of Carlitz terms", criterion_8),
        ("gamma digits, two bases", criterion_9),
        ("ln(4/pi) digits, two methods", criterion_10),
        ("acceleration ordering", criterion_11),
        ("asymptotic shape", criterion_12),
        ("P_q oracle", criterion_13),
    ];
    let mut failed = Vec::new();
    println!();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:>2} {name}: {} [{:.1} s]",
            i + 1,
            outcome.detail,
            started.elapsed().as_secs_f64()
        );
        if !outcome.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
