use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde_json::{json, Value};
use vacca_core::bench::{self, ConvergenceRecord, Destination, Format};
use vacca_core::digits::{delta, floor_log};
use vacca_core::numerics::render::{agreed_digits, format_upper_sci, MAX_AGREED_DIGITS};
use vacca_core::numerics::{DecimalRender, MIN_PRECISION_BITS};
use vacca_core::series::{self, align_up, is_aligned_cut, Constant, EvalReport, Family, Partial, SeriesId};
use vacca_core::verification::{self, LemmaReport, VerifyConfig};
use vacca_core::{Enclosure, Error, Rational, Sign};

use crate::args::{BenchArgs, Cli, Command, ComputeArgs, Method, OutputFormat, SeqArgs, SeqKind, SuiteChoice, VerifyArgs};
use crate::status;

/// Exact partial sums longer than this are summarized in text output.
const MAX_EXACT_CHARS: usize = 400;
const DEFAULT_Q: u64 = 10;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: status::USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PrecisionUnreachable(_) | Error::BudgetExhausted { .. } => status::UNREACHABLE,
            Error::Io(_) => status::VERIFICATION_FAILED,
            _ => status::USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e.to_string()).into()
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Compute(a) => compute(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Seq(a) => seq(a),
    }
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn check_precision(bits: u32) -> Result<(), Failure> {
    if bits < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(bits).into());
    }
    Ok(())
}

/// Builds the series from command-line choices, enforcing the pairing rules.
fn series_for(constant: Constant, method: Method, q: Option<u64>) -> Result<SeriesId, Failure> {
    let family = Family::from(method);
    if constant == Constant::Ln4pi && !family.has_minus() {
        return Err(Failure::usage(format!(
            "ln4pi is only available with base4, rational5 or paired6, not {family}"
        )));
    }
    if q.is_some() && !family.uses_q() {
        return Err(Failure::usage(format!(
            "--q applies to theorem2, carlitz, grouped17 and grouped18, not {family}"
        )));
    }
    let q = if family.uses_q() { q.unwrap_or(DEFAULT_Q) } else { 2 };
    Ok(SeriesId::new(family, constant.sign(), q)?)
}

/// Decimal rendering at as many digits as the enclosure agrees on.
fn render_value(e: &Enclosure) -> String {
    match agreed_digits(e, MAX_AGREED_DIGITS) {
        Some(d) => e.decimal_render(d).unwrap_or_else(|_| e.to_string()),
        None => format!("[{}, {}]", e.lo(), e.hi()),
    }
}

fn prefix(e: &Enclosure) -> String {
    vacca_core::numerics::render::agreed_prefix(e).unwrap_or_default()
}

fn constant_name(c: Constant) -> &'static str {
    match c {
        Constant::Gamma => "gamma",
        Constant::Ln4pi => "ln4pi",
    }
}

fn compute(a: ComputeArgs) -> Outcome {
    check_precision(a.precision_bits)?;
    let constant = Constant::from(a.constant);
    let id = series_for(constant, a.method, a.q)?;
    let report = match a.terms {
        Some(n) => {
            if !is_aligned_cut(id, n) {
                return Err(Failure::usage(format!(
                    "{id} has no tail bound after {n} terms; the next cut point is {}",
                    align_up(id, n)
                )));
            }
            series::certify(id, n, a.precision_bits)?
        }
        None => {
            let target = a.target_error.clone().unwrap_or_else(|| Rational::pow10(-10));
            series::evaluate_with_budget(id, &target, a.precision_bits, a.max_terms)?
        }
    };
    let mut out = open_out(&a.common.out)?;
    match a.common.format {
        OutputFormat::Text => write_compute_text(&mut out, constant, &report, a.digits)?,
        OutputFormat::Json => {
            let v = compute_json(constant, &report, a.digits)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json value"))?;
        }
        OutputFormat::Csv => {
            writeln!(out, "constant,series,sign,q,n_terms,value_prefix,certified_error,partial")?;
            let exact = report.partial.as_exact().map(|r| r.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                constant_name(constant),
                id.family(),
                id.sign(),
                id.q(),
                report.terms_used,
                prefix(&report.value),
                format_upper_sci(&report.certified_error(), 3),
                exact
            )?;
        }
    }
    out.flush()?;
    Ok(status::OK)
}

fn write_compute_text(out: &mut dyn Write, constant: Constant, r: &EvalReport, digits: u32) -> Result<(), Failure> {
    writeln!(out, "constant: {}", constant_name(constant))?;
    writeln!(out, "series: {}", r.series)?;
    writeln!(out, "terms: {}", r.terms_used)?;
    if let Partial::Exact(x) = &r.partial {
        let text = x.to_string();
        if text.len() <= MAX_EXACT_CHARS {
            writeln!(out, "partial: {text}")?;
        } else {
            writeln!(
                out,
                "partial: {}-digit numerator over {}-digit denominator (see --format json)",
                x.numer().to_string().trim_start_matches('-').len(),
                x.denom().to_string().len()
            )?;
        }
        writeln!(out, "partial decimal: {}", x.decimal_render(digits)?)?;
    }
    writeln!(out, "value: {}", render_value(&r.value))?;
    writeln!(out, "enclosure: [{}, {}]", r.value.lo(), r.value.hi())?;
    writeln!(out, "tail bound: {}", format_upper_sci(&r.tail, 3))?;
    writeln!(out, "certified error: {}", format_upper_sci(&r.certified_error(), 3))?;
    writeln!(out, "elapsed: {:.3} s", r.elapsed.as_secs_f64())?;
    Ok(())
}

fn compute_json(constant: Constant, r: &EvalReport, digits: u32) -> Result<Value, Failure> {
    let (exact, decimal) = match &r.partial {
        Partial::Exact(x) => (Value::String(x.to_string()), Value::String(x.decimal_render(digits)?)),
        Partial::Enclosed(_) => (Value::Null, Value::Null),
    };
    Ok(json!({
        "constant": constant_name(constant),
        "series": r.series.family(),
        "sign": r.series.sign(),
        "q": r.series.q(),
        "n_terms": r.terms_used,
        "partial": exact,
        "partial_decimal": decimal,
        "value": render_value(&r.value),
        "value_prefix": prefix(&r.value),
        "lo": r.value.lo().to_rational().to_string(),
        "hi": r.value.hi().to_rational().to_string(),
        "tail": format_upper_sci(&r.tail, 3),
        "certified_error": format_upper_sci(&r.certified_error(), 3),
        "precision_bits": r.value.precision_bits(),
        "elapsed_ns": r.elapsed.as_nanos() as u64,
    }))
}

fn verify(a: VerifyArgs) -> Outcome {
    let mut config = if a.quick { VerifyConfig::quick() } else { VerifyConfig::default() };
    if let Some(bits) = a.precision_bits {
        check_precision(bits)?;
        config.precision_bits = bits;
    }
    config.fault = a.fault;
    let reports = match a.suite {
        SuiteChoice::All => verification::run_all(&config),
        SuiteChoice::One(s) => vec![verification::run_suite(s, &config)],
    };
    let mut out = open_out(&a.common.out)?;
    match a.common.format {
        OutputFormat::Text => write_reports_text(&mut out, &reports)?,
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&reports).expect("reports serialize"))?,
        OutputFormat::Csv => {
            writeln!(out, "suite,passed,cases_checked,max_residual,witnesses")?;
            for r in &reports {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.suite,
                    r.passed,
                    r.cases_checked,
                    r.max_residual,
                    r.witnesses.len()
                )?;
            }
        }
    }
    out.flush()?;
    Ok(if verification::all_passed(&reports) {
        status::OK
    } else {
        status::VERIFICATION_FAILED
    })
}

fn write_reports_text(out: &mut dyn Write, reports: &[LemmaReport]) -> io::Result<()> {
    for r in reports {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{verdict} {:<18} cases={:<9} max_residual={}",
            r.suite.name(),
            r.cases_checked,
            r.max_residual
        )?;
        for w in &r.witnesses {
            writeln!(out, "    witness {}: {}", w.case, w.detail)?;
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    writeln!(out, "{passed}/{} suites passed", reports.len())
}

fn bench_cmd(a: BenchArgs) -> Outcome {
    check_precision(a.precision_bits)?;
    if a.probe {
        return probe(&a);
    }
    let mut checkpoints = a.checkpoints.clone();
    checkpoints.sort_unstable();
    let signs: Vec<Sign> = match a.constant {
        Some(c) => vec![Constant::from(c).sign()],
        None => vec![Sign::Plus, Sign::Minus],
    };
    let methods: Vec<Family> = if a.method.is_empty() {
        Family::ALL.to_vec()
    } else {
        a.method.iter().map(|&m| Family::from(m)).collect()
    };
    let mut list = Vec::new();
    for family in methods {
        let qs: Vec<u64> = if family.uses_q() { a.q.clone() } else { vec![2] };
        for &sign in &signs {
            for &q in &qs {
                if let Ok(id) = SeriesId::new(family, sign, q) {
                    list.push(id);
                } else if family.uses_q() && q < 2 {
                    return Err(Error::InvalidBase(q).into());
                }
            }
        }
    }
    if list.is_empty() {
        return Err(Failure::usage("no series matches the chosen methods and constant"));
    }
    let run = bench::run_convergence(&list, &checkpoints, a.precision_bits);
    for f in &run.failures {
        eprintln!("warning: {} at N={}: {}", f.series, f.n_terms, f.error);
    }
    let destination = match &a.common.out {
        Some(p) => Destination::File(p.clone()),
        None => Destination::Stdout,
    };
    match a.common.format {
        OutputFormat::Csv => bench::emit(&run.records, Format::Csv, &destination)?,
        OutputFormat::Json => bench::emit(&run.records, Format::Json, &destination)?,
        OutputFormat::Text => {
            let mut out = open_out(&a.common.out)?;
            write_bench_text(&mut out, &run.records)?;
            out.flush()?;
        }
    }
    Ok(status::OK)
}

fn write_bench_text(out: &mut dyn Write, records: &[ConvergenceRecord]) -> io::Result<()> {
    writeln!(
        out,
        "{:<18} {:>8} {:>12} {:<22} {:>12}",
        "series", "N", "error", "value", "ms"
    )?;
    for r in records {
        let name = r.series_id().map(|s| s.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{:<18} {:>8} {:>12} {:<22} {:>12.3}",
            name,
            r.n_terms,
            r.certified_error,
            r.value_prefix,
            r.elapsed_ns as f64 / 1e6
        )?;
    }
    Ok(())
}

fn probe(a: &BenchArgs) -> Outcome {
    let samples: Vec<u64> = [1u64, 10, 100, 1000, 10_000]
        .iter()
        .flat_map(|&d| [d, 2 * d, 5 * d])
        .filter(|&n| n >= 10)
        .collect();
    let mut tables = Vec::new();
    for &q in &a.q {
        tables.push(bench::leading_constant_probe(q, &samples)?);
    }
    let mut out = open_out(&a.common.out)?;
    match a.common.format {
        OutputFormat::Json => {
            let v: Vec<Value> = tables
                .iter()
                .map(|t| {
                    json!({
                        "q": t.q,
                        "rows": t.rows.iter().map(|r| json!({"n": r.n, "ratio": r.ratio.to_string()})).collect::<Vec<_>>(),
                        "max_deviation_per_decade": t.decades.iter().map(|d| json!({
                            "decade": d.decade,
                            "max_deviation": format_upper_sci(&d.max_deviation, 3),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json value"))?;
        }
        OutputFormat::Csv => {
            writeln!(out, "q,n,ratio")?;
            for t in &tables {
                for r in &t.rows {
                    writeln!(out, "{},{},{}", t.q, r.n, r.ratio.decimal_render(12)?)?;
                }
            }
        }
        OutputFormat::Text => {
            for t in &tables {
                writeln!(out, "q = {}", t.q)?;
                for r in &t.rows {
                    writeln!(out, "  n = {:>6}  ratio = {}", r.n, r.ratio.decimal_render(12)?)?;
                }
                for d in &t.decades {
                    writeln!(
                        out,
                        "  decade 10^{}: max |ratio - 1| = {}",
                        d.decade,
                        format_upper_sci(&d.max_deviation, 3)
                    )?;
                }
            }
        }
    }
    out.flush()?;
    Ok(status::OK)
}

fn seq_value(kind: SeqKind, n: u64) -> Result<i64, Error> {
    Ok(match kind {
        SeqKind::DeltaPlus => delta(n, Sign::Plus)?,
        SeqKind::DeltaMinus => delta(n, Sign::Minus)?,
        SeqKind::FloorLog2 => i64::from(floor_log(n, 2)?),
        SeqKind::VaccaNumerators => {
            let level = i64::from(floor_log(n, 2)?);
            if n.is_multiple_of(2) {
                level
            } else {
                -level
            }
        }
    })
}

fn seq(a: SeqArgs) -> Outcome {
    let values = (1..=a.count).map(|n| seq_value(a.kind, n)).collect::<Result<Vec<_>, _>>()?;
    let mut out = open_out(&a.out)?;
    match a.format {
        OutputFormat::Text => {
            let line: Vec<String> = values.iter().map(i64::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string(&values).expect("integers"))?,
        OutputFormat::Csv => {
            writeln!(out, "n,value")?;
            for (n, v) in (1u64..).zip(&values) {
                writeln!(out, "{n},{v}")?;
            }
        }
    }
    out.flush()?;
    Ok(status::OK)
}
