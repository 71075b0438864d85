use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vacca_core::series::{Constant, Family};
use vacca_core::verification::Suite;
use vacca_core::{Rational, DEFAULT_PRECISION_BITS};

#[derive(Debug, Parser)]
#[command(name = "vacca", version, about = "Certified rational series for Euler's constant and ln(4/pi)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one series to a term count or an error target.
    Compute(ComputeArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Certified error against term count.
    Bench(BenchArgs),
    /// Print an integer sequence.
    Seq(SeqArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstantArg {
    Gamma,
    Ln4pi,
}

impl From<ConstantArg> for Constant {
    fn from(c: ConstantArg) -> Self {
        match c {
            ConstantArg::Gamma => Constant::Gamma,
            ConstantArg::Ln4pi => Constant::Ln4pi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Base4,
    Vacca,
    Rational5,
    Paired6,
    Addison,
    Theorem2,
    Carlitz,
    Grouped17,
    Grouped18,
}

impl From<Method> for Family {
    fn from(m: Method) -> Self {
        match m {
            Method::Base4 => Family::Base4,
            Method::Vacca => Family::Vacca3,
            Method::Rational5 => Family::Rational5,
            Method::Paired6 => Family::Paired6,
            Method::Addison => Family::Addison7,
            Method::Theorem2 => Family::Theorem2_9,
            Method::Carlitz => Family::Carlitz10,
            Method::Grouped17 => Family::GroupedFirst17,
            Method::Grouped18 => Family::GroupedLast18,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long, value_enum, default_value_t = ConstantArg::Gamma)]
    pub constant: ConstantArg,
    #[arg(long, value_enum, default_value_t = Method::Theorem2)]
    pub method: Method,
    /// Base for theorem2, carlitz, grouped17 and grouped18 (default 10).
    #[arg(long)]
    pub q: Option<u64>,
    /// Sum exactly this many terms.
    #[arg(long, conflicts_with = "target_error")]
    pub terms: Option<u64>,
    /// Stop once the certified error is at most this (default 1e-10).
    #[arg(long, value_parser = parse_positive_rational)]
    pub target_error: Option<Rational>,
    /// Decimals shown for exact partial sums.
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
    /// Largest term count `--target-error` may use.
    #[arg(long, default_value_t = vacca_core::series::DEFAULT_TERM_BUDGET)]
    pub max_terms: u64,
    /// Working precision of enclosures, in bits.
    #[arg(long, env = "VACCA_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS)]
    pub precision_bits: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `all` or one suite name.
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    pub suite: SuiteChoice,
    /// Small ranges instead of the full ones.
    #[arg(long)]
    pub quick: bool,
    /// Perturb a P_q coefficient, as `Q:INDEX:DELTA`, to see a suite fail.
    #[arg(long, value_parser = parse_fault)]
    pub fault: Option<vacca_core::verification::Fault>,
    /// Working precision in bits (the suites default to 96).
    #[arg(long, env = "VACCA_PRECISION_BITS")]
    pub precision_bits: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteChoice {
    All,
    One(Suite),
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Series to include (repeatable); all of them when omitted.
    #[arg(long, value_enum)]
    pub method: Vec<Method>,
    #[arg(long, value_enum)]
    pub constant: Option<ConstantArg>,
    /// Bases for the q-families.
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5, 10])]
    pub q: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = vacca_core::bench::DEFAULT_CHECKPOINTS)]
    pub checkpoints: Vec<u64>,
    /// Print the shape-ratio probe instead of the convergence table.
    #[arg(long)]
    pub probe: bool,
    /// Working precision of enclosures, in bits.
    #[arg(long, env = "VACCA_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS)]
    pub precision_bits: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqKind {
    /// Number of binary digits of n.
    DeltaPlus,
    /// Ones minus zeros in the binary form of n.
    DeltaMinus,
    FloorLog2,
    /// `(-1)^n ⌊log₂ n⌋`, the numerators of Vacca's series.
    VaccaNumerators,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[arg(long, value_enum)]
    pub kind: SeqKind,
    #[arg(long)]
    pub count: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_positive_rational(s: &str) -> Result<Rational, String> {
    let r: Rational = s.parse().map_err(|e: vacca_core::Error| e.to_string())?;
    if r.signum() <= 0 {
        return Err("must be positive".into());
    }
    Ok(r)
}

fn parse_suite(s: &str) -> Result<SuiteChoice, String> {
    if s == "all" {
        return Ok(SuiteChoice::All);
    }
    s.parse().map(SuiteChoice::One).map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("expected `all` or one of: {}", names.join(", "))
    })
}

fn parse_fault(s: &str) -> Result<vacca_core::verification::Fault, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [q, index, delta] = parts.as_slice() else {
        return Err("expected Q:INDEX:DELTA".into());
    };
    let bad = |e: std::num::ParseIntError| e.to_string();
    Ok(vacca_core::verification::Fault {
        q: q.parse().map_err(bad)?,
        index: index.parse().map_err(bad)?,
        delta: delta.parse().map_err(bad)?,
    })
}
