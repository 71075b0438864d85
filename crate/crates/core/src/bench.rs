//! Certified error against term count, per series, plus the shape-ratio probe.
//!
//! "Faster" always means a smaller certified error at the same N; wall time
//! is recorded but never compared.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::acceleration::shape_ratio;
use crate::digits::Sign;
use crate::numerics::render::{agreed_prefix, format_upper_sci};
use crate::numerics::Rational;
use crate::series::{self, align_up, Family, SeriesId};
use crate::{Error, Result};

pub const DEFAULT_CHECKPOINTS: [u64; 3] = [100, 1_000, 10_000];

/// Significant digits in the `certified_error` column.
const ERROR_DIGITS: u32 = 3;

/// One row of the convergence table. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub series: Family,
    pub sign: Sign,
    pub q: u64,
    pub n_terms: u64,
    /// Agreed decimal prefix of the certified value enclosure.
    pub value_prefix: String,
    /// `tail + width`, rounded up to three significant digits.
    pub certified_error: String,
    pub elapsed_ns: u64,
}

impl ConvergenceRecord {
    pub fn series_id(&self) -> Result<SeriesId> {
        SeriesId::new(self.series, self.sign, self.q)
    }

    /// The certified error column read back as an exact rational.
    pub fn certified_error_value(&self) -> Result<Rational> {
        self.certified_error.parse()
    }
}

/// A (series, checkpoint) pair that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordFailure {
    pub series: SeriesId,
    pub n_terms: u64,
    pub error: Error,
}

#[derive(Debug, Clone, Default)]
pub struct ConvergenceRun {
    pub records: Vec<ConvergenceRecord>,
    pub failures: Vec<RecordFailure>,
}

/// Evaluates every series at every checkpoint, moving each checkpoint up to
/// the next cut point where the series has a tail bound. Records are ordered
/// by series (as given), then by N.
pub fn run_convergence(series_list: &[SeriesId], checkpoints: &[u64], precision_bits: u32) -> ConvergenceRun {
    let mut run = ConvergenceRun::default();
    for &id in series_list {
        let mut aligned: Vec<u64> = checkpoints.iter().map(|&n| align_up(id, n)).collect();
        aligned.sort_unstable();
        aligned.dedup();
        for n in aligned {
            let started = Instant::now();
            match series::certify_enclosed(id, n, precision_bits) {
                Ok(report) => {
                    let elapsed_ns = started.elapsed().as_nanos().min(u128::from(u64::MAX)) as u64;
                    run.records.push(ConvergenceRecord {
                        series: id.family(),
                        sign: id.sign(),
                        q: id.q(),
                        n_terms: n,
                        value_prefix: agreed_prefix(&report.value).unwrap_or_default(),
                        certified_error: format_upper_sci(&report.certified_error(), ERROR_DIGITS),
                        elapsed_ns,
                    });
                }
                Err(error) => run.failures.push(RecordFailure {
                    series: id,
                    n_terms: n,
                    error,
                }),
            }
        }
    }
    run
}

/// The whole catalog: both signs where available, q in `qs` for q-families.
pub fn catalog(qs: &[u64]) -> Vec<SeriesId> {
    let mut out = Vec::new();
    for family in Family::ALL {
        if family.uses_q() {
            for &q in qs {
                if let Ok(id) = SeriesId::with_base(family, q) {
                    out.push(id);
                }
            }
        } else {
            out.push(SeriesId::gamma(family));
            if family.has_minus() {
                out.push(SeriesId::signed(family, Sign::Minus).expect("has minus"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeRow {
    pub n: u64,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecadeSummary {
    /// `⌊log10 n⌋`
    pub decade: u32,
    pub max_deviation: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeTable {
    pub q: u64,
    pub rows: Vec<ProbeRow>,
    pub decades: Vec<DecadeSummary>,
}

/// Exact shape ratios at the sample points, with the largest `|ratio - 1|`
/// per decade.
pub fn leading_constant_probe(q: u64, samples: &[u64]) -> Result<ProbeTable> {
    let mut rows = Vec::with_capacity(samples.len());
    let mut decades: Vec<DecadeSummary> = Vec::new();
    for &n in samples {
        let ratio = shape_ratio(q, n)?;
        let deviation = (&ratio - &Rational::one()).abs();
        let decade = n.ilog10();
        match decades.iter_mut().find(|d| d.decade == decade) {
            Some(d) if d.max_deviation < deviation => d.max_deviation = deviation,
            Some(_) => {}
            None => decades.push(DecadeSummary {
                decade,
                max_deviation: deviation,
            }),
        }
        rows.push(ProbeRow { n, ratio });
    }
    decades.sort_by_key(|d| d.decade);
    Ok(ProbeTable { q, rows, decades })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

pub const CSV_HEADER: [&str; 7] = [
    "series",
    "sign",
    "q",
    "n_terms",
    "value_prefix",
    "certified_error",
    "elapsed_ns",
];

/// Writes the records to any writer.
pub fn emit_to<W: Write>(records: &[ConvergenceRecord], format: Format, writer: W) -> Result<()> {
    let io_err = |e: &dyn std::fmt::Display| Error::Io(e.to_string());
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
            w.write_record(CSV_HEADER).map_err(|e| io_err(&e))?;
            for r in records {
                w.serialize(r).map_err(|e| io_err(&e))?;
            }
            w.flush().map_err(|e| io_err(&e))?;
        }
        Format::Json => {
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, records).map_err(|e| io_err(&e))?;
            writeln!(writer).map_err(|e| io_err(&e))?;
            writer.flush().map_err(|e| io_err(&e))?;
        }
    }
    Ok(())
}

pub fn emit(records: &[ConvergenceRecord], format: Format, destination: &Destination) -> Result<()> {
    match destination {
        Destination::Stdout => emit_to(records, format, io::stdout().lock()),
        Destination::File(path) => {
            let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            emit_to(records, format, BufWriter::new(file))
        }
    }
}
