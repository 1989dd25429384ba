//! CSV and JSON emission. CSV has a header row and writes floats in shortest
//! round-trip form; JSON is one object per row inside a streamed array.

use std::io::{self, Write};

use chsh_core::mc::McEstimate;
use chsh_core::{Dyadic, SweepRow, ViolationProbability};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One probability result from `exact`, `approx` or `mc`.
#[derive(Debug, Serialize)]
pub struct ProbabilityRow {
    pub method: String,
    pub threshold: String,
    #[serde(rename = "N")]
    pub total: u64,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub n4: u32,
    /// Reduced fraction, exact results only.
    pub fraction: Option<String>,
    pub value: f64,
    pub trials: Option<u64>,
    pub hits: Option<u64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub seed: Option<u64>,
}

impl From<&ViolationProbability> for ProbabilityRow {
    fn from(p: &ViolationProbability) -> Self {
        let [n1, n2, n3, n4] = p.config.rounds();
        ProbabilityRow {
            method: p.method.to_string(),
            threshold: p.threshold.to_string(),
            total: p.config.total(),
            n1,
            n2,
            n3,
            n4,
            fraction: p.value.as_exact().map(Dyadic::to_string),
            value: p.value.to_f64(),
            trials: None,
            hits: None,
            ci_low: None,
            ci_high: None,
            seed: None,
        }
    }
}

impl From<&McEstimate> for ProbabilityRow {
    fn from(e: &McEstimate) -> Self {
        let [n1, n2, n3, n4] = e.config.rounds();
        ProbabilityRow {
            method: "monte-carlo".into(),
            threshold: e.threshold.to_string(),
            total: e.config.total(),
            n1,
            n2,
            n3,
            n4,
            fraction: None,
            value: e.estimate,
            trials: Some(e.trials),
            hits: Some(e.hits),
            ci_low: Some(e.ci_low),
            ci_high: Some(e.ci_high),
            seed: Some(e.seed),
        }
    }
}

/// Integer counts stay integers; continuous splits are reals.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(untagged)]
pub enum Count {
    Int(u64),
    Real(f64),
}

impl From<f64> for Count {
    fn from(x: f64) -> Self {
        if x.fract() == 0.0 && x >= 0.0 && x < 2f64.powi(53) {
            Count::Int(x as u64)
        } else {
            Count::Real(x)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRecord {
    pub variant: String,
    #[serde(rename = "N")]
    pub total: u64,
    pub n1: Option<Count>,
    pub n2: Option<Count>,
    pub n3: Option<Count>,
    pub n4: Option<Count>,
    pub p_analytic: Option<f64>,
    pub exact_strict: Option<String>,
    pub exact_strict_value: Option<f64>,
    pub exact_nonstrict: Option<String>,
    pub exact_nonstrict_value: Option<f64>,
    pub error: Option<String>,
}

impl From<&SweepRow> for SweepRecord {
    fn from(row: &SweepRow) -> Self {
        let n = |k: usize| row.counts.map(|c| Count::from(c[k]));
        SweepRecord {
            variant: row.variant.to_string(),
            total: row.total,
            n1: n(0),
            n2: n(1),
            n3: n(2),
            n4: n(3),
            p_analytic: row.p_analytic,
            exact_strict: row.exact_strict.as_ref().map(Dyadic::to_string),
            exact_strict_value: row.exact_strict.as_ref().map(Dyadic::to_f64),
            exact_nonstrict: row.exact_nonstrict.as_ref().map(Dyadic::to_string),
            exact_nonstrict_value: row.exact_nonstrict.as_ref().map(Dyadic::to_f64),
            error: row.error.clone(),
        }
    }
}

fn to_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// A single row: CSV with header, or one JSON object.
pub fn write_one<T: Serialize, W: Write>(out: W, format: Format, row: &T) -> io::Result<()> {
    write_rows(out, format, std::slice::from_ref(row), false)
}

/// Many rows: CSV with header, or a JSON array written one object per line.
pub fn write_all<T: Serialize, W: Write>(out: W, format: Format, rows: &[T]) -> io::Result<()> {
    write_rows(out, format, rows, true)
}

fn write_rows<T: Serialize, W: Write>(
    mut out: W,
    format: Format,
    rows: &[T],
    array: bool,
) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row).map_err(to_io)?;
            }
            w.flush()
        }
        Format::Json if !array => {
            for row in rows {
                serde_json::to_writer(&mut out, row)?;
                writeln!(out)?;
            }
            out.flush()
        }
        Format::Json => {
            write!(out, "[")?;
            for (k, row) in rows.iter().enumerate() {
                write!(out, "{}\n  ", if k == 0 { "" } else { "," })?;
                serde_json::to_writer(&mut out, row)?;
            }
            writeln!(out, "{}]", if rows.is_empty() { "" } else { "\n" })?;
            out.flush()
        }
    }
}
