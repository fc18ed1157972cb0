use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BenchResult, BenchRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown report format `{other}`"
            ))),
        }
    }
}

/// CSV header, one row per `(method, m)`.
pub const CSV_COLUMNS: [&str; 11] = [
    "method",
    "m",
    "n_signals",
    "median_error",
    "q1_error",
    "q3_error",
    "failures",
    "bound_violations",
    "sampling",
    "wall_time_ms",
    "seed",
];

fn fmt_float(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn write_csv<W: Write>(res: &BenchResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in &res.rows {
        let BenchRow {
            method,
            m,
            n_signals,
            median_error,
            q1_error,
            q3_error,
            failures,
            bound_violations,
            sampling,
            wall_time_ms,
        } = row;
        w.write_record([
            method.name().to_string(),
            m.to_string(),
            n_signals.to_string(),
            fmt_float(*median_error),
            fmt_float(*q1_error),
            fmt_float(*q3_error),
            failures.to_string(),
            bound_violations.to_string(),
            sampling.clone(),
            wall_time_ms.map(fmt_float).unwrap_or_default(),
            res.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(res: &BenchResult, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, res)?;
    writeln!(out)?;
    Ok(())
}

pub fn emit_report(res: &BenchResult, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => write_csv(res, out),
        ReportFormat::Json => write_json(res, out),
    }
}

pub fn read_json_report<R: Read>(input: R) -> Result<BenchResult> {
    Ok(serde_json::from_reader(input)?)
}

/// JSON has no infinity; non-finite errors travel as the strings `"inf"` /
/// `"-inf"` / `"nan"`.
pub(crate) mod float_or_inf {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("bad float `{other}`"))),
            },
        }
    }
}
