use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::CliError;

/// Seventeen significant digits: enough for any `f64` to round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// A float that serializes as a JSON number with seventeen significant digits.
/// Non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(fmt_f64(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// A complex value as a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub Complex64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [Num(self.0.re), Num(self.0.im)].serialize(s)
    }
}

pub fn nums(xs: &[f64]) -> Vec<Num> {
    xs.iter().copied().map(Num).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A document that can be written in either output format.
pub trait Render {
    fn json(&self) -> serde_json::Result<String>;
    fn csv_header(&self) -> &'static [&'static str];
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

/// Pretty-printed JSON of a serializable document.
pub fn to_json<T: Serialize>(doc: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(doc).map(|mut s| {
        s.push('\n');
        s
    })
}

fn write_csv<W: Write>(doc: &dyn Render, sink: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(doc.csv_header())?;
    for row in doc.csv_rows() {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `doc` to `out`, or to stdout when no path is given.
pub fn emit(doc: &dyn Render, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path).map_err(|e| CliError::Output(path.display().to_string(), e))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = io::BufWriter::new(sink);
    match format {
        Format::Json => sink.write_all(doc.json()?.as_bytes())?,
        Format::Csv => write_csv(doc, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}
