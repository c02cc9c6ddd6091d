//! Number formatting, report emission and the error type shared by commands.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use thermo_recover::{ComplexMatrix, Error};

/// Significant digits for every float written to a report.
const DIGITS: usize = 12;

pub fn round(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounded JSON number; infinities and NaN become strings since JSON has no literal for them.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::from("nan")
    } else if x == f64::INFINITY {
        Value::from("inf")
    } else if x == f64::NEG_INFINITY {
        Value::from("-inf")
    } else {
        Value::from(round(x))
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// CSV cell with the same rounding.
pub fn cell(x: f64) -> String {
    match num(x) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    let n = m.nrows();
    let entries: Vec<Value> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| json!([num(m[(i, j)].re), num(m[(i, j)].im)]))
        .collect();
    json!({ "dim": n, "entries": entries })
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input of any kind; exit code 2.
    Invalid { kind: String, message: String },
    /// A bound or identity that should hold did not; exit code 1.
    Violation { message: String },
}

impl CliError {
    pub fn invalid(kind: &str, message: impl Into<String>) -> Self {
        CliError::Invalid { kind: kind.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::Violation { .. } => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Invalid { kind, message } => json!({ "error": kind, "message": message }),
            CliError::Violation { message } => json!({ "error": "bound_violation", "message": message }),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolation(message) => CliError::Violation { message },
            other => CliError::invalid(other.kind(), other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid("io", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid("json", format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::invalid("io", e.to_string());
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row).map_err(fail)?;
        }
        w.into_inner().map_err(|e| CliError::invalid("io", e.to_string()))
    }

    pub fn write_to(&self, path: &Path) -> CliResult<()> {
        write_file(path, &self.to_bytes()?)
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::invalid("io", format!("cannot write {}: {e}", path.display())))
}

pub fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s.into_bytes()
}

/// Writes to `out` when given, otherwise to stdout.
pub fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::invalid("io", e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(round(0.31326168751822286), 0.313261687518);
        assert_eq!(round(-1234567.891234567), -1234567.89123);
        assert_eq!(num(f64::INFINITY), Value::from("inf"));
        assert_eq!(cell(f64::NEG_INFINITY), "-inf");
        assert_eq!(cell(-0.0), "0.0");
    }
}
