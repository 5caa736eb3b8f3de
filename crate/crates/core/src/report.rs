//! Report records emitted by every analysis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pauli::BlochVector;

/// Formats with 12 significant digits, then prints the shortest decimal that
/// round-trips the rounded value. Magnitudes outside [1e−4, 1e15) use
/// exponent notation.
pub fn fmt_sig(x: f64) -> String {
    let rounded = round_sig(x);
    let mag = rounded.abs();
    if rounded == 0.0 || !rounded.is_finite() || (1e-4..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
}

impl Check {
    /// Passes when `residual <= tol`.
    pub fn at_most(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            pass: residual <= tol,
            residual,
        }
    }

    pub fn new(name: impl Into<String>, pass: bool, residual: f64) -> Self {
        Self {
            name: name.into(),
            pass,
            residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub command: String,
    pub verdict: String,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub payload: BTreeMap<String, Value>,
    pub version: String,
}

impl RepresentationReport {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Self {
            command: command.into(),
            verdict: String::new(),
            checks: Vec::new(),
            seed,
            params: BTreeMap::new(),
            payload: BTreeMap::new(),
            version: crate::VERSION.to_string(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.payload.insert(key.to_string(), value.into());
        self
    }

    /// Scalar payload entry rounded to 12 significant digits.
    pub fn put_scalar(&mut self, key: &str, value: f64) -> &mut Self {
        self.put(key, scalar(value))
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

pub fn scalar(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn vector_value(v: BlochVector<f64>) -> Value {
    Value::Array(v.to_array().iter().map(|&x| scalar(x)).collect())
}

/// Matrix in the `{"dim": n, "entries": [[re, im], ...]}` schema, full precision.
pub fn matrix_value(m: &Matrix<f64>) -> Value {
    serde_json::to_value(crate::io::MatrixJson::from(m)).expect("matrix serializes")
}

/// Pretty JSON followed by a newline.
pub fn serialize_report(report: &RepresentationReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
    out.push(b'\n');
    out
}

pub fn parse_report(bytes: &[u8]) -> Result<RepresentationReport> {
    serde_json::from_slice(bytes).map_err(|e| {
        Error::Schema(format!(
            "report: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

/// Hex SHA-256 of the given bytes, used to tie a report to its input files.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
