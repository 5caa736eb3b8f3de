//! File schemas: matrix and frame JSON, probability-table CSV.
//!
//! Floats are written as the shortest decimal that round-trips, so
//! `save(load(bytes))` reproduces bytes this module wrote.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{Hermitian, MinimalProjection};
use crate::matrix::Matrix;
use crate::tomo::{MeasurementFrame, ProbabilityTable};

/// `{"dim": n, "entries": [[re, im], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&Matrix<f64>> for MatrixJson {
    fn from(m: &Matrix<f64>) -> Self {
        Self {
            dim: m.dim(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for Matrix<f64> {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        Matrix::new(
            j.dim,
            j.entries
                .iter()
                .map(|&[re, im]| Complex::new(re, im))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameJson {
    pub n: usize,
    pub k: usize,
    pub measurements: Vec<Vec<MatrixJson>>,
}

fn syntax(what: &str, e: serde_json::Error) -> Error {
    Error::Schema(format!(
        "{what}: line {} column {}: {e}",
        e.line(),
        e.column()
    ))
}

pub fn parse_frame(bytes: &[u8]) -> Result<MeasurementFrame> {
    let raw: FrameJson = serde_json::from_slice(bytes).map_err(|e| syntax("frame", e))?;
    if raw.measurements.len() != raw.k {
        return Err(Error::Schema(format!(
            "k: declared {} but {} measurements present",
            raw.k,
            raw.measurements.len()
        )));
    }
    let mut measurements = Vec::with_capacity(raw.k);
    for (i, m) in raw.measurements.iter().enumerate() {
        if m.len() != raw.n {
            return Err(Error::Schema(format!(
                "measurements[{i}]: {} projections, expected n = {}",
                m.len(),
                raw.n
            )));
        }
        let mut row = Vec::with_capacity(raw.n);
        for (j, p) in m.iter().enumerate() {
            let field = |e: Error| Error::Schema(format!("measurements[{i}][{j}]: {e}"));
            if p.dim != raw.n {
                return Err(field(Error::DimensionMismatch {
                    left: raw.n,
                    right: p.dim,
                }));
            }
            let matrix = Matrix::try_from(p).map_err(field)?;
            let op = Hermitian::new(matrix).map_err(field)?;
            row.push(MinimalProjection::new(op).map_err(field)?);
        }
        measurements.push(row);
    }
    MeasurementFrame::new(measurements).map_err(|e| Error::Schema(format!("measurements: {e}")))
}

pub fn load_frame(path: &Path) -> Result<MeasurementFrame> {
    parse_frame(&std::fs::read(path)?)
}

pub fn frame_to_json(frame: &MeasurementFrame) -> FrameJson {
    FrameJson {
        n: frame.n(),
        k: frame.k(),
        measurements: frame
            .measurements()
            .iter()
            .map(|m| m.iter().map(|p| MatrixJson::from(p.matrix())).collect())
            .collect(),
    }
}

/// Pretty JSON followed by a newline.
pub fn serialize_frame(frame: &MeasurementFrame) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&frame_to_json(frame)).expect("frame serializes");
    out.push(b'\n');
    out
}

pub fn save_frame(frame: &MeasurementFrame, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, serialize_frame(frame))?)
}

/// k rows × n columns, no header.
pub fn parse_table(bytes: &[u8]) -> Result<ProbabilityTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Schema(format!("table row {i}: {e}")))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, s)| {
                s.parse::<f64>()
                    .map_err(|e| Error::Schema(format!("table row {i} column {j}: {s:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    ProbabilityTable::new(rows)
}

pub fn load_table(path: &Path) -> Result<ProbabilityTable> {
    parse_table(&std::fs::read(path)?)
}

pub fn serialize_table(table: &ProbabilityTable) -> Vec<u8> {
    let mut out = String::new();
    for row in table.rows() {
        let line: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn save_table(table: &ProbabilityTable, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, serialize_table(table))?)
}
