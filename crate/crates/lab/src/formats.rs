//! File formats: generic result tables (CSV/JSON), POVM and instrument JSON,
//! sequential statistics JSON, pipeline traces and the tomography table layout.

use std::io::Write;
use std::path::Path;

use roi_core::hv::{Record, SecondSetting, SequentialStats};
use roi_core::photonic::{PipelineTrace, StageState};
use roi_core::states::Projector;
use roi_core::{BinaryPovm, CMatrix, Instrument, Outcome, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::{Format, StateSpec};
use crate::error::{LabError, Result};
use crate::quantities::TomographySource;

/// `x` with `digits` significant digits in positional notation.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x.abs() < 1e-14 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
    Int(u64),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => sig(*v, 12),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Int(i) => json!(i),
            Cell::Empty => Value::Null,
        }
    }
}

/// Rows of named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| LabError::Format(e.to_string());
        w.write_record(&self.columns).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Format(e.to_string()))
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json_value()),
        }
    }
}

pub fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| LabError::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| LabError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| LabError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| LabError::io(path, e))?;
    tmp.persist(path).map_err(|e| LabError::io(path, e.error))?;
    Ok(())
}

/// Square complex matrix as rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(LabError::Format("matrix must be square and non-empty".into()));
    }
    let data = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    Ok(CMatrix::from_vec(n, data)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub plus: MatrixJson,
    pub minus: MatrixJson,
}

impl PovmJson {
    pub fn from_povm(p: &BinaryPovm) -> Self {
        Self {
            plus: matrix_to_json(p.plus()),
            minus: matrix_to_json(p.minus()),
        }
    }

    pub fn to_povm(&self) -> Result<BinaryPovm> {
        Ok(BinaryPovm::new(matrix_from_json(&self.plus)?, matrix_from_json(&self.minus)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstrumentJson {
    /// Kraus operators of outcome `+1`.
    pub plus: Vec<MatrixJson>,
    pub minus: Vec<MatrixJson>,
}

impl InstrumentJson {
    pub fn from_instrument(instr: &Instrument) -> Self {
        let side = |a| instr.kraus(a).iter().map(matrix_to_json).collect();
        Self {
            plus: side(Outcome::Plus),
            minus: side(Outcome::Minus),
        }
    }

    pub fn to_instrument(&self) -> Result<Instrument> {
        let side = |ks: &Vec<MatrixJson>| ks.iter().map(matrix_from_json).collect::<Result<Vec<_>>>();
        Ok(Instrument::new(side(&self.plus)?, side(&self.minus)?)?)
    }
}

pub fn read_povm(path: &Path) -> Result<BinaryPovm> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let j: PovmJson = serde_json::from_str(&text).map_err(|e| LabError::Format(format!("{}: {e}", path.display())))?;
    j.to_povm()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordJson {
    pub a: String,
    pub b: String,
    pub x: String,
    pub y: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsJson {
    pub first_settings: Vec<String>,
    pub second_settings: Vec<String>,
    pub records: Vec<RecordJson>,
}

impl StatsJson {
    pub fn from_stats(s: &SequentialStats) -> Self {
        Self {
            first_settings: s.first_settings().to_vec(),
            second_settings: s.second_settings().to_vec(),
            records: s
                .records()
                .into_iter()
                .map(|r| RecordJson {
                    a: r.a.label().into(),
                    b: r.b.label().into(),
                    x: r.x,
                    y: r.y.to_string(),
                    p: r.p,
                })
                .collect(),
        }
    }

    pub fn to_stats(&self) -> Result<SequentialStats> {
        let records = self
            .records
            .iter()
            .map(|r| {
                Ok(Record {
                    a: Outcome::parse(&r.a)?,
                    b: Outcome::parse(&r.b)?,
                    x: r.x.clone(),
                    y: SecondSetting::parse(&r.y),
                    p: r.p,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SequentialStats::from_records(&records)?)
    }
}

pub fn trace_to_json(trace: &PipelineTrace) -> Value {
    let stages: Vec<Value> = trace
        .stages
        .iter()
        .map(|s| {
            let kind = match s.state {
                StageState::Polarization(_) => "polarization",
                StageState::PathPolarization(_) => "path_polarization",
            };
            let amps: Vec<[f64; 2]> = s.state.amplitudes().iter().map(|z| [z.re, z.im]).collect();
            json!({ "label": s.label, "kind": kind, "norm_sqr": s.state.norm_sqr(), "amplitudes": amps })
        })
        .collect();
    json!({ "gamma": trace.gamma, "phi": trace.phi, "stages": stages })
}

/// Tomography table in the printed layout: one row per projector, one column
/// per (state, first outcome).
pub fn tomography_table(src: &dyn TomographySource, gamma: f64, states: &[StateSpec]) -> Result<Table> {
    let mut columns = vec!["projector".to_string()];
    for s in states {
        for a in Outcome::BOTH {
            columns.push(format!("{} {}", s.name(), a.label()));
        }
    }
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    for p in Projector::ALL {
        let mut row = vec![Cell::from(p.label())];
        for s in states {
            for a in Outcome::BOTH {
                row.push(Cell::Num(src.prob(s, gamma, a, p)?));
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use roi_core::measurements::noisy_z;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(1.171572875253809, 12), "1.17157287525");
        assert_eq!(sig(0.4267766952966369, 12), "0.426776695297");
        assert_eq!(sig(0.0, 12), "0");
        assert_eq!(sig(-2.5, 3), "-2.50");
    }

    #[test]
    fn povm_round_trip() {
        let p = noisy_z(0.3).unwrap();
        let text = serde_json::to_string(&PovmJson::from_povm(&p)).unwrap();
        let back: PovmJson = serde_json::from_str(&text).unwrap();
        assert!(back.to_povm().unwrap().distance(&p) < 1e-12);
    }

    #[test]
    fn instrument_round_trip() {
        let instr = Instrument::lueders(&noisy_z(0.3).unwrap()).unwrap();
        let text = serde_json::to_string(&InstrumentJson::from_instrument(&instr)).unwrap();
        let back: InstrumentJson = serde_json::from_str(&text).unwrap();
        let back = back.to_instrument().unwrap();
        for a in Outcome::BOTH {
            assert!(back.kraus(a)[0].distance(&instr.kraus(a)[0]) < 1e-12);
        }
    }

    #[test]
    fn malformed_matrix() {
        assert!(matrix_from_json(&vec![vec![[1.0, 0.0]], vec![]]).is_err());
    }
}
