//! Transcribed experimental tables shipped as CSV under `data/`.
//!
//! Each file has `#` provenance lines followed by the header
//! `quantity,state,branch,theory,experiment`. Values may be decimals or
//! fractions such as `3/8`, exactly as printed.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use roi_core::states::{CanonicalState, Projector};
use roi_core::Outcome;
use serde::Deserialize;

use crate::error::{LabError, Result};
use crate::quantities::{CellTable, Quantity};

/// Environment variable overriding `--data-dir`.
pub const DATA_ENV: &str = "ROI_LAB_DATA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dataset {
    Gamma0,
    GammaPi8,
    GammaPi4,
    Variances,
    Retrieving,
    NoRetrieving,
    W2Sum,
    Correlation,
}

impl Dataset {
    pub const ALL: [Dataset; 8] = [
        Dataset::Gamma0,
        Dataset::GammaPi8,
        Dataset::GammaPi4,
        Dataset::Variances,
        Dataset::Retrieving,
        Dataset::NoRetrieving,
        Dataset::W2Sum,
        Dataset::Correlation,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Dataset::Gamma0 => "gamma0",
            Dataset::GammaPi8 => "gamma_pi8",
            Dataset::GammaPi4 => "gamma_pi4",
            Dataset::Variances => "variances",
            Dataset::Retrieving => "retrieving",
            Dataset::NoRetrieving => "no_retrieving",
            Dataset::W2Sum => "w2_sum",
            Dataset::Correlation => "correlation",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.id())
    }

    /// Angle of the first measurement the table refers to.
    pub fn gamma(self) -> f64 {
        match self {
            Dataset::Gamma0 => 0.0,
            Dataset::GammaPi4 => FRAC_PI_4,
            _ => FRAC_PI_8,
        }
    }

    pub fn is_tomography(self) -> bool {
        matches!(self, Dataset::Gamma0 | Dataset::GammaPi8 | Dataset::GammaPi4)
    }
}

impl FromStr for Dataset {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.id() == s)
            .ok_or_else(|| LabError::UnknownDataset(s.to_string()))
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataRow {
    pub quantity: String,
    pub state: CanonicalState,
    pub branch: Option<Outcome>,
    pub theory: f64,
    pub experiment: f64,
}

impl DataRow {
    pub fn label(&self) -> String {
        match self.branch {
            Some(b) => format!("{} {} {}", self.quantity, self.state, b.label()),
            None => format!("{} {}", self.quantity, self.state),
        }
    }

    pub fn quantity_at(&self, gamma: f64) -> Result<Quantity> {
        Quantity::from_label(&self.quantity, self.branch, gamma)
    }
}

#[derive(Debug, Deserialize)]
struct RawRow {
    quantity: String,
    state: String,
    branch: String,
    theory: String,
    experiment: String,
}

/// Decimal or `n/d`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim().parse::<f64>().ok()?, d.trim().parse::<f64>().ok()?);
            (d != 0.0).then_some(n / d)
        }
        None => s.parse().ok(),
    }
}

/// `ROI_LAB_DATA` if set, then `flag`, then the directory shipped with the crate.
pub fn resolve_data_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(env) = std::env::var_os(DATA_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(env);
    }
    flag.map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")))
}

pub fn load(dataset: Dataset, dir: &Path) -> Result<Vec<DataRow>> {
    let path = dir.join(dataset.file_name());
    let file = std::fs::File::open(&path).map_err(|e| LabError::io(&path, e))?;
    let malformed = |message: String| LabError::Dataset {
        path: path.clone(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(file);
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<RawRow>().enumerate() {
        let raw = rec.map_err(|e| malformed(e.to_string()))?;
        let number = |what: &str, v: &str| {
            parse_number(v).ok_or_else(|| malformed(format!("record {}: bad {what} value {v:?}", i + 1)))
        };
        let state = CanonicalState::from_name(&raw.state)
            .ok_or_else(|| malformed(format!("record {}: unknown state {:?}", i + 1, raw.state)))?;
        let branch = match raw.branch.as_str() {
            "" => None,
            b => Some(Outcome::parse(b).map_err(|e| malformed(format!("record {}: {e}", i + 1)))?),
        };
        rows.push(DataRow {
            theory: number("theory", &raw.theory)?,
            experiment: number("experiment", &raw.experiment)?,
            quantity: raw.quantity,
            state,
            branch,
        });
    }
    if rows.is_empty() {
        return Err(malformed("no records".into()));
    }
    Ok(rows)
}

/// Experimental tomography cells of the three angle tables.
pub fn experimental_cells(dir: &Path) -> Result<CellTable> {
    let mut cells = CellTable::default();
    for ds in [Dataset::Gamma0, Dataset::GammaPi8, Dataset::GammaPi4] {
        for row in load(ds, dir)? {
            let projector = Projector::from_label(&row.quantity).ok_or_else(|| LabError::Dataset {
                path: dir.join(ds.file_name()),
                message: format!("unknown projector {:?}", row.quantity),
            })?;
            let branch = row.branch.ok_or_else(|| LabError::Dataset {
                path: dir.join(ds.file_name()),
                message: format!("row {} lacks a branch", row.label()),
            })?;
            cells.insert(row.state.name(), ds.gamma(), branch, projector, row.experiment);
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("3/8"), Some(0.375));
        assert_eq!(parse_number("-1/3"), Some(-1.0 / 3.0));
        assert_eq!(parse_number("0.427"), Some(0.427));
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number("x"), None);
    }

    #[test]
    fn unknown_dataset() {
        assert!(matches!("gamma_pi16".parse::<Dataset>(), Err(LabError::UnknownDataset(_))));
    }
}
