//! Theory, simulation and the transcribed experimental values side by side.

use std::path::Path;

use crate::config::StateSpec;
use crate::datasets::{self, DataRow, Dataset};
use crate::error::{LabError, Result};
use crate::quantities::{CellTable, Theory, TomographySource};

/// Largest accepted `|theory − experiment|`.
pub const PAPER_SPREAD: f64 = 0.05;

/// Printed theory values are rounded to three decimals.
pub const SHIPPED_THEORY_TOL: f64 = 5e-4;

/// One computed value of a run, keyed by the dataset row label.
#[derive(Debug, Clone, PartialEq)]
pub struct RunValue {
    pub label: String,
    pub theory: f64,
    pub simulated: Option<f64>,
    /// Recomputed from the experimental tomography cells, when available.
    pub derived_experimental: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub dataset: Dataset,
    pub label: String,
    pub theory: f64,
    pub shipped_theory: f64,
    pub simulated: Option<f64>,
    pub derived_experimental: Option<f64>,
    pub paper_experimental: f64,
    /// `|theory − paper_experimental|`.
    pub abs_dev_theory: f64,
    /// `|simulated − paper_experimental|`.
    pub abs_dev_paper: Option<f64>,
}

impl ComparisonRow {
    pub fn theory_mismatch(&self) -> f64 {
        (self.theory - self.shipped_theory).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    /// Max of `abs_dev_theory`.
    pub worst_dev: f64,
    pub worst_label: String,
    /// Max of `|theory − shipped theory|`.
    pub worst_theory_mismatch: f64,
}

impl ComparisonReport {
    fn from_rows(rows: Vec<ComparisonRow>) -> Result<Self> {
        let worst = rows
            .iter()
            .max_by(|a, b| a.abs_dev_theory.total_cmp(&b.abs_dev_theory))
            .ok_or(LabError::EmptyRun)?;
        let worst_dev = worst.abs_dev_theory;
        let worst_label = format!("{}: {}", worst.dataset, worst.label);
        let worst_theory_mismatch = rows.iter().map(ComparisonRow::theory_mismatch).fold(0.0, f64::max);
        Ok(Self {
            rows,
            worst_dev,
            worst_label,
            worst_theory_mismatch,
        })
    }

    pub fn theory_reproduced(&self) -> bool {
        self.worst_theory_mismatch <= SHIPPED_THEORY_TOL
    }

    /// Theory matches the printed values and every experimental value is
    /// within the spread.
    pub fn pass(&self) -> bool {
        self.theory_reproduced() && self.worst_dev <= PAPER_SPREAD
    }

    pub fn failing_rows(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| r.abs_dev_theory > PAPER_SPREAD)
    }

    pub fn merge(reports: Vec<ComparisonReport>) -> Result<Self> {
        Self::from_rows(reports.into_iter().flat_map(|r| r.rows).collect())
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} rows, worst |theory - experiment| = {:.3} ({}), worst theory mismatch = {:.1e}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.rows.len(),
            self.worst_dev,
            self.worst_label,
            self.worst_theory_mismatch
        )
    }
}

/// Computes every row of `dataset`: theory always, simulation from `simulated`
/// cells and the recomputed experimental value from `experimental` cells.
pub fn evaluate_dataset(
    dataset: Dataset,
    rows: &[DataRow],
    simulated: Option<&CellTable>,
    experimental: Option<&CellTable>,
) -> Result<Vec<RunValue>> {
    rows.iter()
        .map(|row| {
            let q = row.quantity_at(dataset.gamma())?;
            let state = StateSpec::Named(row.state);
            let via = |src: Option<&CellTable>| -> Result<Option<f64>> {
                src.map(|s| q.eval(s as &dyn TomographySource, &state)).transpose()
            };
            Ok(RunValue {
                label: row.label(),
                theory: q.eval(&Theory, &state)?,
                simulated: via(simulated)?,
                derived_experimental: via(experimental).ok().flatten(),
            })
        })
        .collect()
}

/// Matches run values to the dataset rows by label.
pub fn compare_to_paper(run: &[RunValue], dataset: Dataset, rows: &[DataRow]) -> Result<ComparisonReport> {
    if run.is_empty() {
        return Err(LabError::EmptyRun);
    }
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let label = row.label();
        let v = run
            .iter()
            .find(|v| v.label == label)
            .ok_or_else(|| LabError::Config(format!("run has no value for {dataset} row {label}")))?;
        out.push(ComparisonRow {
            dataset,
            label,
            theory: v.theory,
            shipped_theory: row.theory,
            simulated: v.simulated,
            derived_experimental: v.derived_experimental,
            paper_experimental: row.experiment,
            abs_dev_theory: (v.theory - row.experiment).abs(),
            abs_dev_paper: v.simulated.map(|s| (s - row.experiment).abs()),
        });
    }
    ComparisonReport::from_rows(out)
}

/// Loads, evaluates and compares one dataset.
pub fn compare_dataset(dataset: Dataset, dir: &Path, simulated: Option<&CellTable>) -> Result<ComparisonReport> {
    let rows = datasets::load(dataset, dir)?;
    let experimental = datasets::experimental_cells(dir).ok();
    let run = evaluate_dataset(dataset, &rows, simulated, experimental.as_ref())?;
    compare_to_paper(&run, dataset, &rows)
}

/// All shipped datasets in one report.
pub fn compare_all(dir: &Path, simulated: Option<&CellTable>) -> Result<ComparisonReport> {
    let reports = Dataset::ALL
        .into_iter()
        .map(|d| compare_dataset(d, dir, simulated))
        .collect::<Result<Vec<_>>>()?;
    ComparisonReport::merge(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use roi_core::states::CanonicalState;
    use roi_core::Outcome;

    fn row() -> DataRow {
        DataRow {
            quantity: "X+".into(),
            state: CanonicalState::H,
            branch: Some(Outcome::Plus),
            theory: 0.427,
            experiment: 0.417,
        }
    }

    #[test]
    fn single_row_pass() {
        let rows = vec![row()];
        let run = evaluate_dataset(Dataset::GammaPi8, &rows, None, None).unwrap();
        let report = compare_to_paper(&run, Dataset::GammaPi8, &rows).unwrap();
        assert!(report.pass());
        assert!((report.rows[0].abs_dev_theory - 0.0098).abs() < 1e-3);
    }

    #[test]
    fn empty_run_is_an_error() {
        assert!(matches!(
            compare_to_paper(&[], Dataset::GammaPi8, &[row()]),
            Err(LabError::EmptyRun)
        ));
    }

    #[test]
    fn missing_label_is_an_error() {
        let run = vec![RunValue {
            label: "other".into(),
            theory: 0.0,
            simulated: None,
            derived_experimental: None,
        }];
        assert!(compare_to_paper(&run, Dataset::GammaPi8, &[row()]).is_err());
    }
}
