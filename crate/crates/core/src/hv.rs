//! Hidden-variable conditions on sequential probability tables, and the two
//! constructions that turn a macrorealist model satisfying retrievability into
//! a quantum one and back.
//!
//! A table entry `p(a, b | x, y)` is the probability of outcome `a` of the first
//! setting `x` and `b` of the second setting `y`. The first setting `"0"` means
//! "nothing measured" and is stored as the instrument `ρ ↦ ½ρ` per outcome, so
//! every entry has the same 2×2 layout.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{herm_eig, trace_pairing, validate_state, CMatrix};
use crate::math;
use crate::measurements::{BinaryPovm, Instrument, JointPovm, Outcome};
use crate::tol;
use crate::{Error, Result};

/// Label of the "no first measurement" setting.
pub const NO_MEASUREMENT: &str = "0";

/// Probability block `p[a][b]`, indexed by [`Outcome::index`].
pub type Block = [[f64; 2]; 2];

/// Second setting, possibly chosen according to the first outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SecondSetting {
    pub by_outcome: [String; 2],
}

impl SecondSetting {
    pub fn fixed(label: &str) -> Self {
        Self {
            by_outcome: [label.to_string(), label.to_string()],
        }
    }

    pub fn adaptive(plus: &str, minus: &str) -> Self {
        Self {
            by_outcome: [plus.to_string(), minus.to_string()],
        }
    }

    pub fn is_adaptive(&self) -> bool {
        self.by_outcome[0] != self.by_outcome[1]
    }

    pub fn for_outcome(&self, a: Outcome) -> &str {
        &self.by_outcome[a.index()]
    }

    /// Inverse of `Display`: `"y"` or `"y+|y-"`.
    pub fn parse(s: &str) -> Self {
        match s.split_once('|') {
            Some((p, m)) => Self::adaptive(p, m),
            None => Self::fixed(s),
        }
    }
}

impl fmt::Display for SecondSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_adaptive() {
            write!(f, "{}|{}", self.by_outcome[0], self.by_outcome[1])
        } else {
            f.write_str(&self.by_outcome[0])
        }
    }
}

fn check_block(x: &str, y: &SecondSetting, block: &Block) -> Result<()> {
    let mut sum = 0.0;
    for row in block {
        for &p in row {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidStats(alloc::format!(
                    "p = {p} outside [0, 1] at ({x}, {y})"
                )));
            }
            sum += p;
        }
    }
    if math::abs(sum - 1.0) > tol::PROBABILITY_SUM {
        return Err(Error::InvalidStats(alloc::format!(
            "block ({x}, {y}) sums to {sum}"
        )));
    }
    if x == NO_MEASUREMENT {
        for (p, m) in block[0].iter().zip(&block[1]) {
            if math::abs(p - m) > tol::PROBABILITY_SUM {
                return Err(Error::InvalidStats(alloc::format!(
                    "unmeasured first setting must split outcomes evenly, got {p} vs {m}"
                )));
            }
        }
    }
    Ok(())
}

/// Table of `p(a, b | x, y)` over the settings that were run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequentialStats {
    first_settings: Vec<String>,
    second_settings: Vec<String>,
    table: BTreeMap<(String, SecondSetting), Block>,
}

/// One `{a, b, x, y, p}` record of the flat table view.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub a: Outcome,
    pub b: Outcome,
    pub x: String,
    pub y: SecondSetting,
    pub p: f64,
}

impl SequentialStats {
    pub fn new() -> Self {
        Self {
            first_settings: alloc::vec![NO_MEASUREMENT.to_string()],
            ..Self::default()
        }
    }

    /// Adds or replaces the block for `(x, y)`.
    pub fn insert(&mut self, x: &str, y: SecondSetting, block: Block) -> Result<()> {
        check_block(x, &y, &block)?;
        if !self.first_settings.iter().any(|s| s == x) {
            self.first_settings.push(x.to_string());
        }
        for label in &y.by_outcome {
            if !self.second_settings.contains(label) {
                self.second_settings.push(label.clone());
            }
        }
        self.table.insert((x.to_string(), y), block);
        Ok(())
    }

    /// Quantum block for `x` realised by `instr`, followed by `finals[a]` after outcome `a`.
    pub fn insert_quantum(
        &mut self,
        rho: &CMatrix,
        x: &str,
        instr: &Instrument,
        y: SecondSetting,
        finals: [&BinaryPovm; 2],
    ) -> Result<()> {
        self.insert(x, y, quantum_sequential_table(rho, instr, finals)?)
    }

    /// Adds `p(a, b | 0, y) = ½ tr[F_b ρ]`.
    pub fn insert_unmeasured(&mut self, rho: &CMatrix, y: &str, last: &BinaryPovm) -> Result<()> {
        let instr = Instrument::no_measurement(rho.dim());
        self.insert_quantum(rho, NO_MEASUREMENT, &instr, SecondSetting::fixed(y), [last, last])
    }

    pub fn first_settings(&self) -> &[String] {
        &self.first_settings
    }

    pub fn second_settings(&self) -> &[String] {
        &self.second_settings
    }

    pub fn get(&self, x: &str, y: &SecondSetting) -> Result<&Block> {
        self.table
            .get(&(x.to_string(), y.clone()))
            .ok_or_else(|| Error::MissingSetting {
                x: x.to_string(),
                y: y.to_string(),
            })
    }

    pub fn p(&self, a: Outcome, b: Outcome, x: &str, y: &SecondSetting) -> Result<f64> {
        Ok(self.get(x, y)?[a.index()][b.index()])
    }

    /// Second-outcome marginal `Σ_a p(a, b | x, y)`.
    pub fn second_marginal(&self, x: &str, y: &SecondSetting) -> Result<[f64; 2]> {
        let block = self.get(x, y)?;
        Ok([block[0][0] + block[1][0], block[0][1] + block[1][1]])
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&str, &SecondSetting, &Block)> {
        self.table.iter().map(|((x, y), b)| (x.as_str(), y, b))
    }

    pub fn records(&self) -> Vec<Record> {
        let mut out = Vec::with_capacity(4 * self.table.len());
        for (x, y, block) in self.blocks() {
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    out.push(Record {
                        a,
                        b,
                        x: x.to_string(),
                        y: y.clone(),
                        p: block[a.index()][b.index()],
                    });
                }
            }
        }
        out
    }

    /// Rebuilds a table from flat records; every block must be complete.
    pub fn from_records(records: &[Record]) -> Result<Self> {
        let mut partial: BTreeMap<(String, SecondSetting), [[Option<f64>; 2]; 2]> = BTreeMap::new();
        for r in records {
            let cell = &mut partial.entry((r.x.clone(), r.y.clone())).or_default()[r.a.index()][r.b.index()];
            if cell.is_some() {
                return Err(Error::InvalidStats(alloc::format!(
                    "duplicate record ({}, {}, {}, {})",
                    r.a.label(),
                    r.b.label(),
                    r.x,
                    r.y
                )));
            }
            *cell = Some(r.p);
        }
        let mut stats = Self::new();
        for ((x, y), cells) in partial {
            let mut block = [[0.0; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    block[a][b] = cells[a][b].ok_or_else(|| {
                        Error::InvalidStats(alloc::format!("incomplete block ({x}, {y})"))
                    })?;
                }
            }
            stats.insert(&x, y, block)?;
        }
        Ok(stats)
    }
}

/// `p(a, b) = tr[I_a(ρ) F^{(a)}_b]` for an instrument followed by an
/// outcome-dependent final measurement.
pub fn quantum_sequential_table(rho: &CMatrix, instr: &Instrument, finals: [&BinaryPovm; 2]) -> Result<Block> {
    validate_state(rho)?;
    let mut block = [[0.0; 2]; 2];
    for a in Outcome::BOTH {
        let post = instr.apply(a, rho)?;
        for b in Outcome::BOTH {
            let f = finals[a.index()].effect(b);
            if f.dim() != post.dim() {
                return Err(Error::DimensionMismatch {
                    left: post.dim(),
                    right: f.dim(),
                });
            }
            block[a.index()][b.index()] = trace_pairing(f, &post).clamp(0.0, 1.0);
        }
    }
    Ok(block)
}

/// Outcome of an NSIT or RoI comparison between two second-outcome marginals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    /// `max_b |gap_b|`.
    pub max_violation: f64,
    /// The `b` attaining the maximum.
    pub argmax: Outcome,
    /// `measured − unmeasured` at `argmax`.
    pub signed_gap: f64,
}

fn compare_marginals(measured: [f64; 2], unmeasured: [f64; 2], tol: f64) -> ConditionReport {
    let gaps = [measured[0] - unmeasured[0], measured[1] - unmeasured[1]];
    let i = if math::abs(gaps[1]) > math::abs(gaps[0]) { 1 } else { 0 };
    let max_violation = math::abs(gaps[i]);
    ConditionReport {
        holds: max_violation <= tol,
        max_violation,
        argmax: Outcome::from_index(i),
        signed_gap: gaps[i],
    }
}

/// No-signalling in time from `x` to the fixed second setting `y`:
/// `Σ_a p(a, b | x, y) = p(b | y)`.
pub fn check_nsit(stats: &SequentialStats, x: &str, y: &str, tol: f64) -> Result<ConditionReport> {
    let y = SecondSetting::fixed(y);
    let measured = stats.second_marginal(x, &y)?;
    let unmeasured = stats.second_marginal(NO_MEASUREMENT, &y)?;
    Ok(compare_marginals(measured, unmeasured, tol))
}

/// Retrievability: the unmeasured statistics of `y` are reproduced on average
/// by measuring `x` and then `y_a`.
pub fn check_roi(stats: &SequentialStats, x: &str, y_a: &SecondSetting, y: &str, tol: f64) -> Result<ConditionReport> {
    let unmeasured = stats.second_marginal(NO_MEASUREMENT, &SecondSetting::fixed(y))?;
    let measured = stats.second_marginal(x, y_a)?;
    Ok(compare_marginals(measured, unmeasured, tol))
}

/// Finite hidden-variable model for one first setting `x`, its adaptive second
/// setting `y_a` and the reference setting `y` measured without `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct HvModel {
    pub x: String,
    pub y_a: SecondSetting,
    pub y: String,
    /// `p(λ)`.
    pub weights: Vec<f64>,
    /// `p(a, b | x, y_a, λ)`.
    pub sequential: Vec<Block>,
    /// `p(b | 0, y, λ)`.
    pub unmeasured: Vec<[f64; 2]>,
}

fn normalise<const N: usize>(what: &str, lambda: usize, values: [f64; N]) -> Result<[f64; N]> {
    let mut sum = 0.0;
    for &p in &values {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidModel(alloc::format!(
                "{what} for lambda {lambda} has entry {p} outside [0, 1]"
            )));
        }
        sum += p;
    }
    if math::abs(sum - 1.0) > tol::PROBABILITY_SUM {
        return Err(Error::InvalidModel(alloc::format!(
            "{what} for lambda {lambda} sums to {sum}"
        )));
    }
    Ok(values.map(|p| p / sum))
}

impl HvModel {
    /// Validates weights and responses (sums to 1 within 1e-9) and renormalises
    /// them exactly.
    pub fn new(
        x: &str,
        y_a: SecondSetting,
        y: &str,
        weights: Vec<f64>,
        sequential: Vec<Block>,
        unmeasured: Vec<[f64; 2]>,
    ) -> Result<Self> {
        let n = weights.len();
        if n == 0 || sequential.len() != n || unmeasured.len() != n {
            return Err(Error::InvalidModel(alloc::format!(
                "support sizes differ: {} weights, {} sequential, {} unmeasured",
                n,
                sequential.len(),
                unmeasured.len()
            )));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) || math::abs(total - 1.0) > tol::PROBABILITY_SUM {
            return Err(Error::InvalidModel(alloc::format!("weights sum to {total}")));
        }
        let weights = weights.iter().map(|w| w / total).collect();
        let sequential = sequential
            .into_iter()
            .enumerate()
            .map(|(l, blk)| {
                let flat = normalise("sequential response", l, [blk[0][0], blk[0][1], blk[1][0], blk[1][1]])?;
                Ok([[flat[0], flat[1]], [flat[2], flat[3]]])
            })
            .collect::<Result<Vec<_>>>()?;
        let unmeasured = unmeasured
            .into_iter()
            .enumerate()
            .map(|(l, r)| normalise("unmeasured response", l, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            x: x.to_string(),
            y_a,
            y: y.to_string(),
            weights,
            sequential,
            unmeasured,
        })
    }

    pub fn support(&self) -> usize {
        self.weights.len()
    }

    /// `Σ_λ p(λ) p(a, b | x, y_a, λ)`.
    pub fn sequential_block(&self) -> Block {
        let mut out = [[0.0; 2]; 2];
        for (w, blk) in self.weights.iter().zip(&self.sequential) {
            for a in 0..2 {
                for b in 0..2 {
                    out[a][b] += w * blk[a][b];
                }
            }
        }
        out
    }

    /// `Σ_λ p(λ) p(b | 0, y, λ)`.
    pub fn unmeasured_marginal(&self) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (w, r) in self.weights.iter().zip(&self.unmeasured) {
            out[0] += w * r[0];
            out[1] += w * r[1];
        }
        out
    }

    /// The table this model predicts, decomposed over `λ` as macrorealism requires.
    pub fn predictions(&self) -> Result<SequentialStats> {
        let mut stats = SequentialStats::new();
        stats.insert(&self.x, self.y_a.clone(), self.sequential_block())?;
        let u = self.unmeasured_marginal();
        stats.insert(
            NO_MEASUREMENT,
            SecondSetting::fixed(&self.y),
            [[0.5 * u[0], 0.5 * u[1]], [0.5 * u[0], 0.5 * u[1]]],
        )?;
        Ok(stats)
    }

    /// `max_b |Σ_{a,λ} p(λ)p(a,b|x,y_a,λ) − Σ_λ p(λ)p(b|0,y,λ)|`.
    pub fn roi_gap(&self) -> f64 {
        let s = self.sequential_block();
        let u = self.unmeasured_marginal();
        (0..2)
            .map(|b| math::abs(s[0][b] + s[1][b] - u[b]))
            .fold(0.0, f64::max)
    }

    /// Largest per-`λ` retrievability defect `|Σ_a p(a,b|x,y_a,λ) − p(b|0,y,λ)|`.
    pub fn pointwise_roi_gap(&self) -> f64 {
        self.sequential
            .iter()
            .zip(&self.unmeasured)
            .flat_map(|(s, u)| (0..2).map(move |b| math::abs(s[0][b] + s[1][b] - u[b])))
            .fold(0.0, f64::max)
    }
}

/// Diagonal quantum realisation of a hidden-variable model.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRealisation {
    /// `Σ_λ p(λ)|λ⟩⟨λ|`.
    pub state: CMatrix,
    /// `G_{a,b} = Σ_λ p(a,b|x,y_a,λ)|λ⟩⟨λ|`.
    pub joint: JointPovm,
    /// `B_b = Σ_λ p(b|0,y,λ)|λ⟩⟨λ|`.
    pub unmeasured: BinaryPovm,
    /// `max_b ‖Σ_a G_{a,b} − B_b‖_F`.
    pub margin_defect: f64,
}

/// Builds the diagonal state and commuting observables of a model whose
/// retrievability premise holds for every `λ`.
pub fn classical_to_quantum(model: &HvModel) -> Result<QuantumRealisation> {
    let gap = model.pointwise_roi_gap();
    if gap > tol::PROBABILITY_SUM {
        return Err(Error::InvalidModel(alloc::format!(
            "retrievability premise fails pointwise (gap {gap:.3e})"
        )));
    }
    let avg = model.roi_gap();
    if avg > tol::PROBABILITY_SUM {
        return Err(Error::InvalidModel(alloc::format!(
            "retrievability premise fails on average (gap {avg:.3e})"
        )));
    }
    let state = CMatrix::diag(&model.weights);
    let column = |f: &dyn Fn(usize) -> f64| -> CMatrix {
        CMatrix::diag(&(0..model.support()).map(f).collect::<Vec<_>>())
    };
    let effects = [0, 1].map(|a| [0, 1].map(|b| column(&|l| model.sequential[l][a][b])));
    let joint = JointPovm::with_tolerance(effects, tol::PROBABILITY_SUM)?;
    let unmeasured = BinaryPovm::new(column(&|l| model.unmeasured[l][0]), column(&|l| model.unmeasured[l][1]))?;
    let margin_defect = Outcome::BOTH
        .into_iter()
        .map(|b| {
            let sum = joint.effect(Outcome::Plus, b) + joint.effect(Outcome::Minus, b);
            sum.distance(unmeasured.effect(b))
        })
        .fold(0.0, f64::max);
    Ok(QuantumRealisation {
        state,
        joint,
        unmeasured,
        margin_defect,
    })
}

/// Hidden-variable model read off the eigenbasis of `rho`: `p(λ)` are the
/// eigenvalues, `p(a,b|x,y_a,λ) = ⟨λ|I_a*(B̃_b)|λ⟩` and `p(b|0,y,λ) = ⟨λ|B_b|λ⟩`
/// with `B_b = Σ_a I_a*(B̃_b)` the second margin.
pub fn quantum_to_classical(rho: &CMatrix, instr: &Instrument, retrieving: &BinaryPovm) -> Result<HvModel> {
    quantum_to_classical_adaptive(rho, instr, [retrieving, retrieving])
}

/// As [`quantum_to_classical`] with a retrieving measurement chosen by the first outcome.
pub fn quantum_to_classical_adaptive(rho: &CMatrix, instr: &Instrument, retrieving: [&BinaryPovm; 2]) -> Result<HvModel> {
    let eig = validate_state(rho)?;
    let d = rho.dim();
    if instr.dim() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: instr.dim(),
        });
    }
    let mut g = [[CMatrix::zeros(d), CMatrix::zeros(d)], [CMatrix::zeros(d), CMatrix::zeros(d)]];
    for a in Outcome::BOTH {
        for b in Outcome::BOTH {
            g[a.index()][b.index()] = instr.heisenberg(a, retrieving[a.index()].effect(b))?;
        }
    }
    let diag = |m: &CMatrix, v: &[crate::C64]| m.expectation(v).re.clamp(0.0, 1.0);
    let mut sequential = Vec::with_capacity(d);
    let mut unmeasured = Vec::with_capacity(d);
    for v in &eig.eigenvectors {
        let mut blk = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                blk[a][b] = diag(&g[a][b], v);
            }
        }
        // Second margin is evaluated from the operator sum so that the
        // per-λ identity holds to rounding.
        let margin = [0, 1].map(|b| diag(&(&g[0][b] + &g[1][b]), v));
        sequential.push(blk);
        unmeasured.push(margin);
    }
    let weights: Vec<f64> = eig.eigenvalues.iter().map(|w| w.max(0.0)).collect();
    let y_a = if core::ptr::eq(retrieving[0], retrieving[1]) {
        SecondSetting::fixed("retrieving")
    } else {
        SecondSetting::adaptive("retrieving+", "retrieving-")
    };
    HvModel::new("instrument", y_a, "margin", weights, sequential, unmeasured)
}

/// Eigen-decomposes `m` and reports whether it is diagonal in the computational
/// basis to `tol`; used to sanity-check diagonal realisations.
pub fn is_diagonal(m: &CMatrix, tol: f64) -> bool {
    let n = m.dim();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() <= tol)) && herm_eig(m).is_ok()
}
