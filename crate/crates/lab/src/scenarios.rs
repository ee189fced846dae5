//! The runs behind `roi-lab scenario`: the three protocol figures, the
//! tomography tables, the uncertainty scan, joint-measurability checks and
//! correlations.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::path::Path;

use roi_core::blw::{blw_sum_scan, corr_bound, correlation, retrieved_x, retrieving_joint, uniform_grid, BLW_MIN_SUM};
use roi_core::jm::{jm_feasible, margin_residual, JmMethod, JmReport};
use roi_core::measurements::noisy_z;
use roi_core::states::Projector;
use roi_core::{BinaryPovm, Outcome};

use crate::compare::{compare_dataset, ComparisonReport};
use crate::config::{Scenario, ScenarioConfig, StateSpec};
use crate::datasets::Dataset;
use crate::error::Result;
use crate::formats::{Cell, Table};
use crate::montecarlo::{monte_carlo, standard_error};
use crate::quantities::{CellTable, Quantity, Theory, TomographySource};

/// Tolerance handed to the joint-measurability checker.
pub const JM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub table: Table,
    /// Comparison against the shipped tables, for scenarios that have one.
    pub report: Option<ComparisonReport>,
    /// One-line findings for the terminal.
    pub notes: Vec<String>,
}

fn theory(q: Quantity, s: &StateSpec) -> Result<f64> {
    q.eval(&Theory, s)
}

fn simulated(q: Quantity, s: &StateSpec, cells: Option<&CellTable>) -> Result<Option<f64>> {
    cells.map(|c| q.eval(c, s)).transpose()
}

/// Simulated cells for the configured states at the configured angles plus
/// `γ = 0`, which the derived quantities read from.
fn simulate(cfg: &ScenarioConfig) -> Result<Option<CellTable>> {
    let Some(shots) = cfg.shots else { return Ok(None) };
    let mut gammas = cfg.gammas.clone();
    if !gammas.contains(&0.0) {
        gammas.push(0.0);
    }
    Ok(Some(monte_carlo(&cfg.states, &gammas, shots, cfg.seed)?.cells()))
}

/// Report over `datasets`, with simulation of the canonical states when shots are configured.
fn reports(cfg: &ScenarioConfig, datasets: &[Dataset], data_dir: &Path) -> Result<Option<ComparisonReport>> {
    let sim = match cfg.shots {
        Some(n) => Some(monte_carlo(&StateSpec::experiment(), &[0.0, FRAC_PI_8, FRAC_PI_4], n, cfg.seed)?.cells()),
        None => None,
    };
    let parts = datasets
        .iter()
        .map(|&d| compare_dataset(d, data_dir, sim.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(ComparisonReport::merge(parts)?))
}

fn se_cell(p: Option<f64>, shots: Option<u64>) -> Cell {
    match (p, shots) {
        (Some(p), Some(n)) => Cell::Num(standard_error(p.clamp(0.0, 1.0), n)),
        _ => Cell::Empty,
    }
}

pub fn run_scenario(cfg: &ScenarioConfig, data_dir: &Path) -> Result<ScenarioOutput> {
    cfg.validate()?;
    match cfg.scenario {
        Scenario::Macrorealistic => macrorealistic(cfg),
        Scenario::Retrieving => retrieving(cfg, data_dir),
        Scenario::NoRetrieving => no_retrieving(cfg, data_dir),
        Scenario::Table => table(cfg, data_dir),
        Scenario::BlwScan => blw(cfg),
        Scenario::JmCheck => jm(cfg),
        Scenario::Corr => corr(cfg, data_dir),
    }
}

fn macrorealistic(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let sim = simulate(cfg)?;
    let mut t = Table::new(&["gamma", "state", "z_plus_sequential", "z_plus_direct", "nsit_gap", "simulated", "stderr"]);
    let mut worst: f64 = 0.0;
    for &g in &cfg.gammas {
        for s in &cfg.states {
            let q = Quantity::SecondMargin {
                gamma: g,
                projector: Projector::ZPlus,
            };
            let seq = theory(q, s)?;
            let direct = s.ket().h.norm_sqr();
            worst = worst.max((seq - direct).abs());
            let simv = simulated(q, s, sim.as_ref())?;
            t.push(vec![
                g.into(),
                s.name().into(),
                seq.into(),
                direct.into(),
                (seq - direct).into(),
                simv.into(),
                se_cell(simv, cfg.shots),
            ]);
        }
    }
    Ok(ScenarioOutput {
        table: t,
        report: None,
        notes: vec![format!("largest |Z+ sequential - Z+ direct| = {worst:.3e}")],
    })
}

fn retrieving(cfg: &ScenarioConfig, data_dir: &Path) -> Result<ScenarioOutput> {
    let sim = simulate(cfg)?;
    let mut t = Table::new(&[
        "gamma",
        "eta",
        "state",
        "noisy_x_direct",
        "sequential",
        "roi_gap",
        "direct_simulated",
        "sequential_simulated",
    ]);
    let mut worst: f64 = 0.0;
    for &g in &cfg.gammas {
        let eta = (2.0 * g).cos();
        for s in &cfg.states {
            let direct = Quantity::NoisyXMixed { eta };
            let seq = Quantity::SecondMargin {
                gamma: g,
                projector: Projector::XPlus,
            };
            let (d, q) = (theory(direct, s)?, theory(seq, s)?);
            worst = worst.max((d - q).abs());
            t.push(vec![
                g.into(),
                eta.into(),
                s.name().into(),
                d.into(),
                q.into(),
                (q - d).into(),
                simulated(direct, s, sim.as_ref())?.into(),
                simulated(seq, s, sim.as_ref())?.into(),
            ]);
        }
    }
    Ok(ScenarioOutput {
        table: t,
        report: reports(cfg, &[Dataset::Retrieving], data_dir)?,
        notes: vec![format!("largest retrieval gap = {worst:.3e}")],
    })
}

fn no_retrieving(cfg: &ScenarioConfig, data_dir: &Path) -> Result<ScenarioOutput> {
    let sim = simulate(cfg)?;
    let mut t = Table::new(&[
        "gamma",
        "state",
        "q_tilde",
        "q",
        "w2_sq",
        "q_tilde_simulated",
        "q_simulated",
        "w2_sq_simulated",
    ]);
    for &g in &cfg.gammas {
        for s in &cfg.states {
            let qt = Quantity::SecondMargin {
                gamma: 0.0,
                projector: Projector::XPlus,
            };
            let q = Quantity::SecondMargin {
                gamma: g,
                projector: Projector::XPlus,
            };
            let w = Quantity::W2 { gamma: g };
            t.push(vec![
                g.into(),
                s.name().into(),
                theory(qt, s)?.into(),
                theory(q, s)?.into(),
                theory(w, s)?.into(),
                simulated(qt, s, sim.as_ref())?.into(),
                simulated(q, s, sim.as_ref())?.into(),
                simulated(w, s, sim.as_ref())?.into(),
            ]);
        }
    }
    let worst = cfg
        .gammas
        .iter()
        .map(|&g| roi_core::blw::worst_case_delta_sq(&BinaryPovm::sharp_x(), &retrieved_x(g)?))
        .collect::<roi_core::Result<Vec<_>>>()?;
    Ok(ScenarioOutput {
        table: t,
        report: reports(cfg, &[Dataset::NoRetrieving, Dataset::W2Sum], data_dir)?,
        notes: cfg
            .gammas
            .iter()
            .zip(worst)
            .map(|(g, w)| format!("gamma = {g}: worst-case squared distance to sharp X = {w:.12}"))
            .collect(),
    })
}

fn table(cfg: &ScenarioConfig, data_dir: &Path) -> Result<ScenarioOutput> {
    let sim = simulate(cfg)?;
    let mut t = Table::new(&[
        "gamma",
        "projector",
        "state",
        "outcome",
        "theory",
        "theory_3dp",
        "simulated",
        "stderr",
    ]);
    for &g in &cfg.gammas {
        for p in Projector::ALL {
            for s in &cfg.states {
                for a in Outcome::BOTH {
                    let v = Theory.prob(s, g, a, p)?;
                    let simv = sim.as_ref().map(|c| c.prob(s, g, a, p)).transpose()?;
                    t.push(vec![
                        g.into(),
                        p.label().into(),
                        s.name().into(),
                        a.label().into(),
                        v.into(),
                        format!("{v:.3}").into(),
                        simv.into(),
                        se_cell(simv.map(|_| v), cfg.shots),
                    ]);
                }
            }
        }
    }
    let printed: Vec<Dataset> = [Dataset::Gamma0, Dataset::GammaPi8, Dataset::GammaPi4]
        .into_iter()
        .filter(|d| cfg.gammas.iter().any(|&g| (g - d.gamma()).abs() < 1e-12))
        .collect();
    let report = if printed.is_empty() {
        None
    } else {
        reports(cfg, &printed, data_dir)?
    };
    Ok(ScenarioOutput {
        table: t,
        report,
        notes: Vec::new(),
    })
}

fn blw(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let grid = uniform_grid(cfg.points);
    let scan = blw_sum_scan(&grid)?;
    let mut t = Table::new(&["gamma", "delta_a_sq", "delta_b_sq", "sum"]);
    for r in &scan.rows {
        t.push(vec![r.gamma.into(), r.delta_a_sq.into(), r.delta_b_sq.into(), r.sum.into()]);
    }
    let rep = &scan.report;
    Ok(ScenarioOutput {
        table: t,
        report: None,
        notes: vec![
            format!("grid argmin gamma = {:.12} (grid step {:.3e})", rep.grid_gamma, grid[1] - grid[0]),
            format!("analytic optimum gamma* = {:.12}, minimum sum = {:.12}", rep.gamma_star, rep.min_sum),
            format!("closed-form minimum 2(2 - sqrt 2) = {BLW_MIN_SUM:.12}"),
        ],
    })
}

fn method_name(m: JmMethod) -> &'static str {
    match m {
        JmMethod::Candidate => "candidate",
        JmMethod::AlternatingProjections => "alternating-projections",
        JmMethod::Certificate => "certificate",
        JmMethod::AnalyticFallback => "analytic-fallback",
    }
}

/// One row of the joint-measurability table.
pub fn jm_row(t: &mut Table, pair: &str, gamma: Option<f64>, p: &BinaryPovm, q: &BinaryPovm) -> Result<JmReport> {
    let r = jm_feasible(p, q, JM_TOL)?;
    let margin = r
        .witness
        .as_ref()
        .map(|w| margin_residual(w.effects(), p, q));
    t.push(vec![
        pair.into(),
        gamma.into(),
        r.feasible.into(),
        method_name(r.method).into(),
        r.residual.into(),
        (r.iterations as u64).into(),
        r.analytic.map_or(Cell::Empty, Cell::Bool),
        margin.into(),
    ]);
    Ok(r)
}

pub fn jm_table() -> Table {
    Table::new(&[
        "pair",
        "gamma",
        "feasible",
        "method",
        "residual",
        "iterations",
        "analytic",
        "witness_margin_error",
    ])
}

fn jm(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let mut t = jm_table();
    let mut notes = Vec::new();
    let r = jm_row(&mut t, "Z,X", None, &BinaryPovm::sharp_z(), &BinaryPovm::sharp_x())?;
    notes.push(format!("sharp Z and sharp X jointly measurable: {}", r.feasible));
    for &g in &cfg.gammas {
        let r = jm_row(&mut t, "A,B", Some(g), &noisy_z(g)?, &retrieved_x(g)?)?;
        notes.push(format!("A and B at gamma = {g}: jointly measurable {}", r.feasible));
    }
    Ok(ScenarioOutput {
        table: t,
        report: None,
        notes,
    })
}

fn corr(cfg: &ScenarioConfig, data_dir: &Path) -> Result<ScenarioOutput> {
    let sim = simulate(cfg)?;
    let mut t = Table::new(&["gamma", "state", "correlation", "bound", "simulated"]);
    for &g in &cfg.gammas {
        let joint = retrieving_joint(g)?;
        let bound = corr_bound(g)?;
        for s in &cfg.states {
            let c = correlation(&joint, &s.ket().density()).ok();
            let simv = simulated(Quantity::Correlation { gamma: g }, s, sim.as_ref()).ok().flatten();
            t.push(vec![g.into(), s.name().into(), c.into(), bound.into(), simv.into()]);
        }
    }
    let report = reports(cfg, &[Dataset::Correlation], data_dir)?;
    let notes = report
        .iter()
        .flat_map(|r| &r.rows)
        .filter_map(|row| {
            row.derived_experimental
                .map(|d| format!("correlation recomputed from the experimental cells: {d:.4} (quoted {})", row.paper_experimental))
        })
        .collect();
    Ok(ScenarioOutput { table: t, report, notes })
}
