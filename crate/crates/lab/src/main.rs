use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use roi_lab::compare::{compare_all, compare_dataset, ComparisonReport, PAPER_SPREAD};
use roi_lab::config::{parse_alpha_beta, parse_angle, Format, Scenario, ScenarioConfig, StateSpec};
use roi_lab::datasets::{resolve_data_dir, Dataset};
use roi_lab::formats::{self, Cell, StatsJson, Table};
use roi_lab::montecarlo::{monte_carlo, standard_error, DEFAULT_SHOTS};
use roi_lab::quantities::Theory;
use roi_lab::scenarios::{jm_row, jm_table, run_scenario, ScenarioOutput};
use serde_json::json;

#[derive(Parser)]
#[command(name = "roi-lab", version, about = "Sequential-measurement scenarios, shot-noise simulation and comparison with the experimental tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario: macrorealistic, retrieving, no-retrieving, table, blw-scan, jm-check or corr.
    Scenario {
        name: String,
        #[command(flatten)]
        common: Common,
        /// Grid points for blw-scan.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Tomography tables in the printed layout (projector rows, state x outcome columns).
    Table(Common),
    /// Monte Carlo shot noise on the tomography settings.
    Mc(Common),
    /// Uncertainty-sum scan over gamma in [0, pi/4].
    BlwScan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Joint measurability of the noisy pair, or of two POVMs read from JSON files.
    JmCheck {
        #[command(flatten)]
        common: Common,
        /// First POVM as JSON ({"plus": [[[re, im], ...], ...], "minus": ...}).
        #[arg(long, requires = "q")]
        p: Option<PathBuf>,
        /// Second POVM as JSON.
        #[arg(long, requires = "p")]
        q: Option<PathBuf>,
    },
    /// Correlation of the optimal joint observable.
    Corr(Common),
    /// Compare theory (and simulation with --shots) with the shipped experimental tables.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Dataset id; repeatable. Defaults to all shipped datasets.
        #[arg(long = "dataset")]
        datasets: Vec<String>,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Angle in radians or symbolic (pi/8); repeatable.
    #[arg(long = "gamma", allow_hyphen_values = true)]
    gammas: Vec<String>,
    /// Named input state (H, V, plus, minus, psi-minus, psi-plus); repeatable.
    #[arg(long = "state")]
    states: Vec<String>,
    /// Custom input state as re,im,re,im; repeatable.
    #[arg(long = "alpha-beta", allow_hyphen_values = true)]
    alpha_beta: Vec<String>,
    /// Shots per setting for Monte Carlo.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory with the experimental CSV files (ROI_LAB_DATA takes precedence).
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

impl Common {
    fn config(&self, scenario: Scenario) -> anyhow::Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::new(scenario);
        if !self.gammas.is_empty() {
            cfg.gammas = self.gammas.iter().map(|g| parse_angle(g)).collect::<Result<_, _>>()?;
        }
        if !self.states.is_empty() || !self.alpha_beta.is_empty() {
            let mut states: Vec<StateSpec> = self.states.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
            for ab in &self.alpha_beta {
                states.push(parse_alpha_beta(ab)?);
            }
            cfg.states = states;
        }
        cfg.shots = self.shots;
        cfg.seed = self.seed;
        cfg.format = self.format.parse()?;
        cfg.output = self.out.clone();
        Ok(cfg)
    }

    fn data_dir(&self) -> PathBuf {
        resolve_data_dir(self.data_dir.as_deref())
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => formats::write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_table(report: &ComparisonReport) -> Table {
    let mut t = Table::new(&[
        "dataset",
        "label",
        "theory",
        "shipped_theory",
        "simulated",
        "derived_experimental",
        "paper_experimental",
        "abs_dev_theory",
        "abs_dev_paper",
        "within_spread",
    ]);
    for r in &report.rows {
        t.push(vec![
            r.dataset.id().into(),
            r.label.clone().into(),
            r.theory.into(),
            r.shipped_theory.into(),
            r.simulated.into(),
            r.derived_experimental.into(),
            r.paper_experimental.into(),
            r.abs_dev_theory.into(),
            r.abs_dev_paper.into(),
            (r.abs_dev_theory <= PAPER_SPREAD).into(),
        ]);
    }
    t
}

fn report_json(report: &ComparisonReport) -> serde_json::Value {
    json!({
        "pass": report.pass(),
        "worst_dev": report.worst_dev,
        "worst_label": report.worst_label,
        "worst_theory_mismatch": report.worst_theory_mismatch,
        "rows": report_table(report).to_json_value(),
    })
}

fn print_report(report: &ComparisonReport) {
    eprintln!("{}", report.summary());
    for r in report.failing_rows() {
        eprintln!(
            "  outside spread: {} {}: theory {:.3}, experiment {:.3}, |dev| {:.3}",
            r.dataset, r.label, r.theory, r.paper_experimental, r.abs_dev_theory
        );
    }
}

fn finish_scenario(out: ScenarioOutput, cfg: &ScenarioConfig) -> anyhow::Result<ExitCode> {
    let text = match cfg.format {
        Format::Csv => out.table.to_csv()?,
        Format::Json => formats::pretty(&json!({
            "scenario": cfg.scenario.name(),
            "rows": out.table.to_json_value(),
            "report": out.report.as_ref().map(report_json),
            "notes": out.notes,
        }))?,
    };
    emit(cfg.output.as_deref(), &text)?;
    for n in &out.notes {
        eprintln!("{n}");
    }
    Ok(match &out.report {
        Some(r) => {
            print_report(r);
            if r.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        None => ExitCode::SUCCESS,
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Scenario { name, common, points } => {
            let scenario: Scenario = name.parse()?;
            let mut cfg = common.config(scenario)?;
            cfg.points = points;
            let out = run_scenario(&cfg, &common.data_dir())?;
            finish_scenario(out, &cfg)
        }
        Command::BlwScan { common, points } => {
            let mut cfg = common.config(Scenario::BlwScan)?;
            cfg.points = points;
            let out = run_scenario(&cfg, &common.data_dir())?;
            finish_scenario(out, &cfg)
        }
        Command::Corr(common) => {
            let cfg = common.config(Scenario::Corr)?;
            let out = run_scenario(&cfg, &common.data_dir())?;
            finish_scenario(out, &cfg)
        }
        Command::Table(common) => {
            let cfg = common.config(Scenario::Table)?;
            cfg.validate()?;
            let mut rows = Vec::new();
            let mut columns = vec!["gamma".to_string()];
            for &g in &cfg.gammas {
                let t = formats::tomography_table(&Theory, g, &cfg.states)?;
                if columns.len() == 1 {
                    columns.extend(t.columns.iter().cloned());
                }
                rows.extend(t.rows.into_iter().map(|r| std::iter::once(Cell::Num(g)).chain(r).collect()));
            }
            let table = Table { columns, rows };
            emit(cfg.output.as_deref(), &table.render(cfg.format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc(common) => {
            let mut cfg = common.config(Scenario::Table)?;
            let shots = cfg.shots.unwrap_or(DEFAULT_SHOTS);
            cfg.shots = Some(shots);
            cfg.validate()?;
            let run = monte_carlo(&cfg.states, &cfg.gammas, shots, cfg.seed)?;
            let mut t = Table::new(&[
                "gamma", "state", "basis", "outcome", "projector", "theory", "empirical", "counts", "stderr",
            ]);
            for s in &run.settings {
                let emp = s.empirical(shots);
                for a in roi_core::Outcome::BOTH {
                    for (b, p) in s.projectors().into_iter().enumerate() {
                        let th = s.theory[a.index()][b];
                        t.push(vec![
                            s.gamma.into(),
                            s.state.clone().into(),
                            s.basis.to_string().into(),
                            a.label().into(),
                            p.label().into(),
                            th.into(),
                            emp[a.index()][b].into(),
                            s.counts[a.index()][b].into(),
                            standard_error(th, shots).into(),
                        ]);
                    }
                }
            }
            let text = match cfg.format {
                Format::Csv => t.to_csv()?,
                Format::Json => {
                    let mut stats = serde_json::Map::new();
                    for st in &cfg.states {
                        let s = run.sequential_stats(&st.name())?;
                        stats.insert(st.name(), serde_json::to_value(StatsJson::from_stats(&s))?);
                    }
                    formats::pretty(&json!({
                        "shots": shots,
                        "seed": cfg.seed,
                        "rows": t.to_json_value(),
                        "sequential_stats": stats,
                    }))?
                }
            };
            emit(cfg.output.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::JmCheck { common, p, q } => {
            let cfg = common.config(Scenario::JmCheck)?;
            match (p, q) {
                (Some(p), Some(q)) => {
                    let (pp, qq) = (formats::read_povm(&p)?, formats::read_povm(&q)?);
                    let mut t = jm_table();
                    let r = jm_row(&mut t, "P,Q", None, &pp, &qq)?;
                    emit(cfg.output.as_deref(), &t.render(cfg.format)?)?;
                    eprintln!("jointly measurable: {}", r.feasible);
                    Ok(ExitCode::SUCCESS)
                }
                _ => {
                    let out = run_scenario(&cfg, &common.data_dir())?;
                    finish_scenario(out, &cfg)
                }
            }
        }
        Command::Compare { common, datasets } => {
            let fmt: Format = common.format.parse()?;
            let dir = common.data_dir();
            if common.shots == Some(0) {
                bail!("--shots must be at least 1");
            }
            let sim = match common.shots {
                Some(n) => Some(
                    monte_carlo(
                        &StateSpec::experiment(),
                        &[0.0, std::f64::consts::FRAC_PI_8, std::f64::consts::FRAC_PI_4],
                        n,
                        common.seed,
                    )?
                    .cells(),
                ),
                None => None,
            };
            let report = if datasets.is_empty() {
                compare_all(&dir, sim.as_ref())?
            } else {
                let parts = datasets
                    .iter()
                    .map(|d| compare_dataset(d.parse::<Dataset>()?, &dir, sim.as_ref()))
                    .collect::<Result<Vec<_>, _>>()?;
                ComparisonReport::merge(parts)?
            };
            let text = match fmt {
                Format::Csv => report_table(&report).to_csv()?,
                Format::Json => formats::pretty(&report_json(&report))?,
            };
            emit(common.out.as_deref(), &text)?;
            print_report(&report);
            Ok(if report.pass() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
