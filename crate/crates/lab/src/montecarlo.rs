//! Shot-noise simulation of the tomography runs.
//!
//! One setting is a triple (state, γ, basis). Its `N` shots fall into the four
//! cells (first outcome ±) × (basis projector ±) according to a multinomial
//! law, drawn as a chain of conditional binomials. Every cell owns a ChaCha8
//! stream derived from the seed and the cell's identity, so results do not
//! depend on the order in which settings are simulated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use roi_core::hv::{SecondSetting, SequentialStats};
use roi_core::states::Projector;
use roi_core::Outcome;

use crate::config::StateSpec;
use crate::error::{LabError, Result};
use crate::quantities::{gamma_key, CellTable, Theory, TomographySource};

/// Shots per setting that put the standard error at `p = ½` at 0.02.
pub const DEFAULT_SHOTS: u64 = 625;

pub const BASES: [char; 3] = ['X', 'Y', 'Z'];

/// `√(p(1 − p)/N)`.
pub fn standard_error(p: f64, shots: u64) -> f64 {
    (p * (1.0 - p) / shots as f64).sqrt()
}

/// Stable 64-bit FNV-1a over the cell identity.
pub fn stream_id(state: &str, gamma: f64, outcome: Outcome, projector: Projector) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(state.as_bytes());
    eat(&[0xff]);
    eat(&gamma_key(gamma).to_le_bytes());
    eat(&[outcome.index() as u8, Projector::ALL.iter().position(|&p| p == projector).unwrap_or(0) as u8]);
    h
}

fn cell_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws multinomial counts for `probs` (any non-negative weights) using one
/// stream per cell.
pub fn sample_cells(probs: [f64; 4], shots: u64, seed: u64, streams: [u64; 4]) -> Result<[u64; 4]> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(LabError::Config(format!("invalid cell probabilities {probs:?}")));
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(LabError::Config("cell probabilities sum to zero".into()));
    }
    let mut counts = [0u64; 4];
    let mut left = shots;
    let mut mass = 1.0;
    for i in 0..3 {
        let p = probs[i] / total;
        let cond = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = if left == 0 || cond == 0.0 {
            0
        } else {
            let dist = Binomial::new(left, cond).map_err(|e| LabError::Config(e.to_string()))?;
            dist.sample(&mut cell_rng(seed, streams[i]))
        };
        counts[i] = k;
        left -= k;
        mass -= p;
    }
    counts[3] = left;
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSetting {
    pub state: String,
    pub gamma: f64,
    pub basis: char,
    /// `[a][b]`, `b` indexing the `+`/`−` projector of the basis.
    pub theory: [[f64; 2]; 2],
    pub counts: [[u64; 2]; 2],
}

impl McSetting {
    pub fn projectors(&self) -> [Projector; 2] {
        Projector::basis_pair(self.basis).expect("basis is one of X, Y, Z")
    }

    pub fn empirical(&self, shots: u64) -> [[f64; 2]; 2] {
        self.counts.map(|row| row.map(|k| k as f64 / shots as f64))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub shots: u64,
    pub seed: u64,
    pub settings: Vec<McSetting>,
}

/// Simulates every (state, γ, basis) setting with `shots` shots each.
pub fn monte_carlo(states: &[StateSpec], gammas: &[f64], shots: u64, seed: u64) -> Result<McRun> {
    if shots == 0 {
        return Err(LabError::Config("shots must be at least 1".into()));
    }
    let mut settings = Vec::with_capacity(states.len() * gammas.len() * 3);
    for state in states {
        let name = state.name();
        for &gamma in gammas {
            for basis in BASES {
                let pair = Projector::basis_pair(basis).expect("known basis");
                let mut theory = [[0.0; 2]; 2];
                let mut streams = [0u64; 4];
                for a in Outcome::BOTH {
                    for (b, proj) in pair.into_iter().enumerate() {
                        theory[a.index()][b] = Theory.prob(state, gamma, a, proj)?.max(0.0);
                        streams[2 * a.index() + b] = stream_id(&name, gamma, a, proj);
                    }
                }
                let flat = [theory[0][0], theory[0][1], theory[1][0], theory[1][1]];
                let c = sample_cells(flat, shots, seed, streams)?;
                settings.push(McSetting {
                    state: name.clone(),
                    gamma,
                    basis,
                    theory,
                    counts: [[c[0], c[1]], [c[2], c[3]]],
                });
            }
        }
    }
    Ok(McRun { shots, seed, settings })
}

impl McRun {
    pub fn cells(&self) -> CellTable {
        let mut t = CellTable::default();
        for s in &self.settings {
            let emp = s.empirical(self.shots);
            for a in Outcome::BOTH {
                for (b, proj) in s.projectors().into_iter().enumerate() {
                    t.insert(&s.state, s.gamma, a, proj, emp[a.index()][b]);
                }
            }
        }
        t
    }

    /// Empirical blocks of one state as sequential statistics: first setting
    /// `A(γ)`, second setting the basis letter.
    pub fn sequential_stats(&self, state: &str) -> Result<SequentialStats> {
        let mut stats = SequentialStats::new();
        for s in self.settings.iter().filter(|s| s.state == state) {
            stats.insert(
                &format!("A({})", s.gamma),
                SecondSetting::fixed(&s.basis.to_string()),
                s.empirical(self.shots),
            )?;
        }
        Ok(stats)
    }

    /// Pairs `(theory, empirical)` over all cells.
    pub fn cell_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.settings.iter().flat_map(move |s| {
            let emp = s.empirical(self.shots);
            (0..4).map(move |i| (s.theory[i / 2][i % 2], emp[i / 2][i % 2]))
        })
    }
}

/// RMS deviation from theory over all cells and runs, with each cell rescaled
/// to the error it would have at `p = ½`. Comparable to `standard_error(½, N)`.
pub fn half_probability_error_scale(runs: &[McRun]) -> f64 {
    let (mut acc, mut n) = (0.0, 0usize);
    for run in runs {
        for (p, phat) in run.cell_pairs() {
            let v = p * (1.0 - p);
            if v > 1e-12 {
                acc += (phat - p).powi(2) * 0.25 / v;
                n += 1;
            }
        }
    }
    if n == 0 {
        0.0
    } else {
        (acc / n as f64).sqrt()
    }
}

/// Plain RMS of `p̂ − p` over all cells and runs.
pub fn rms_deviation(runs: &[McRun]) -> f64 {
    let (mut acc, mut n) = (0.0, 0usize);
    for run in runs {
        for (p, phat) in run.cell_pairs() {
            acc += (phat - p).powi(2);
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        (acc / n as f64).sqrt()
    }
}
