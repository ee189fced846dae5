//! Every number in the experimental tables is a function of tomography cells
//! `⟨φ| I^γ_a(ρ) |φ⟩`. A [`Quantity`] names such a function and evaluates it
//! against any [`TomographySource`]: exact theory, Monte Carlo counts or the
//! transcribed experimental cells.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

use roi_core::blw::correlation_from_moments;
use roi_core::photonic::tomography_prob;
use roi_core::states::Projector;
use roi_core::Outcome;

use crate::config::StateSpec;
use crate::error::{LabError, Result};

pub trait TomographySource {
    fn prob(&self, state: &StateSpec, gamma: f64, outcome: Outcome, projector: Projector) -> Result<f64>;
}

/// Exact probabilities from the interferometer model.
#[derive(Debug, Clone, Copy, Default)]
pub struct Theory;

impl TomographySource for Theory {
    fn prob(&self, state: &StateSpec, gamma: f64, outcome: Outcome, projector: Projector) -> Result<f64> {
        Ok(tomography_prob(&state.ket(), gamma, outcome, &projector.ket())?)
    }
}

/// Angles are matched after rounding to 1e-12 rad.
pub fn gamma_key(gamma: f64) -> i64 {
    (gamma * 1e12).round() as i64
}

/// Cell probabilities stored by value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellTable {
    cells: BTreeMap<(String, i64, usize, Projector), f64>,
}

impl CellTable {
    pub fn insert(&mut self, state: &str, gamma: f64, outcome: Outcome, projector: Projector, p: f64) {
        self.cells
            .insert((state.to_string(), gamma_key(gamma), outcome.index(), projector), p);
    }

    pub fn get(&self, state: &str, gamma: f64, outcome: Outcome, projector: Projector) -> Option<f64> {
        self.cells
            .get(&(state.to_string(), gamma_key(gamma), outcome.index(), projector))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

impl TomographySource for CellTable {
    fn prob(&self, state: &StateSpec, gamma: f64, outcome: Outcome, projector: Projector) -> Result<f64> {
        self.get(&state.name(), gamma, outcome, projector).ok_or_else(|| {
            LabError::Config(format!(
                "no data for state {}, gamma {gamma}, outcome {}, projector {projector}",
                state.name(),
                outcome.label()
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    /// One cell.
    Tomography { gamma: f64, outcome: Outcome, projector: Projector },
    /// Probability of the first outcome `+1`, summed over the X projectors as in
    /// the experiment.
    FirstOutcome { gamma: f64 },
    /// `Σ_a` of one projector: the second margin.
    SecondMargin { gamma: f64, projector: Projector },
    /// Noisy X with visibility `eta` mixed from `γ = 0` cells.
    NoisyXMixed { eta: f64 },
    /// `4p(1 − p)` of the first outcome.
    VarianceA { gamma: f64 },
    /// `4q(1 − q)` of the retrieved X margin.
    VarianceB { gamma: f64 },
    UncertaintySum { gamma: f64 },
    /// `4|q̃ − q|` with `q̃` the sharp-X probability from `γ = 0` cells.
    W2 { gamma: f64 },
    /// `4|q̃ − q| + 4|p̃ − p|` with `p̃` the sharp-Z probability from `γ = 0` cells.
    W2Sum { gamma: f64 },
    /// Correlation of the joint distribution read off the X-basis cells.
    Correlation { gamma: f64 },
}

impl Quantity {
    pub fn eval(&self, src: &dyn TomographySource, state: &StateSpec) -> Result<f64> {
        let cell = |gamma, a, p| src.prob(state, gamma, a, p);
        let margin = |gamma, p| -> Result<f64> { Ok(cell(gamma, Outcome::Plus, p)? + cell(gamma, Outcome::Minus, p)?) };
        let first = |gamma| -> Result<f64> {
            Ok(cell(gamma, Outcome::Plus, Projector::XPlus)? + cell(gamma, Outcome::Plus, Projector::XMinus)?)
        };
        let q = |gamma| margin(gamma, Projector::XPlus);
        let var = |p: f64| 4.0 * p * (1.0 - p);
        Ok(match *self {
            Quantity::Tomography {
                gamma,
                outcome,
                projector,
            } => cell(gamma, outcome, projector)?,
            Quantity::FirstOutcome { gamma } => first(gamma)?,
            Quantity::SecondMargin { gamma, projector } => margin(gamma, projector)?,
            Quantity::NoisyXMixed { eta } => {
                let sharp = margin(0.0, Projector::XPlus)?;
                let trivial = cell(0.0, Outcome::Plus, Projector::YPlus)? + cell(0.0, Outcome::Plus, Projector::YMinus)?;
                eta * sharp + (1.0 - eta) * trivial
            }
            Quantity::VarianceA { gamma } => var(first(gamma)?),
            Quantity::VarianceB { gamma } => var(q(gamma)?),
            Quantity::UncertaintySum { gamma } => var(first(gamma)?) + var(q(gamma)?),
            Quantity::W2 { gamma } => 4.0 * (q(0.0)? - q(gamma)?).abs(),
            Quantity::W2Sum { gamma } => {
                let z_sharp = margin(0.0, Projector::ZPlus)?;
                4.0 * (q(0.0)? - q(gamma)?).abs() + 4.0 * (z_sharp - first(gamma)?).abs()
            }
            Quantity::Correlation { gamma } => {
                let mut mu = [[0.0; 2]; 2];
                for a in Outcome::BOTH {
                    for (b, proj) in [Projector::XPlus, Projector::XMinus].into_iter().enumerate() {
                        mu[a.index()][b] = cell(gamma, a, proj)?;
                    }
                }
                let p = mu[0][0] + mu[0][1];
                let q = mu[0][0] + mu[1][0];
                correlation_from_moments(mu, p, q, var(p), var(q))?
            }
        })
    }

    /// Resolves a dataset row label at the dataset's angle.
    pub fn from_label(label: &str, branch: Option<Outcome>, gamma: f64) -> Result<Self> {
        let bad = || LabError::Config(format!("unknown quantity {label:?}"));
        if let Some(projector) = Projector::from_label(label) {
            let outcome = branch.ok_or_else(|| LabError::Config(format!("tomography row {label} needs a branch")))?;
            return Ok(Quantity::Tomography {
                gamma,
                outcome,
                projector,
            });
        }
        Ok(match label {
            "p" => Quantity::FirstOutcome { gamma },
            "q" | "b_sequential" => Quantity::SecondMargin {
                gamma,
                projector: Projector::XPlus,
            },
            "q_tilde" => Quantity::SecondMargin {
                gamma: 0.0,
                projector: Projector::XPlus,
            },
            "noisy_x_direct" => Quantity::NoisyXMixed {
                eta: (2.0 * gamma).cos(),
            },
            "var_a" => Quantity::VarianceA { gamma },
            "var_b" => Quantity::VarianceB { gamma },
            "s" => Quantity::UncertaintySum { gamma },
            "w2" => Quantity::W2 { gamma },
            "w2_sum" => Quantity::W2Sum { gamma },
            "corr" => Quantity::Correlation { gamma },
            _ => return Err(bad()),
        })
    }
}

/// The visibility that makes noisy X equal to the retrieved margin at `π/8`.
pub const RETRIEVING_ETA: f64 = FRAC_1_SQRT_2;

/// The optimal angle.
pub const GAMMA_OPT: f64 = FRAC_PI_8;

#[cfg(test)]
mod tests {
    use super::*;
    use roi_core::blw::{correlation, retrieving_joint, uncertainty_sum, variance};
    use roi_core::linalg::born_prob;
    use roi_core::measurements::{noisy_x, noisy_z};
    use roi_core::states::CanonicalState;
    use roi_core::BinaryPovm;

    #[test]
    fn theory_quantities_match_operator_formulas() {
        let g = GAMMA_OPT;
        for s in CanonicalState::EXPERIMENT {
            let spec = StateSpec::Named(s);
            let rho = s.ket().density();
            let a = noisy_z(g).unwrap();
            let b = noisy_x((2.0 * g).cos()).unwrap();
            let ev = |q: Quantity| q.eval(&Theory, &spec).unwrap();
            assert!((ev(Quantity::FirstOutcome { gamma: g }) - born_prob(a.plus(), &rho).unwrap()).abs() < 1e-12);
            assert!((ev(Quantity::VarianceA { gamma: g }) - variance(&a, &rho).unwrap()).abs() < 1e-12);
            assert!((ev(Quantity::VarianceB { gamma: g }) - variance(&b, &rho).unwrap()).abs() < 1e-12);
            assert!((ev(Quantity::UncertaintySum { gamma: g }) - uncertainty_sum(g, &rho).unwrap()).abs() < 1e-12);
            assert!((ev(Quantity::NoisyXMixed { eta: RETRIEVING_ETA }) - born_prob(b.plus(), &rho).unwrap()).abs() < 1e-12);
            let x = born_prob(BinaryPovm::sharp_x().plus(), &rho).unwrap();
            let qq = born_prob(b.plus(), &rho).unwrap();
            assert!((ev(Quantity::W2 { gamma: g }) - 4.0 * (x - qq).abs()).abs() < 1e-12);
            if let Ok(c) = correlation(&retrieving_joint(g).unwrap(), &rho) {
                assert!((ev(Quantity::Correlation { gamma: g }) - c).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn labels() {
        assert!(matches!(
            Quantity::from_label("X+", Some(Outcome::Minus), 0.0).unwrap(),
            Quantity::Tomography { .. }
        ));
        assert!(Quantity::from_label("X+", None, 0.0).is_err());
        assert!(Quantity::from_label("bogus", None, 0.0).is_err());
    }
}
