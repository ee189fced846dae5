//! Jones-calculus model of the interferometric noisy-Z measurement.
//!
//! The polarization of the input photon is moved into the path degree of
//! freedom by a beam displacer, rotated by `±γ` in the two arms, sent through
//! a half-wave plate at `φ = ±π/8` and a polarizing beam splitter, and finally
//! recombined. Keeping the transmitted port (`φ = +π/8`) realises outcome `+1`
//! of the Lüders instrument of `A^γ`; the reflected port is emulated by
//! `φ = −π/8`.
//!
//! Path ⊗ polarization amplitudes are ordered `|0H⟩, |0V⟩, |1H⟩, |1V⟩`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use crate::linalg::{CMatrix, C64};
use crate::math;
use crate::measurements::{check_gamma, noisy_z, Instrument, Outcome};
use crate::states::PolKet;
use crate::{Error, Result};

type Jones = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Half-wave plate with fast axis at `θ`: `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`.
pub fn half_wave_plate(theta: f64) -> Jones {
    let (c, s) = (math::cos(2.0 * theta), math::sin(2.0 * theta));
    [[real(c), real(s)], [real(s), real(-c)]]
}

fn apply_jones(m: &Jones, h: C64, v: C64) -> (C64, C64) {
    (m[0][0] * h + m[0][1] * v, m[1][0] * h + m[1][1] * v)
}

/// Amplitudes over path ⊗ polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPolState {
    pub amplitudes: [C64; 4],
}

impl PathPolState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Applies `m` to the polarization of one arm.
    fn act_on_path(mut self, path: usize, m: &Jones) -> Self {
        let (h, v) = apply_jones(m, self.amplitudes[2 * path], self.amplitudes[2 * path + 1]);
        self.amplitudes[2 * path] = h;
        self.amplitudes[2 * path + 1] = v;
        self
    }

    fn act_on_both(self, m: &Jones) -> Self {
        self.act_on_path(0, m).act_on_path(1, m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StageState {
    Polarization(PolKet),
    PathPolarization(PathPolState),
}

impl StageState {
    pub fn norm_sqr(&self) -> f64 {
        match self {
            StageState::Polarization(k) => k.norm_sqr(),
            StageState::PathPolarization(s) => s.norm_sqr(),
        }
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        match self {
            StageState::Polarization(k) => k.amplitudes().to_vec(),
            StageState::PathPolarization(s) => s.amplitudes.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub label: &'static str,
    pub state: StageState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTrace {
    pub stages: Vec<Stage>,
    pub gamma: f64,
    pub phi: f64,
}

impl PipelineTrace {
    /// Output polarization `Ψ9`.
    pub fn output(&self) -> PolKet {
        match self.stages.last().map(|s| s.state) {
            Some(StageState::Polarization(k)) => k,
            _ => unreachable!("pipeline always ends in a polarization state"),
        }
    }
}

/// Branch angle of the last half-wave plate for a PBS outcome.
pub fn branch_angle(outcome: Outcome) -> f64 {
    match outcome {
        Outcome::Plus => FRAC_PI_8,
        Outcome::Minus => -FRAC_PI_8,
    }
}

fn check_branch(phi: f64) -> Result<()> {
    if math::abs(math::abs(phi) - FRAC_PI_8) > 1e-12 {
        return Err(Error::InvalidBranch(phi));
    }
    Ok(())
}

/// Runs the nine stages for input `ket`, angle `gamma` and branch `phi`.
pub fn propagate(ket: &PolKet, gamma: f64, phi: f64) -> Result<PipelineTrace> {
    if math::abs(ket.norm_sqr() - 1.0) > 1e-12 {
        return Err(Error::InvalidKet(alloc::format!("squared norm {}", ket.norm_sqr())));
    }
    check_gamma(gamma)?;
    check_branch(phi)?;

    let flip = half_wave_plate(FRAC_PI_4);
    let mut stages = Vec::with_capacity(9);
    stages.push(Stage {
        label: "psi_in",
        state: StageState::Polarization(*ket),
    });

    // Beam displacer: H stays in the upper arm, V moves to the lower arm.
    let s2 = PathPolState {
        amplitudes: [ket.h, ZERO, ZERO, ket.v],
    };
    let s3 = s2.act_on_path(1, &flip);
    let s4 = s3
        .act_on_path(0, &half_wave_plate(gamma / 2.0))
        .act_on_path(1, &half_wave_plate(-gamma / 2.0));
    let s5 = s4.act_on_both(&half_wave_plate(phi));
    // PBS transmits H only.
    let mut s6 = s5;
    s6.amplitudes[1] = ZERO;
    s6.amplitudes[3] = ZERO;
    let s7 = s6.act_on_path(0, &flip);
    // Second displacer merges |0V⟩ and |1H⟩ into one beam.
    let s8 = PolKet::unnormalised(s7.amplitudes[2], s7.amplitudes[1]);
    let (h9, v9) = apply_jones(&flip, s8.h, s8.v);
    let s9 = PolKet::unnormalised(h9, v9);

    for (label, state) in [("psi_2", s2), ("psi_3", s3), ("psi_4", s4), ("psi_5", s5), ("psi_6", s6), ("psi_7", s7)] {
        stages.push(Stage {
            label,
            state: StageState::PathPolarization(state),
        });
    }
    stages.push(Stage {
        label: "psi_8",
        state: StageState::Polarization(s8),
    });
    stages.push(Stage {
        label: "psi_9",
        state: StageState::Polarization(s9),
    });
    Ok(PipelineTrace { stages, gamma, phi })
}

/// The whole chain as one diagonal operator,
/// `diag(cos γ cos 2φ + sin γ sin 2φ, cos γ cos 2φ − sin γ sin 2φ)`.
pub fn branch_operator(gamma: f64, phi: f64) -> Result<CMatrix> {
    check_gamma(gamma)?;
    check_branch(phi)?;
    let (cg, sg) = (math::cos(gamma), math::sin(gamma));
    let (c2, s2) = (math::cos(2.0 * phi), math::sin(2.0 * phi));
    Ok(CMatrix::diag(&[cg * c2 + sg * s2, cg * c2 - sg * s2]))
}

/// Output of one PBS branch.
pub fn branch_output(ket: &PolKet, gamma: f64, outcome: Outcome) -> Result<PolKet> {
    Ok(propagate(ket, gamma, branch_angle(outcome))?.output())
}

/// Largest Frobenius distance between `|Ψ9^±⟩⟨Ψ9^±|` and the Lüders update
/// `K_{±γ} ρ K_{±γ}` of the same input.
pub fn pipeline_vs_lueders(ket: &PolKet, gamma: f64) -> Result<f64> {
    let instr = Instrument::lueders(&noisy_z(gamma)?)?;
    let rho = ket.density();
    let mut worst: f64 = 0.0;
    for a in Outcome::BOTH {
        let out = branch_output(ket, gamma, a)?.density();
        worst = worst.max(out.distance(&instr.apply(a, &rho)?));
    }
    Ok(worst)
}

/// `⟨φ| I^γ_±(ρ_in) |φ⟩` obtained from the pipeline output.
pub fn tomography_prob(ket: &PolKet, gamma: f64, outcome: Outcome, projector: &PolKet) -> Result<f64> {
    if math::abs(projector.norm_sqr() - 1.0) > 1e-12 {
        return Err(Error::InvalidKet(alloc::format!(
            "projector squared norm {}",
            projector.norm_sqr()
        )));
    }
    let out = branch_output(ket, gamma, outcome)?;
    Ok(projector.inner(&out).norm_sqr())
}

/// Closed-form tomography probability
/// `½[|α|²|c|² + |β|²|d|² + 2 Re(αβ̄c̄d) cos 2γ ± (|α|²|c|² − |β|²|d|²) sin 2γ]`.
pub fn tomography_closed_form(ket: &PolKet, gamma: f64, outcome: Outcome, projector: &PolKet) -> f64 {
    let (alpha, beta) = (ket.h, ket.v);
    let (c, d) = (projector.h, projector.v);
    let ac = alpha.norm_sqr() * c.norm_sqr();
    let bd = beta.norm_sqr() * d.norm_sqr();
    let cross = alpha * beta.conj() * c.conj() * d + alpha.conj() * beta * c * d.conj();
    0.5 * (ac + bd + cross.re * math::cos(2.0 * gamma) + outcome.sign() * (ac - bd) * math::sin(2.0 * gamma))
}

/// Probability of `+1` for noisy X with visibility `eta`, assembled from
/// `γ = 0` pipeline data: `eta` times the sharp-X marginal plus `1 − eta`
/// times the trivial-POVM value read off the two Y projectors.
pub fn mixed_noisy_x_prob(ket: &PolKet, eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            min: 0.0,
            max: 1.0,
        });
    }
    use crate::states::Projector;
    let x_plus = Projector::XPlus.ket();
    let sharp = tomography_prob(ket, 0.0, Outcome::Plus, &x_plus)? + tomography_prob(ket, 0.0, Outcome::Minus, &x_plus)?;
    let trivial = tomography_prob(ket, 0.0, Outcome::Plus, &Projector::YPlus.ket())?
        + tomography_prob(ket, 0.0, Outcome::Plus, &Projector::YMinus.ket())?;
    Ok(eta * sharp + (1.0 - eta) * trivial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::born_prob;
    use crate::measurements::noisy_x;
    use crate::states::{CanonicalState, Projector};
    use core::f64::consts::FRAC_1_SQRT_2;

    fn ket(theta: f64, phase: f64) -> PolKet {
        PolKet::from_angles(theta, phase)
    }

    /// Stage formulas written out term by term.
    fn boxed(ket: &PolKet, gamma: f64, phi: f64) -> [[C64; 4]; 3] {
        let (a, b) = (ket.h, ket.v);
        let (cg, sg) = (gamma.cos(), gamma.sin());
        let (c2, s2) = ((2.0 * phi).cos(), (2.0 * phi).sin());
        let psi4 = [a * cg, a * sg, b * cg, -b * sg];
        let psi5 = [
            a * (cg * c2 + sg * s2),
            a * (cg * s2 - sg * c2),
            b * (cg * c2 - sg * s2),
            b * (cg * s2 + sg * c2),
        ];
        let psi6 = [psi5[0], ZERO, psi5[2], ZERO];
        [psi4, psi5, psi6]
    }

    #[test]
    fn stages_match_written_formulas() {
        for &(theta, phase) in &[(0.3, 0.0), (1.1, 0.7), (0.0, 0.0), (FRAC_PI_4, -2.0)] {
            let k = ket(theta, phase);
            for gamma in [0.0, 0.2, FRAC_PI_8, FRAC_PI_4] {
                for phi in [FRAC_PI_8, -FRAC_PI_8] {
                    let trace = propagate(&k, gamma, phi).unwrap();
                    let expected = boxed(&k, gamma, phi);
                    for (stage, exp) in trace.stages[3..6].iter().zip(expected) {
                        let got = stage.state.amplitudes();
                        for (g, e) in got.iter().zip(exp) {
                            assert!((g - e).norm() < 1e-15, "{}", stage.label);
                        }
                    }
                    let op = branch_operator(gamma, phi).unwrap();
                    let out = trace.output();
                    assert!((out.h - op[(0, 0)] * k.h).norm() < 1e-15);
                    assert!((out.v - op[(1, 1)] * k.v).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn transmitted_branch_closed_form() {
        let k = ket(0.4, 0.3);
        for gamma in [0.1, FRAC_PI_8, 0.7] {
            let out = branch_output(&k, gamma, Outcome::Plus).unwrap();
            let s = FRAC_1_SQRT_2;
            assert!((out.h - k.h * s * (gamma.cos() + gamma.sin())).norm() < 1e-15);
            assert!((out.v - k.v * s * (gamma.cos() - gamma.sin())).norm() < 1e-15);
        }
    }

    #[test]
    fn gamma_zero_halves_the_norm() {
        let k = ket(0.9, 1.3);
        for a in Outcome::BOTH {
            let out = branch_output(&k, 0.0, a).unwrap();
            assert!((out.h - k.h * FRAC_1_SQRT_2).norm() < 1e-15);
            assert!((out.v - k.v * FRAC_1_SQRT_2).norm() < 1e-15);
        }
    }

    #[test]
    fn sharp_branch_blocks_vertical_input() {
        let out = branch_output(&CanonicalState::V.ket(), FRAC_PI_4, Outcome::Plus).unwrap();
        assert!(out.norm_sqr() < 1e-30);
    }

    #[test]
    fn only_the_pbs_changes_the_norm() {
        let k = ket(0.7, 0.4);
        let trace = propagate(&k, 0.3, FRAC_PI_8).unwrap();
        let norms: Vec<f64> = trace.stages.iter().map(|s| s.state.norm_sqr()).collect();
        for i in 1..norms.len() {
            if trace.stages[i].label == "psi_6" {
                assert!(norms[i] < norms[i - 1]);
            } else {
                assert!((norms[i] - norms[i - 1]).abs() < 1e-12, "{}", trace.stages[i].label);
            }
        }
        let plus = trace.output().norm_sqr();
        let minus = branch_output(&k, 0.3, Outcome::Minus).unwrap().norm_sqr();
        assert!((plus + minus - 1.0).abs() < 1e-12);
        let rho = k.density();
        assert!((plus - born_prob(noisy_z(0.3).unwrap().plus(), &rho).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let k = CanonicalState::H.ket();
        assert!(matches!(propagate(&k, 0.1, 0.3), Err(Error::InvalidBranch(_))));
        assert!(matches!(propagate(&k, 1.0, FRAC_PI_8), Err(Error::OutOfRange { .. })));
        let bad = PolKet::unnormalised(C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        assert!(matches!(propagate(&bad, 0.1, FRAC_PI_8), Err(Error::InvalidKet(_))));
    }

    #[test]
    fn pipeline_matches_lueders() {
        assert!(pipeline_vs_lueders(&CanonicalState::H.ket(), FRAC_PI_4).unwrap() < 1e-15);
        let plus = CanonicalState::Plus.ket();
        for a in Outcome::BOTH {
            let out = branch_output(&plus, FRAC_PI_8, a).unwrap();
            assert!((out.norm_sqr() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn tomography_table_entries() {
        let h = CanonicalState::H.ket();
        let p = tomography_prob(&h, FRAC_PI_8, Outcome::Plus, &Projector::XPlus.ket()).unwrap();
        assert!((p - 0.427).abs() < 5e-4);
        let minus = CanonicalState::Minus.ket();
        let p = tomography_prob(&minus, FRAC_PI_4, Outcome::Plus, &Projector::ZPlus.ket()).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        for s in CanonicalState::EXPERIMENT {
            for a in Outcome::BOTH {
                let p = tomography_prob(&s.ket(), 0.0, a, &Projector::YPlus.ket()).unwrap();
                assert!((p - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_agrees_with_pipeline_for_complex_inputs() {
        let k = ket(0.8, 0.9);
        for gamma in [0.0, 0.3, FRAC_PI_8, FRAC_PI_4] {
            for a in Outcome::BOTH {
                for proj in Projector::ALL {
                    let pipe = tomography_prob(&k, gamma, a, &proj.ket()).unwrap();
                    let closed = tomography_closed_form(&k, gamma, a, &proj.ket());
                    assert!((pipe - closed).abs() < 1e-14);
                }
            }
        }
        // Complex inputs move the Y rows away from 1/4.
        let y = tomography_prob(&k, 0.0, Outcome::Plus, &Projector::YPlus.ket()).unwrap();
        assert!((y - 0.25).abs() > 1e-3);
    }

    #[test]
    fn mixed_noisy_x() {
        let plus = CanonicalState::Plus.ket();
        let psi = CanonicalState::PsiMinus.ket();
        assert!((mixed_noisy_x_prob(&plus, FRAC_1_SQRT_2).unwrap() - 0.854).abs() < 5e-4);
        assert!((mixed_noisy_x_prob(&psi, FRAC_1_SQRT_2).unwrap() - 0.75).abs() < 1e-14);
        for s in CanonicalState::ALL {
            assert!((mixed_noisy_x_prob(&s.ket(), 0.0).unwrap() - 0.5).abs() < 1e-15);
        }
        let k = ket(0.8, 0.9);
        for eta in [0.0, 0.3, FRAC_1_SQRT_2, 1.0] {
            let direct = born_prob(noisy_x(eta).unwrap().plus(), &k.density()).unwrap();
            assert!((mixed_noisy_x_prob(&k, eta).unwrap() - direct).abs() < 1e-12);
        }
    }
}
