//! Binary POVMs, instruments in Kraus form, their Heisenberg duals and the
//! joint observables produced by measuring two of them in sequence.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;
use core::fmt;

use crate::linalg::{self, check_dims, pauli, psd_sqrt, CMatrix};
use crate::math;
use crate::tol;
use crate::{Error, Result};

/// Outcome `±1` of a binary measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    /// Accepts `+`, `+1`, `1`, `plus` and the minus counterparts.
    pub fn parse(label: &str) -> Result<Self> {
        match label.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Outcome::Plus),
            "-" | "-1" | "--" | "minus" => Ok(Outcome::Minus),
            other => Err(Error::UnknownOutcome(other.into())),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Two-outcome POVM `(E₊, E₋)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPovm {
    effects: [CMatrix; 2],
}

impl BinaryPovm {
    pub fn new(plus: CMatrix, minus: CMatrix) -> Result<Self> {
        check_dims(&plus, &minus)?;
        for e in [&plus, &minus] {
            linalg::validate_effect(e)?;
        }
        let defect = (&(&plus + &minus) - &CMatrix::identity(plus.dim())).frobenius_norm();
        if defect > tol::COMPLETENESS {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only up to {defect:.3e}"
            )));
        }
        Ok(Self {
            effects: [plus, minus],
        })
    }

    /// POVM `(E, 𝟙 − E)`.
    pub fn from_plus(plus: CMatrix) -> Result<Self> {
        let minus = &CMatrix::identity(plus.dim()) - &plus;
        Self::new(plus, minus)
    }

    /// `½[𝟙 ± m·σ]` on a qubit.
    pub fn unbiased_qubit(m: [f64; 3]) -> Result<Self> {
        Self::from_plus(pauli::bloch_operator(1.0, m))
    }

    pub fn trivial(dim: usize) -> Self {
        let half = CMatrix::identity(dim).scale(0.5);
        Self {
            effects: [half.clone(), half],
        }
    }

    pub fn sharp_x() -> Self {
        Self::unbiased_qubit([1.0, 0.0, 0.0]).expect("sharp X")
    }

    pub fn sharp_y() -> Self {
        Self::unbiased_qubit([0.0, 1.0, 0.0]).expect("sharp Y")
    }

    pub fn sharp_z() -> Self {
        Self::unbiased_qubit([0.0, 0.0, 1.0]).expect("sharp Z")
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effect(&self, a: Outcome) -> &CMatrix {
        &self.effects[a.index()]
    }

    pub fn plus(&self) -> &CMatrix {
        &self.effects[0]
    }

    pub fn minus(&self) -> &CMatrix {
        &self.effects[1]
    }

    /// `m` such that `E± = ½[𝟙 ± m·σ]`, when this is an unbiased qubit POVM.
    pub fn unbiased_vector(&self, tol: f64) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let (c, m) = pauli::bloch_coefficients(self.plus());
        (math::abs(c - 1.0) <= tol).then_some(m)
    }

    /// Largest entrywise distance in Frobenius norm between matching effects.
    pub fn distance(&self, other: &BinaryPovm) -> f64 {
        Outcome::BOTH
            .iter()
            .map(|&a| self.effect(a).distance(other.effect(a)))
            .fold(0.0, f64::max)
    }
}

/// Noisy Z observable `A^γ± = ½[𝟙 ± sin(2γ)σ_z]` for `γ ∈ [0, π/4]`.
pub fn noisy_z(gamma: f64) -> Result<BinaryPovm> {
    check_gamma(gamma)?;
    BinaryPovm::unbiased_qubit([0.0, 0.0, math::sin(2.0 * gamma)])
}

/// Noisy X observable `X^η± = ½(𝟙 ± ησ_x)` for visibility `η ∈ [0, 1]`.
pub fn noisy_x(eta: f64) -> Result<BinaryPovm> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            min: 0.0,
            max: 1.0,
        });
    }
    BinaryPovm::unbiased_qubit([eta, 0.0, 0.0])
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_4 + 1e-15).contains(&gamma) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            min: 0.0,
            max: FRAC_PI_4,
        });
    }
    Ok(())
}

/// Two-outcome instrument; outcome `a` acts as `ρ ↦ Σ_k K_{a,k} ρ K_{a,k}†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    kraus: [Vec<CMatrix>; 2],
}

impl Instrument {
    pub fn new(plus: Vec<CMatrix>, minus: Vec<CMatrix>) -> Result<Self> {
        let first = plus
            .first()
            .or(minus.first())
            .ok_or_else(|| Error::InvalidInstrument("no Kraus operators".into()))?;
        let dim = first.dim();
        let mut total = CMatrix::zeros(dim);
        for k in plus.iter().chain(&minus) {
            check_dims(first, k)?;
            total = &total + &(&k.adjoint() * k);
        }
        let defect = total.distance(&CMatrix::identity(dim));
        if defect > tol::COMPLETENESS {
            return Err(Error::InvalidInstrument(format!(
                "not trace preserving (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            kraus: [plus, minus],
        })
    }

    /// Lüders instrument `ρ ↦ √E_a ρ √E_a`.
    pub fn lueders(povm: &BinaryPovm) -> Result<Self> {
        let plus = psd_sqrt(povm.plus())?;
        let minus = psd_sqrt(povm.minus())?;
        Self::new(vec![plus], vec![minus])
    }

    /// No first measurement, encoded as `ρ ↦ ½ρ` for both outcomes.
    pub fn no_measurement(dim: usize) -> Self {
        let k = CMatrix::identity(dim).scale(core::f64::consts::FRAC_1_SQRT_2);
        Self {
            kraus: [vec![k.clone()], vec![k]],
        }
    }

    /// Follows outcome `a` by the channel with Kraus operators `noise`.
    pub fn with_noise(&self, a: Outcome, noise: &[CMatrix]) -> Result<Self> {
        let mut kraus = self.kraus.clone();
        kraus[a.index()] = noise
            .iter()
            .flat_map(|e| self.kraus[a.index()].iter().map(move |k| e * k))
            .collect();
        let [plus, minus] = kraus;
        Self::new(plus, minus)
    }

    pub fn dim(&self) -> usize {
        self.kraus[0]
            .first()
            .or(self.kraus[1].first())
            .map(CMatrix::dim)
            .unwrap_or(0)
    }

    pub fn kraus(&self, a: Outcome) -> &[CMatrix] {
        &self.kraus[a.index()]
    }

    /// Subnormalised post-measurement state for outcome `a`.
    pub fn apply(&self, a: Outcome, rho: &CMatrix) -> Result<CMatrix> {
        self.check(rho)?;
        let mut out = CMatrix::zeros(rho.dim());
        for k in self.kraus(a) {
            out = &out + &(&(k * rho) * &k.adjoint());
        }
        Ok(out)
    }

    /// Heisenberg dual `M ↦ Σ_k K_{a,k}† M K_{a,k}`.
    pub fn heisenberg(&self, a: Outcome, m: &CMatrix) -> Result<CMatrix> {
        self.check(m)?;
        let mut out = CMatrix::zeros(m.dim());
        for k in self.kraus(a) {
            out = &out + &(&(&k.adjoint() * m) * k);
        }
        Ok(out)
    }

    /// Sum of both outcome maps.
    pub fn total_channel(&self, rho: &CMatrix) -> Result<CMatrix> {
        Ok(&self.apply(Outcome::Plus, rho)? + &self.apply(Outcome::Minus, rho)?)
    }

    /// Heisenberg dual of the total channel.
    pub fn total_dual(&self, m: &CMatrix) -> Result<CMatrix> {
        Ok(&self.heisenberg(Outcome::Plus, m)? + &self.heisenberg(Outcome::Minus, m)?)
    }

    /// POVM measured by this instrument.
    pub fn induced_povm(&self) -> Result<BinaryPovm> {
        let id = CMatrix::identity(self.dim());
        BinaryPovm::new(
            self.heisenberg(Outcome::Plus, &id)?,
            self.heisenberg(Outcome::Minus, &id)?,
        )
    }

    /// Joint observable `G_{a,b} = I_a*(F_b)` of this instrument followed by `last`.
    pub fn sequential_joint(&self, last: &BinaryPovm) -> Result<JointPovm> {
        sequential_joint(self, last)
    }

    fn check(&self, m: &CMatrix) -> Result<()> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: m.dim(),
            });
        }
        Ok(())
    }
}

/// Four-outcome POVM `G_{a,b}` indexed by `a, b ∈ {+1, −1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPovm {
    effects: [[CMatrix; 2]; 2],
}

impl JointPovm {
    pub fn new(effects: [[CMatrix; 2]; 2]) -> Result<Self> {
        Self::with_tolerance(effects, tol::PSD_SLACK)
    }

    /// Validates positivity and completeness at `tol` instead of the default slack.
    pub fn with_tolerance(effects: [[CMatrix; 2]; 2], tol: f64) -> Result<Self> {
        let dim = effects[0][0].dim();
        let mut total = CMatrix::zeros(dim);
        for row in &effects {
            for g in row {
                check_dims(&total, g)?;
                let eig = linalg::herm_eig(g)?;
                if eig.min_eigenvalue() < -tol {
                    return Err(Error::InvalidPovm(format!(
                        "joint effect has eigenvalue {:.3e}",
                        eig.min_eigenvalue()
                    )));
                }
                total = &total + g;
            }
        }
        let defect = total.distance(&CMatrix::identity(dim));
        if defect > tol.max(tol::COMPLETENESS) {
            return Err(Error::InvalidPovm(format!(
                "joint effects sum to identity only up to {defect:.3e}"
            )));
        }
        Ok(Self { effects })
    }

    pub fn dim(&self) -> usize {
        self.effects[0][0].dim()
    }

    pub fn effect(&self, a: Outcome, b: Outcome) -> &CMatrix {
        &self.effects[a.index()][b.index()]
    }

    pub fn effects(&self) -> &[[CMatrix; 2]; 2] {
        &self.effects
    }

    /// Exchanges the roles of the two outcome labels.
    pub fn transposed(&self) -> JointPovm {
        let e = &self.effects;
        JointPovm {
            effects: [
                [e[0][0].clone(), e[1][0].clone()],
                [e[0][1].clone(), e[1][1].clone()],
            ],
        }
    }

    /// `(Σ_b G_{a,b}, Σ_a G_{a,b})`.
    pub fn margins(&self) -> Result<(BinaryPovm, BinaryPovm)> {
        let e = &self.effects;
        let first = BinaryPovm::new(&e[0][0] + &e[0][1], &e[1][0] + &e[1][1])?;
        let second = BinaryPovm::new(&e[0][0] + &e[1][0], &e[0][1] + &e[1][1])?;
        Ok((first, second))
    }

    /// `μ_{ab} = tr[ρ G_{a,b}]`, indexed `[a][b]`.
    pub fn probabilities(&self, rho: &CMatrix) -> Result<[[f64; 2]; 2]> {
        check_dims(self.effect(Outcome::Plus, Outcome::Plus), rho)?;
        linalg::validate_state(rho)?;
        let mut mu = [[0.0; 2]; 2];
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                mu[a.index()][b.index()] =
                    linalg::trace_pairing(self.effect(a, b), rho).clamp(0.0, 1.0);
            }
        }
        Ok(mu)
    }
}

/// `G_{a,b} = I_a*(F_b)`; first margin is the induced POVM, second the
/// total-channel dual of `last`.
pub fn sequential_joint(instr: &Instrument, last: &BinaryPovm) -> Result<JointPovm> {
    if instr.dim() != last.dim() {
        return Err(Error::DimensionMismatch {
            left: instr.dim(),
            right: last.dim(),
        });
    }
    let g = |a, b| instr.heisenberg(a, last.effect(b));
    JointPovm::new([
        [g(Outcome::Plus, Outcome::Plus)?, g(Outcome::Plus, Outcome::Minus)?],
        [g(Outcome::Minus, Outcome::Plus)?, g(Outcome::Minus, Outcome::Minus)?],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{born_prob, schur, trace_pairing, C64};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

    fn id() -> CMatrix {
        CMatrix::identity(2)
    }

    #[test]
    fn noisy_z_endpoints() {
        let trivial = noisy_z(0.0).unwrap();
        assert!(trivial.distance(&BinaryPovm::trivial(2)) < 1e-15);
        assert!(noisy_z(FRAC_PI_4).unwrap().distance(&BinaryPovm::sharp_z()) < 1e-15);
        let a = noisy_z(FRAC_PI_8).unwrap();
        let expected = &id().scale(0.5) + &pauli::z().scale(0.5 * FRAC_1_SQRT_2);
        assert!(a.plus().distance(&expected) < 1e-15);
    }

    #[test]
    fn gamma_out_of_range() {
        assert!(matches!(noisy_z(-0.1), Err(Error::OutOfRange { .. })));
        assert!(matches!(noisy_z(1.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(noisy_x(1.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn noisy_x_family() {
        assert!(noisy_x(1.0).unwrap().distance(&BinaryPovm::sharp_x()) < 1e-15);
        assert!(noisy_x(0.0).unwrap().distance(&BinaryPovm::trivial(2)) < 1e-15);
        let b = noisy_x(FRAC_1_SQRT_2).unwrap();
        let expected = &id().scale(0.5) + &pauli::x().scale(0.5 * FRAC_1_SQRT_2);
        assert!(b.plus().distance(&expected) < 1e-15);
    }

    #[test]
    fn lueders_of_projections_is_projective() {
        let z = BinaryPovm::sharp_z();
        let instr = Instrument::lueders(&z).unwrap();
        assert!(instr.kraus(Outcome::Plus)[0].distance(z.plus()) < 1e-15);
        assert!(instr.kraus(Outcome::Minus)[0].distance(z.minus()) < 1e-15);
    }

    #[test]
    fn lueders_kraus_closed_form() {
        for gamma in [0.0, 0.1, FRAC_PI_8, 0.6, FRAC_PI_4] {
            let instr = Instrument::lueders(&noisy_z(gamma).unwrap()).unwrap();
            for a in Outcome::BOTH {
                let k = (&id().scale(gamma.cos()) + &pauli::z().scale(a.sign() * gamma.sin()))
                    .scale(FRAC_1_SQRT_2);
                assert!(instr.kraus(a)[0].distance(&k) < 1e-14, "gamma {gamma}");
            }
        }
    }

    #[test]
    fn trivial_instrument_halves_the_state() {
        let instr = Instrument::lueders(&BinaryPovm::trivial(2)).unwrap();
        let rho = CanonicalRho::plus();
        for a in Outcome::BOTH {
            assert!(instr.apply(a, &rho).unwrap().distance(&rho.scale(0.5)) < 1e-15);
        }
        assert!(Instrument::no_measurement(2).induced_povm().unwrap().distance(&BinaryPovm::trivial(2)) < 1e-15);
    }

    struct CanonicalRho;
    impl CanonicalRho {
        fn h() -> CMatrix {
            CMatrix::diag(&[1.0, 0.0])
        }
        fn plus() -> CMatrix {
            CMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap()
        }
    }

    #[test]
    fn apply_examples() {
        let h = CanonicalRho::h();
        let sharp = Instrument::lueders(&noisy_z(FRAC_PI_4).unwrap()).unwrap();
        assert!(sharp.apply(Outcome::Plus, &h).unwrap().distance(&h) < 1e-15);
        let noisy = Instrument::lueders(&noisy_z(FRAC_PI_8).unwrap()).unwrap();
        let out = noisy.apply(Outcome::Plus, &h).unwrap();
        assert!(out.distance(&h.scale(0.5 * (1.0 + FRAC_1_SQRT_2))) < 1e-15);
        assert!((out.trace().re - 0.854).abs() < 5e-4);
    }

    #[test]
    fn heisenberg_examples() {
        for gamma in [0.0, 0.2, FRAC_PI_8, FRAC_PI_4] {
            let a_pov = noisy_z(gamma).unwrap();
            let instr = Instrument::lueders(&a_pov).unwrap();
            let x = BinaryPovm::sharp_x();
            for a in Outcome::BOTH {
                assert!(instr.heisenberg(a, &id()).unwrap().distance(a_pov.effect(a)) < 1e-14);
                for b in Outcome::BOTH {
                    let expected = pauli::bloch_operator(
                        0.5,
                        [
                            0.5 * b.sign() * (2.0 * gamma).cos(),
                            0.0,
                            0.5 * a.sign() * (2.0 * gamma).sin(),
                        ],
                    );
                    let g = instr.heisenberg(a, x.effect(b)).unwrap();
                    assert!(g.distance(&expected) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn total_channel_schur_forms() {
        let rho = CMatrix::from_vec(
            2,
            vec![C64::new(0.7, 0.0), C64::new(0.2, 0.3), C64::new(0.2, -0.3), C64::new(0.3, 0.0)],
        )
        .unwrap();
        let phi0 = Instrument::lueders(&noisy_z(0.0).unwrap()).unwrap();
        assert!(phi0.total_channel(&rho).unwrap().distance(&rho) < 1e-15);
        let phi4 = Instrument::lueders(&noisy_z(FRAC_PI_4).unwrap()).unwrap();
        assert!(phi4.total_channel(&rho).unwrap().distance(&CMatrix::diag(&[0.7, 0.3])) < 1e-15);
        let phi8 = Instrument::lueders(&noisy_z(FRAC_PI_8).unwrap()).unwrap();
        let c = FRAC_1_SQRT_2;
        let mask = CMatrix::from_real(2, &[1.0, c, c, 1.0]).unwrap();
        assert!(phi8.total_channel(&rho).unwrap().distance(&schur(&mask, &rho).unwrap()) < 1e-15);
    }

    #[test]
    fn sequential_joint_with_z_is_smeared_z() {
        for gamma in [0.0, 0.3, FRAC_PI_8, FRAC_PI_4] {
            let instr = Instrument::lueders(&noisy_z(gamma).unwrap()).unwrap();
            let z = BinaryPovm::sharp_z();
            let g = sequential_joint(&instr, &z).unwrap();
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    let w = 0.5 * (1.0 + a.sign() * b.sign() * (2.0 * gamma).sin());
                    assert!(g.effect(a, b).distance(&z.effect(b).scale(w)) < 1e-14);
                }
            }
            let (_, second) = g.margins().unwrap();
            assert!(second.distance(&z) < 1e-14);
        }
    }

    #[test]
    fn sequential_joint_with_x_margins() {
        for gamma in [0.0, 0.3, FRAC_PI_8, FRAC_PI_4] {
            let a_pov = noisy_z(gamma).unwrap();
            let instr = Instrument::lueders(&a_pov).unwrap();
            let g = sequential_joint(&instr, &BinaryPovm::sharp_x()).unwrap();
            let (first, second) = g.margins().unwrap();
            assert!(first.distance(&a_pov) < 1e-14);
            assert!(second.distance(&noisy_x((2.0 * gamma).cos()).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn uniform_joint_has_trivial_margins() {
        let q = id().scale(0.25);
        let g = JointPovm::new([[q.clone(), q.clone()], [q.clone(), q]]).unwrap();
        let (a, b) = g.margins().unwrap();
        assert!(a.distance(&BinaryPovm::trivial(2)) < 1e-15);
        assert!(b.distance(&BinaryPovm::trivial(2)) < 1e-15);
    }

    #[test]
    fn invalid_constructions() {
        assert!(matches!(
            BinaryPovm::new(id(), id()),
            Err(Error::InvalidPovm(_))
        ));
        assert!(matches!(
            Instrument::new(vec![id()], vec![id()]),
            Err(Error::InvalidInstrument(_))
        ));
        let instr = Instrument::lueders(&BinaryPovm::sharp_z()).unwrap();
        assert!(matches!(
            sequential_joint(&instr, &BinaryPovm::trivial(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(Outcome::parse("0"), Err(Error::UnknownOutcome(_))));
    }

    #[test]
    fn noise_channel_composition_keeps_the_effect() {
        let instr = Instrument::lueders(&noisy_z(FRAC_PI_8).unwrap()).unwrap();
        // Bit flip with probability 0.3 after outcome +.
        let noise = [id().scale(0.7f64.sqrt()), pauli::x().scale(0.3f64.sqrt())];
        let noisy = instr.with_noise(Outcome::Plus, &noise).unwrap();
        assert!(noisy.induced_povm().unwrap().distance(&instr.induced_povm().unwrap()) < 1e-14);
        let rho = CanonicalRho::h();
        let out = noisy.apply(Outcome::Plus, &rho).unwrap();
        assert!((out.trace().re - born_prob(noisy_z(FRAC_PI_8).unwrap().plus(), &rho).unwrap()).abs() < 1e-14);
        let m = pauli::z();
        let lhs = trace_pairing(&noisy.heisenberg(Outcome::Plus, &m).unwrap(), &rho);
        let rhs = trace_pairing(&m, &out);
        assert!((lhs - rhs).abs() < 1e-14);
    }
}
