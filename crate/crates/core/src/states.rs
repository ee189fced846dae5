//! Qubit polarization states, the canonical experimental inputs and the six
//! tomography projectors.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};
use core::fmt;

use crate::linalg::{pauli, CMatrix, C64};
use crate::math;
use crate::{Error, Result};

/// Pure polarization state `α|H⟩ + β|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolKet {
    pub h: C64,
    pub v: C64,
}

impl PolKet {
    /// Normalised ket; fails when `| |α|²+|β|² − 1 | > 1e-12`.
    pub fn new(h: C64, v: C64) -> Result<Self> {
        let ket = Self { h, v };
        let n = ket.norm_sqr();
        if math::abs(n - 1.0) > 1e-12 {
            return Err(Error::InvalidKet(alloc::format!("squared norm {n}")));
        }
        Ok(ket)
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(C64::new(alpha, 0.0), C64::new(beta, 0.0))
    }

    /// `cos θ|H⟩ + e^{iφ} sin θ|V⟩`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            h: C64::new(math::cos(theta), 0.0),
            v: C64::new(math::cos(phi), math::sin(phi)) * math::sin(theta),
        }
    }

    pub fn unnormalised(h: C64, v: C64) -> Self {
        Self { h, v }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.h, self.v]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PolKet) -> C64 {
        self.h.conj() * other.h + self.v.conj() * other.v
    }

    pub fn density(&self) -> CMatrix {
        CMatrix::outer(&self.amplitudes())
    }

    pub fn bloch(&self) -> [f64; 3] {
        bloch_vector(&self.density())
    }
}

/// `(r_x, r_y, r_z)` with `ρ = ½(𝟙 + r·σ)`.
pub fn bloch_vector(rho: &CMatrix) -> [f64; 3] {
    pauli::bloch_coefficients(rho).1
}

/// `½(𝟙 + r·σ)`.
pub fn from_bloch(r: [f64; 3]) -> CMatrix {
    pauli::bloch_operator(1.0, r)
}

/// Input states used in the experiment, plus the positively correlated
/// partner of the anti-correlated state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalState {
    H,
    V,
    /// `(|H⟩ + |V⟩)/√2`
    Plus,
    /// `(|H⟩ − |V⟩)/√2`
    Minus,
    /// `cos(π/8)|H⟩ + sin(π/8)|V⟩`, maximally anti-correlated for `G^{π/8}`.
    PsiMinus,
    /// `cos(π/8)|H⟩ − sin(π/8)|V⟩`, maximally correlated for `G^{π/8}`.
    PsiPlus,
}

impl CanonicalState {
    /// The five states of the experimental tables, in column order.
    pub const EXPERIMENT: [CanonicalState; 5] = [
        CanonicalState::H,
        CanonicalState::V,
        CanonicalState::Plus,
        CanonicalState::Minus,
        CanonicalState::PsiMinus,
    ];

    pub const ALL: [CanonicalState; 6] = [
        CanonicalState::H,
        CanonicalState::V,
        CanonicalState::Plus,
        CanonicalState::Minus,
        CanonicalState::PsiMinus,
        CanonicalState::PsiPlus,
    ];

    pub fn ket(self) -> PolKet {
        let r = |a: f64, b: f64| PolKet::unnormalised(C64::new(a, 0.0), C64::new(b, 0.0));
        let (c, s) = (math::cos(FRAC_PI_8), math::sin(FRAC_PI_8));
        match self {
            CanonicalState::H => r(1.0, 0.0),
            CanonicalState::V => r(0.0, 1.0),
            CanonicalState::Plus => r(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            CanonicalState::Minus => r(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            CanonicalState::PsiMinus => r(c, s),
            CanonicalState::PsiPlus => r(c, -s),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CanonicalState::H => "H",
            CanonicalState::V => "V",
            CanonicalState::Plus => "plus",
            CanonicalState::Minus => "minus",
            CanonicalState::PsiMinus => "psi-minus",
            CanonicalState::PsiPlus => "psi-plus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for CanonicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rank-one tomography projectors `|φ⟩⟨φ|`, in table row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Projector {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    ZPlus,
    ZMinus,
}

impl Projector {
    pub const ALL: [Projector; 6] = [
        Projector::XPlus,
        Projector::XMinus,
        Projector::YPlus,
        Projector::YMinus,
        Projector::ZPlus,
        Projector::ZMinus,
    ];

    pub fn ket(self) -> PolKet {
        let s = FRAC_1_SQRT_2;
        let (h, v) = match self {
            Projector::XPlus => (C64::new(s, 0.0), C64::new(s, 0.0)),
            Projector::XMinus => (C64::new(s, 0.0), C64::new(-s, 0.0)),
            Projector::YPlus => (C64::new(s, 0.0), C64::new(0.0, s)),
            Projector::YMinus => (C64::new(s, 0.0), C64::new(0.0, -s)),
            Projector::ZPlus => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            Projector::ZMinus => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        };
        PolKet::unnormalised(h, v)
    }

    pub fn matrix(self) -> CMatrix {
        self.ket().density()
    }

    pub fn label(self) -> &'static str {
        match self {
            Projector::XPlus => "X+",
            Projector::XMinus => "X-",
            Projector::YPlus => "Y+",
            Projector::YMinus => "Y-",
            Projector::ZPlus => "Z+",
            Projector::ZMinus => "Z-",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.label() == label)
    }

    /// Measurement basis letter.
    pub fn basis(self) -> char {
        match self {
            Projector::XPlus | Projector::XMinus => 'X',
            Projector::YPlus | Projector::YMinus => 'Y',
            Projector::ZPlus | Projector::ZMinus => 'Z',
        }
    }

    pub fn is_plus(self) -> bool {
        matches!(self, Projector::XPlus | Projector::YPlus | Projector::ZPlus)
    }

    /// The two projectors of a basis, `+` first.
    pub fn basis_pair(basis: char) -> Option<[Projector; 2]> {
        match basis {
            'X' => Some([Projector::XPlus, Projector::XMinus]),
            'Y' => Some([Projector::YPlus, Projector::YMinus]),
            'Z' => Some([Projector::ZPlus, Projector::ZMinus]),
            _ => None,
        }
    }
}

impl fmt::Display for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Kets of all canonical experimental states.
pub fn experiment_kets() -> Vec<PolKet> {
    CanonicalState::EXPERIMENT.iter().map(|s| s.ket()).collect()
}
