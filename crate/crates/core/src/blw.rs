//! Binary Wasserstein-2 distances, worst-case distances between POVMs, the
//! Busch–Lahti–Werner uncertainty sum of the noisy Z/X family, variances and
//! the correlation coefficient of a joint observable.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_8;

use crate::linalg::{self, check_dims, herm_eig, CMatrix};
use crate::math;
use crate::measurements::{check_gamma, noisy_z, sequential_joint, BinaryPovm, Instrument, JointPovm, Outcome};
use crate::states::bloch_vector;
use crate::tol;
use crate::{Error, Result};

/// Minimum of `Δ(A, Z)² + Δ(B, X)²` over jointly measurable binary pairs, `2(2 − √2)`.
pub const BLW_MIN_SUM: f64 = 2.0 * (2.0 - core::f64::consts::SQRT_2);

/// Binary distribution on `{+1, −1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryDist {
    p_plus: f64,
}

impl BinaryDist {
    pub fn new(p_plus: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_plus) {
            return Err(Error::OutOfRange {
                name: "p_plus",
                value: p_plus,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Self { p_plus })
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn p_minus(&self) -> f64 {
        1.0 - self.p_plus
    }

    pub fn mean(&self) -> f64 {
        2.0 * self.p_plus - 1.0
    }

    /// `4p(1 − p)`.
    pub fn variance(&self) -> f64 {
        4.0 * self.p_plus * (1.0 - self.p_plus)
    }
}

/// Squared Wasserstein-2 distance of two `±1` distributions, `4|p₁ − p₂|`.
pub fn w2_sq(d1: BinaryDist, d2: BinaryDist) -> f64 {
    4.0 * math::abs(d1.p_plus - d2.p_plus)
}

/// `sup_ρ w2_sq` between the distributions of `P` and `Q`: four times the
/// spectral radius of `P₊ − Q₊`.
pub fn worst_case_delta_sq(p: &BinaryPovm, q: &BinaryPovm) -> Result<f64> {
    check_dims(p.plus(), q.plus())?;
    let eig = herm_eig(&(p.plus() - q.plus()))?;
    Ok(4.0 * math::abs(eig.min_eigenvalue()).max(math::abs(eig.max_eigenvalue())))
}

/// The noisy X margin `B^γ` left after the Lüders noisy-Z instrument and a sharp X.
pub fn retrieved_x(gamma: f64) -> Result<BinaryPovm> {
    let instr = Instrument::lueders(&noisy_z(gamma)?)?;
    Ok(sequential_joint(&instr, &BinaryPovm::sharp_x())?.margins()?.1)
}

/// Joint observable `G^γ` of the Lüders noisy-Z instrument followed by sharp X.
pub fn retrieving_joint(gamma: f64) -> Result<JointPovm> {
    let instr = Instrument::lueders(&noisy_z(gamma)?)?;
    sequential_joint(&instr, &BinaryPovm::sharp_x())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyRow {
    pub gamma: f64,
    pub delta_a_sq: f64,
    pub delta_b_sq: f64,
    pub sum: f64,
}

impl UncertaintyRow {
    pub fn at(gamma: f64) -> Result<Self> {
        let delta_a_sq = worst_case_delta_sq(&noisy_z(gamma)?, &BinaryPovm::sharp_z())?;
        let delta_b_sq = worst_case_delta_sq(&retrieved_x(gamma)?, &BinaryPovm::sharp_x())?;
        Ok(Self {
            gamma,
            delta_a_sq,
            delta_b_sq,
            sum: delta_a_sq + delta_b_sq,
        })
    }
}

/// Grid minimum alongside the closed-form optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    /// Grid point with the smallest sum.
    pub grid_gamma: f64,
    pub delta_a_sq: f64,
    pub delta_b_sq: f64,
    pub sum: f64,
    /// Closed-form minimiser `π/8`.
    pub gamma_star: f64,
    /// Sum evaluated at `gamma_star`.
    pub min_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlwScan {
    pub rows: Vec<UncertaintyRow>,
    pub report: UncertaintyReport,
}

pub fn blw_sum_scan(grid: &[f64]) -> Result<BlwScan> {
    if grid.len() < 3 {
        return Err(Error::EmptyGrid(grid.len()));
    }
    let rows = grid
        .iter()
        .map(|&g| UncertaintyRow::at(g))
        .collect::<Result<Vec<_>>>()?;
    let best = rows
        .iter()
        .min_by(|a, b| a.sum.total_cmp(&b.sum))
        .copied()
        .expect("non-empty grid");
    let at_star = UncertaintyRow::at(FRAC_PI_8)?;
    Ok(BlwScan {
        rows,
        report: UncertaintyReport {
            grid_gamma: best.gamma,
            delta_a_sq: best.delta_a_sq,
            delta_b_sq: best.delta_b_sq,
            sum: best.sum,
            gamma_star: FRAC_PI_8,
            min_sum: at_star.sum,
        },
    })
}

/// `n` equally spaced angles covering `[0, π/4]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..n)
            .map(|i| core::f64::consts::FRAC_PI_4 * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `4p(1 − p)` with `p = tr[P₊ρ]`.
pub fn variance(p: &BinaryPovm, rho: &CMatrix) -> Result<f64> {
    let prob = linalg::born_prob(p.plus(), rho)?;
    Ok(BinaryDist::new(prob)?.variance())
}

/// `Var(A^γ, ρ) + Var(B^γ, ρ) = 2 − r_x² cos²(2γ) − r_z² sin²(2γ)`.
pub fn uncertainty_sum(gamma: f64, rho: &CMatrix) -> Result<f64> {
    check_gamma(gamma)?;
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: rho.dim(),
        });
    }
    linalg::validate_state(rho)?;
    let r = bloch_vector(rho);
    let (s, c) = (math::sin(2.0 * gamma), math::cos(2.0 * gamma));
    Ok(2.0 - r[0] * r[0] * c * c - r[2] * r[2] * s * s)
}

/// Correlation coefficient from joint probabilities `μ[a][b]` and the
/// marginal statistics they are compared against.
pub fn correlation_from_moments(mu: [[f64; 2]; 2], p: f64, q: f64, var_a: f64, var_b: f64) -> Result<f64> {
    if var_a <= tol::VARIANCE_FLOOR || var_b <= tol::VARIANCE_FLOOR {
        return Err(Error::UndefinedCorrelation { var_a, var_b });
    }
    let product = mu[0][0] + mu[1][1] - mu[0][1] - mu[1][0];
    Ok((product - (2.0 * p - 1.0) * (2.0 * q - 1.0)) / math::sqrt(var_a * var_b))
}

/// Correlation between the two margins of `J` in state `ρ`.
pub fn correlation(j: &JointPovm, rho: &CMatrix) -> Result<f64> {
    let mu = j.probabilities(rho)?;
    let p = mu[Outcome::Plus.index()][0] + mu[Outcome::Plus.index()][1];
    let q = mu[0][Outcome::Plus.index()] + mu[1][Outcome::Plus.index()];
    let var_a = 4.0 * p * (1.0 - p);
    let var_b = 4.0 * q * (1.0 - q);
    Ok(correlation_from_moments(mu, p, q, var_a, var_b)?.clamp(-1.0, 1.0))
}

/// `sin(4γ) / (2 + sin 4γ)`, the largest `|Corr(G^γ, ρ)|` over states.
pub fn corr_bound(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let s = math::sin(4.0 * gamma);
    Ok(s / (2.0 + s))
}
