//! Joint measurability of two binary POVMs.
//!
//! A pair `(P, Q)` is jointly measurable when some `G_{a,b} ⪰ 0` has
//! `Σ_b G_{a,b} = P_a` and `Σ_a G_{a,b} = Q_b`. Every such `G` is
//! `G0_{a,b} + s_{ab}·T` with `G0_{a,b} = ½(P_a + Q_b) − ¼𝟙`, `s_{ab} = ab` and
//! `T` Hermitian, so the search alternates between the per-effect PSD cone and
//! that affine set.
//!
//! The checker reports feasibility only with an explicit witness and
//! infeasibility only with a separating certificate: a blockwise PSD `W`
//! orthogonal to the null direction `s` whose pairing with `G0` is below the
//! smallest value `⟨W, G⟩` can take on effects with `0 ⪯ G ⪯ 𝟙`. For unbiased
//! qubit pairs the closed-form criterion `|p + q| + |p − q| ≤ 2` is evaluated
//! as well and decides the verdict when the numeric route runs out of
//! iterations.

use core::f64::consts::FRAC_1_SQRT_2;

use alloc::vec::Vec;

use crate::linalg::{self, clamp_spectrum_below, herm_eig, CMatrix, C64};
use crate::math;
use crate::measurements::{sequential_joint, BinaryPovm, Instrument, JointPovm, Outcome};
use crate::tol;
use crate::{Error, Result};

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JmMethod {
    /// A constructed candidate (diagonal or Lüders-plus-retrieval) validated.
    Candidate,
    /// Alternating projections reached a witness.
    AlternatingProjections,
    /// A separating certificate proved infeasibility.
    Certificate,
    /// Numeric search was inconclusive; the unbiased-qubit criterion decided.
    AnalyticFallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JmReport {
    pub feasible: bool,
    pub witness: Option<JointPovm>,
    pub residual: f64,
    pub iterations: usize,
    pub method: JmMethod,
    /// Closed-form verdict for unbiased qubit pairs, when applicable.
    pub analytic: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JmOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub use_candidates: bool,
    pub use_analytic: bool,
    /// Iterations between certificate checks.
    pub certificate_every: usize,
}

impl JmOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_iter: tol::JM_MAX_ITER,
            use_candidates: true,
            use_analytic: true,
            certificate_every: 16,
        }
    }

    /// Alternating projections and certificates only.
    pub fn numeric_only(tol: f64) -> Self {
        Self {
            use_candidates: false,
            use_analytic: false,
            ..Self::new(tol)
        }
    }
}

/// `|p + q| + |p − q| ≤ 2` for `P± = ½[𝟙 ± p·σ]`, `Q± = ½[𝟙 ± q·σ]`.
pub fn unbiased_qubit_criterion(p: [f64; 3], q: [f64; 3]) -> f64 {
    let norm = |v: [f64; 3]| math::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    let sum = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
    let diff = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
    norm(sum) + norm(diff)
}

pub fn jm_feasible(p: &BinaryPovm, q: &BinaryPovm, tol: f64) -> Result<JmReport> {
    jm_feasible_with(p, q, &JmOptions::new(tol))
}

pub fn jm_feasible_with(p: &BinaryPovm, q: &BinaryPovm, opts: &JmOptions) -> Result<JmReport> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    if opts.tol.is_nan() || opts.tol < tol::JM_MIN_TOL {
        return Err(Error::OutOfRange {
            name: "tol",
            value: opts.tol,
            min: tol::JM_MIN_TOL,
            max: f64::INFINITY,
        });
    }

    let analytic = if opts.use_analytic {
        match (p.unbiased_vector(1e-12), q.unbiased_vector(1e-12)) {
            (Some(pv), Some(qv)) => Some(unbiased_qubit_criterion(pv, qv) <= 2.0 + opts.tol),
            _ => None,
        }
    } else {
        None
    };

    if opts.use_candidates {
        if let Some((witness, residual)) = candidate_witness(p, q, opts.tol) {
            return Ok(JmReport {
                feasible: true,
                witness: Some(witness),
                residual,
                iterations: 0,
                method: JmMethod::Candidate,
                analytic,
            });
        }
    }

    match alternating_projections(p, q, opts)? {
        Search::Witness {
            witness,
            residual,
            iterations,
        } => Ok(JmReport {
            feasible: true,
            witness: Some(witness),
            residual,
            iterations,
            method: JmMethod::AlternatingProjections,
            analytic,
        }),
        Search::Certified {
            residual,
            iterations,
        } => Ok(JmReport {
            feasible: false,
            witness: None,
            residual,
            iterations,
            method: JmMethod::Certificate,
            analytic,
        }),
        Search::Exhausted {
            residual,
            iterations,
        } => match analytic {
            Some(verdict) => Ok(JmReport {
                feasible: verdict,
                witness: None,
                residual,
                iterations,
                method: JmMethod::AnalyticFallback,
                analytic,
            }),
            None => Err(Error::NoConvergence {
                residual,
                iterations,
            }),
        },
    }
}

/// Largest margin error of `g` against `(p, q)` in Frobenius norm.
pub fn margin_residual(g: &[[CMatrix; 2]; 2], p: &BinaryPovm, q: &BinaryPovm) -> f64 {
    let mut worst: f64 = 0.0;
    for a in Outcome::BOTH {
        let row = &g[a.index()][0] + &g[a.index()][1];
        worst = worst.max(row.distance(p.effect(a)));
        let col = &g[0][a.index()] + &g[1][a.index()];
        worst = worst.max(col.distance(q.effect(a)));
    }
    worst
}

fn accept(effects: [[CMatrix; 2]; 2], p: &BinaryPovm, q: &BinaryPovm, tol: f64) -> Option<(JointPovm, f64)> {
    let residual = margin_residual(&effects, p, q);
    if residual > 10.0 * tol {
        return None;
    }
    JointPovm::with_tolerance(effects, 10.0 * tol)
        .ok()
        .map(|g| (g, residual))
}

fn candidate_witness(p: &BinaryPovm, q: &BinaryPovm, tol: f64) -> Option<(JointPovm, f64)> {
    let dim = p.dim();
    if p.distance(q) <= tol {
        let zero = CMatrix::zeros(dim);
        let effects = [
            [p.plus().clone(), zero.clone()],
            [zero, p.minus().clone()],
        ];
        if let Some(found) = accept(effects, p, q, tol) {
            return Some(found);
        }
    }
    if let Some(g) = lueders_retrieval(p, q) {
        if let Some(found) = accept(g.effects().clone(), p, q, tol) {
            return Some(found);
        }
    }
    if let Some(g) = lueders_retrieval(q, p) {
        if let Some(found) = accept(g.transposed().effects().clone(), p, q, tol) {
            return Some(found);
        }
    }
    None
}

/// Measures `first` with its Lüders instrument and looks for the retrieving
/// effect `R` with `Φ*(R) = target₊`, where `Φ*` is the dual total channel.
fn lueders_retrieval(first: &BinaryPovm, target: &BinaryPovm) -> Option<JointPovm> {
    let instr = Instrument::lueders(first).ok()?;
    let dim = first.dim();
    let n = dim * dim;
    let mut system = alloc::vec![alloc::vec![C64::new(0.0, 0.0); n]; n];
    for col in 0..n {
        let mut basis = CMatrix::zeros(dim);
        basis[(col / dim, col % dim)] = C64::new(1.0, 0.0);
        let image = instr.total_dual(&basis).ok()?;
        for (row, entry) in image.as_slice().iter().enumerate() {
            system[row][col] = *entry;
        }
    }
    let rhs: Vec<C64> = target.plus().as_slice().to_vec();
    let solution = linalg::solve_linear(system, rhs)?;
    let retrieving_plus = CMatrix::from_vec(dim, solution).ok()?.hermitian_part();
    let retrieving = BinaryPovm::from_plus(retrieving_plus).ok()?;
    sequential_joint(&instr, &retrieving).ok()
}

enum Search {
    Witness {
        witness: JointPovm,
        residual: f64,
        iterations: usize,
    },
    Certified {
        residual: f64,
        iterations: usize,
    },
    Exhausted {
        residual: f64,
        iterations: usize,
    },
}

const SIGNS: [[f64; 2]; 2] = [[1.0, -1.0], [-1.0, 1.0]];

fn affine_base(p: &BinaryPovm, q: &BinaryPovm) -> [[CMatrix; 2]; 2] {
    let quarter = CMatrix::identity(p.dim()).scale(0.25);
    let g = |a: Outcome, b: Outcome| &(&p.effect(a).scale(0.5) + &q.effect(b).scale(0.5)) - &quarter;
    [
        [g(Outcome::Plus, Outcome::Plus), g(Outcome::Plus, Outcome::Minus)],
        [g(Outcome::Minus, Outcome::Plus), g(Outcome::Minus, Outcome::Minus)],
    ]
}

/// Component of `g` along the null direction `s`, i.e. `Σ s_ab g_ab / 4`.
fn null_component(g: &[[CMatrix; 2]; 2]) -> CMatrix {
    let mut t = CMatrix::zeros(g[0][0].dim());
    for (row, signs) in g.iter().zip(SIGNS) {
        for (m, s) in row.iter().zip(signs) {
            t = &t + &m.scale(0.25 * s);
        }
    }
    t
}

fn project_affine(x: &[[CMatrix; 2]; 2], base: &[[CMatrix; 2]; 2]) -> [[CMatrix; 2]; 2] {
    let mut diff = x.clone();
    for a in 0..2 {
        for b in 0..2 {
            diff[a][b] = &x[a][b] - &base[a][b];
        }
    }
    let t = null_component(&diff);
    let mut out = base.clone();
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = &base[a][b] + &t.scale(SIGNS[a][b]);
        }
    }
    out
}

fn alternating_projections(p: &BinaryPovm, q: &BinaryPovm, opts: &JmOptions) -> Result<Search> {
    let dim = p.dim() as f64;
    let base = affine_base(p, q);
    let mut y = base.clone();
    let mut residual = f64::INFINITY;
    // Targeting the cone shifted by `floor` pulls iterates into the interior.
    let floor = opts.tol;

    for iter in 1..=opts.max_iter {
        let mut x = y.clone();
        for a in 0..2 {
            for b in 0..2 {
                x[a][b] = clamp_spectrum_below(&y[a][b], floor)?;
            }
        }
        y = project_affine(&x, &base);

        let mut violation: f64 = 0.0;
        for row in &y {
            for g in row {
                violation = violation.max(-herm_eig(g)?.min_eigenvalue());
            }
        }
        residual = violation.max(0.0).max(margin_residual(&y, p, q));
        if residual <= opts.tol {
            if let Ok(witness) = JointPovm::with_tolerance(y.clone(), 10.0 * opts.tol) {
                return Ok(Search::Witness {
                    witness,
                    residual,
                    iterations: iter,
                });
            }
        }

        if iter % opts.certificate_every == 0 && certifies_infeasible(&x, &y, &base, dim)? {
            return Ok(Search::Certified {
                residual,
                iterations: iter,
            });
        }
    }
    Ok(Search::Exhausted {
        residual,
        iterations: opts.max_iter,
    })
}

/// Tests whether `W = x − y`, made orthogonal to the null direction, separates
/// the affine set from every family of effects.
fn certifies_infeasible(
    x: &[[CMatrix; 2]; 2],
    y: &[[CMatrix; 2]; 2],
    base: &[[CMatrix; 2]; 2],
    dim: f64,
) -> Result<bool> {
    let mut w = x.clone();
    for a in 0..2 {
        for b in 0..2 {
            w[a][b] = &x[a][b] - &y[a][b];
        }
    }
    let t = null_component(&w);
    let mut norm = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            w[a][b] = (&w[a][b] - &t.scale(SIGNS[a][b])).hermitian_part();
            norm += w[a][b].frobenius_norm();
        }
    }
    if norm < 1e-15 {
        return Ok(false);
    }
    let mut pairing = 0.0;
    let mut lower = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            pairing += w[a][b].inner(&base[a][b]);
            lower += herm_eig(&w[a][b])?.min_eigenvalue().min(0.0) * dim;
        }
    }
    Ok(pairing < lower - 1e-12 * norm)
}

/// Optimal joint observable of the noisy pair `(A^{π/8}, B^{π/8})`,
/// `¼[𝟙 + a σ_z/√2 + b σ_x/√2]`.
pub fn optimal_zx_joint() -> JointPovm {
    let g = |a: f64, b: f64| {
        linalg::pauli::bloch_operator(0.5, [0.5 * b * FRAC_1_SQRT_2, 0.0, 0.5 * a * FRAC_1_SQRT_2])
    };
    JointPovm::new([[g(1.0, 1.0), g(1.0, -1.0)], [g(-1.0, 1.0), g(-1.0, -1.0)]])
        .expect("optimal joint observable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{noisy_x, noisy_z};
    use core::f64::consts::FRAC_PI_8;

    #[test]
    fn sharp_z_and_x_are_incompatible() {
        let z = BinaryPovm::sharp_z();
        let x = BinaryPovm::sharp_x();
        let crit = unbiased_qubit_criterion([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]);
        assert!((crit - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        let report = jm_feasible(&z, &x, 1e-8).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.method, JmMethod::Certificate);
        assert_eq!(report.analytic, Some(false));
        let numeric = jm_feasible_with(&z, &x, &JmOptions::numeric_only(1e-8)).unwrap();
        assert!(!numeric.feasible);
    }

    #[test]
    fn optimal_pair_is_compatible_with_the_sequential_witness() {
        let a = noisy_z(FRAC_PI_8).unwrap();
        let b = noisy_x(FRAC_1_SQRT_2).unwrap();
        let report = jm_feasible(&a, &b, 1e-8).unwrap();
        assert!(report.feasible);
        assert_eq!(report.method, JmMethod::Candidate);
        let witness = report.witness.unwrap();
        let reference = optimal_zx_joint();
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                assert!(witness.effect(a, b).distance(reference.effect(a, b)) < 1e-12);
            }
        }
    }

    #[test]
    fn every_povm_is_compatible_with_itself() {
        for povm in [
            BinaryPovm::sharp_z(),
            BinaryPovm::sharp_x(),
            noisy_z(0.3).unwrap(),
            BinaryPovm::trivial(3),
        ] {
            let report = jm_feasible(&povm, &povm, 1e-8).unwrap();
            assert!(report.feasible);
            let g = report.witness.unwrap();
            assert!(g.effect(Outcome::Plus, Outcome::Minus).frobenius_norm() < 1e-12);
            assert!(g.effect(Outcome::Plus, Outcome::Plus).distance(povm.plus()) < 1e-12);
        }
    }

    #[test]
    fn interior_pair_converges_numerically() {
        let p = BinaryPovm::unbiased_qubit([0.0, 0.0, 0.5]).unwrap();
        let q = BinaryPovm::unbiased_qubit([0.5, 0.0, 0.0]).unwrap();
        let report = jm_feasible_with(&p, &q, &JmOptions::numeric_only(1e-8)).unwrap();
        assert!(report.feasible);
        assert_eq!(report.method, JmMethod::AlternatingProjections);
        let (m1, m2) = report.witness.unwrap().margins().unwrap();
        assert!(m1.distance(&p) < 1e-7 && m2.distance(&q) < 1e-7);
    }

    #[test]
    fn verdict_is_symmetric() {
        let p = BinaryPovm::unbiased_qubit([0.3, 0.0, 0.8]).unwrap();
        let q = BinaryPovm::unbiased_qubit([0.7, 0.2, 0.0]).unwrap();
        let pq = jm_feasible(&p, &q, 1e-8).unwrap();
        let qp = jm_feasible(&q, &p, 1e-8).unwrap();
        assert_eq!(pq.feasible, qp.feasible);
    }

    #[test]
    fn rejects_bad_arguments() {
        let z = BinaryPovm::sharp_z();
        assert!(matches!(jm_feasible(&z, &z, 1e-12), Err(Error::OutOfRange { .. })));
        assert!(matches!(
            jm_feasible(&z, &BinaryPovm::trivial(3), 1e-8),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn qutrit_pair_without_analytic_route() {
        // Commuting diagonal effects are always compatible.
        let p = BinaryPovm::from_plus(CMatrix::diag(&[0.9, 0.2, 0.5])).unwrap();
        let q = BinaryPovm::from_plus(CMatrix::diag(&[0.1, 0.6, 0.3])).unwrap();
        let report = jm_feasible(&p, &q, 1e-8).unwrap();
        assert!(report.feasible);
        assert_eq!(report.analytic, None);
    }
}
