//! Dense complex matrices for small Hermitian and PSD operators.
//!
//! Matrices are stored row-major and indexed in the `{|H⟩, |V⟩}` basis for
//! qubits (index 0 is `|H⟩`). Hermitian eigendecomposition uses the Bloch
//! closed form in dimension 2 and cyclic Jacobi rotations above that.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::math;
use crate::tol;
use crate::{Error, Result};

pub use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Row-major real entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_vec(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`, unnormalised.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Hilbert–Schmidt inner product `Re tr[A† B]`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_c(C64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `‖M − M†‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        math::sqrt(acc)
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        assert_eq!(v.len(), self.dim);
        let mut acc = ZERO;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += v[i].conj() * self[(i, j)] * v[j];
            }
        }
        acc
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(self * other)
    }

    /// `self − other` measured in Frobenius norm.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale(-1.0)
    }
}

pub(crate) fn check_dims(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// Pauli matrices in the `{|H⟩, |V⟩}` basis.
pub mod pauli {
    use super::{CMatrix, C64};

    pub fn x() -> CMatrix {
        CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn y() -> CMatrix {
        let i = C64::new(0.0, 1.0);
        CMatrix::from_vec(2, alloc::vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]).unwrap()
    }

    pub fn z() -> CMatrix {
        CMatrix::diag(&[1.0, -1.0])
    }

    /// `½(c·𝟙 + r·σ)`.
    pub fn bloch_operator(c: f64, r: [f64; 3]) -> CMatrix {
        let h = C64::new(0.5 * (c + r[2]), 0.0);
        let v = C64::new(0.5 * (c - r[2]), 0.0);
        let off = C64::new(0.5 * r[0], -0.5 * r[1]);
        CMatrix::from_vec(2, alloc::vec![h, off, off.conj(), v]).unwrap()
    }

    /// Coefficients `(c, r)` with `M = ½(c·𝟙 + r·σ)` for a Hermitian 2×2 `M`.
    pub fn bloch_coefficients(m: &CMatrix) -> (f64, [f64; 3]) {
        assert_eq!(m.dim(), 2);
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        (a + d, [2.0 * b.re, -2.0 * b.im, a - d])
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal, `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `Σ f(λᵢ) vᵢvᵢ†`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }
}

/// Hermitian eigendecomposition. Fails with [`Error::NotHermitian`] when
/// `‖M − M†‖_F > 1e-10`.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    let defect = m.hermitian_defect();
    if defect > tol::HERMITIAN {
        return Err(Error::NotHermitian { defect });
    }
    let h = m.hermitian_part();
    Ok(if h.dim() == 2 { eig2(&h) } else { jacobi(&h) })
}

fn eig2(m: &CMatrix) -> HermEig {
    let (c, r) = pauli::bloch_coefficients(m);
    let mean = 0.5 * c;
    let (nx, ny, nz) = (0.5 * r[0], 0.5 * r[1], 0.5 * r[2]);
    let norm = math::sqrt(nx * nx + ny * ny + nz * nz);
    if norm == 0.0 {
        return HermEig {
            eigenvalues: vec![mean, mean],
            eigenvectors: vec![vec![ONE, ZERO], vec![ZERO, ONE]],
        };
    }
    // |+⟩ = (cos θ/2, e^{iφ} sin θ/2) with e^{iφ} sin θ = (n_x + i n_y)/|n|; the
    // larger half-angle factor is taken from a square root, the other from sin θ.
    let transverse = C64::new(nx, ny);
    let (cos_half, phase_sin_half) = if nz >= 0.0 {
        let ch = math::sqrt((norm + nz) / (2.0 * norm));
        (C64::new(ch, 0.0), transverse / (2.0 * norm * ch))
    } else {
        let sh = math::sqrt((norm - nz) / (2.0 * norm));
        let rho = transverse.norm();
        let phase = if rho == 0.0 { ONE } else { transverse / rho };
        (C64::new(rho / (2.0 * norm * sh), 0.0), phase * sh)
    };
    let plus = vec![cos_half, phase_sin_half];
    let minus = vec![-phase_sin_half.conj(), cos_half];
    HermEig {
        eigenvalues: vec![mean - norm, mean + norm],
        eigenvectors: vec![minus, plus],
    }
}

fn jacobi(m: &CMatrix) -> HermEig {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if math::sqrt(off) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                // W = diag(1, e^{-iφ}) · [[c, s], [-s, c]] acting on the (p, q) plane.
                let w_pp = C64::new(c, 0.0);
                let w_pq = C64::new(s, 0.0);
                let w_qp = -phase.conj() * s;
                let w_qq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * w_pp + akq * w_qp;
                    a[(k, q)] = akp * w_pq + akq * w_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
                    a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * w_pp + vkq * w_qp;
                    v[(k, q)] = vkp * w_pq + vkq * w_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    HermEig {
        eigenvalues: order.iter().map(|&i| a[(i, i)].re).collect(),
        eigenvectors: order
            .iter()
            .map(|&i| (0..n).map(|k| v[(k, i)]).collect())
            .collect(),
    }
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-1e-10, 0)` are
/// clamped to zero; anything more negative is [`Error::NotPsd`].
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(m)?;
    let min = eig.min_eigenvalue();
    if min < -tol::PSD_SLACK {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(eig.map(|x| math::sqrt(x.max(0.0))).hermitian_part())
}

/// Projection onto the PSD cone shifted by `floor`: eigenvalues below `floor`
/// are raised to it.
pub(crate) fn clamp_spectrum_below(m: &CMatrix, floor: f64) -> Result<CMatrix> {
    Ok(herm_eig(m)?.map(|x| x.max(floor)).hermitian_part())
}

/// Entrywise (Schur) product.
pub fn schur(m: &CMatrix, n: &CMatrix) -> Result<CMatrix> {
    check_dims(m, n)?;
    Ok(CMatrix {
        dim: m.dim,
        data: m.data.iter().zip(&n.data).map(|(a, b)| a * b).collect(),
    })
}

/// Checks `0 ≤ E ≤ 𝟙` up to the PSD slack.
pub fn validate_effect(e: &CMatrix) -> Result<HermEig> {
    let eig = herm_eig(e).map_err(|err| Error::NotEffect(alloc::format!("{err}")))?;
    if eig.min_eigenvalue() < -tol::PSD_SLACK || eig.max_eigenvalue() > 1.0 + tol::PSD_SLACK {
        return Err(Error::NotEffect(alloc::format!(
            "spectrum [{:.3e}, {:.3e}] leaves [0, 1]",
            eig.min_eigenvalue(),
            eig.max_eigenvalue()
        )));
    }
    Ok(eig)
}

/// Checks that `rho` is Hermitian, PSD and has unit trace.
pub fn validate_state(rho: &CMatrix) -> Result<HermEig> {
    let eig = herm_eig(rho).map_err(|err| Error::NotState(alloc::format!("{err}")))?;
    if eig.min_eigenvalue() < -tol::PSD_SLACK {
        return Err(Error::NotState(alloc::format!(
            "negative eigenvalue {:.3e}",
            eig.min_eigenvalue()
        )));
    }
    let tr = rho.trace();
    if math::abs(tr.re - 1.0) > tol::TRACE || math::abs(tr.im) > tol::TRACE {
        return Err(Error::NotState(alloc::format!("trace {tr}")));
    }
    Ok(eig)
}

/// Born-rule probability `tr[Eρ]`, clamped into `[0, 1]`.
pub fn born_prob(effect: &CMatrix, rho: &CMatrix) -> Result<f64> {
    check_dims(effect, rho)?;
    validate_effect(effect)?;
    validate_state(rho)?;
    Ok(trace_pairing(effect, rho).clamp(0.0, 1.0))
}

/// `Re tr[AB]` without validation.
pub fn trace_pairing(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` when a pivot falls below `1e-12` in modulus.
pub(crate) fn solve_linear(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[pivot][col].norm() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor == ZERO {
                continue;
            }
            let (top, bottom) = a.split_at_mut(row);
            for (x, &p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= factor * p;
            }
            let delta = factor * b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![ZERO; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Phase-insensitive overlap `|⟨u|v⟩|`.
    fn overlap(u: &[C64], v: &[C64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<C64>().norm()
    }

    #[test]
    fn sigma_z_spectrum() {
        let eig = herm_eig(&pauli::z()).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
        assert!(close(overlap(&eig.eigenvectors[0], &[ZERO, ONE]), 1.0, 1e-15));
        assert!(close(overlap(&eig.eigenvectors[1], &[ONE, ZERO]), 1.0, 1e-15));
    }

    #[test]
    fn sigma_x_spectrum() {
        let eig = herm_eig(&pauli::x()).unwrap();
        assert!(close(eig.eigenvalues[0], -1.0, 1e-15));
        assert!(close(eig.eigenvalues[1], 1.0, 1e-15));
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        assert!(close(overlap(&eig.eigenvectors[0], &[s, -s]), 1.0, 1e-15));
        assert!(close(overlap(&eig.eigenvectors[1], &[s, s]), 1.0, 1e-15));
    }

    #[test]
    fn noisy_z_plus_spectrum_matches_quadratic_and_jacobi() {
        let m = &CMatrix::identity(2).scale(0.5) + &pauli::z().scale(0.5 * FRAC_1_SQRT_2);
        let eig = herm_eig(&m).unwrap();
        let expected = [0.25 * (2.0 - 2f64.sqrt()), 0.25 * (2.0 + 2f64.sqrt())];
        assert!(close(eig.eigenvalues[0], expected[0], 1e-15));
        assert!(close(eig.eigenvalues[1], expected[1], 1e-15));
        let jac = jacobi(&m);
        assert!(close(jac.eigenvalues[0], expected[0], 1e-15));
        assert!(close(jac.eigenvalues[1], expected[1], 1e-15));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn jacobi_handles_complex_4x4() {
        let m = CMatrix::from_fn(4, |i, j| {
            if i == j {
                C64::new(i as f64 - 1.5, 0.0)
            } else if i < j {
                C64::new(0.3 * (i + j) as f64, 0.1 * (j - i) as f64)
            } else {
                C64::new(0.3 * (i + j) as f64, -0.1 * (i - j) as f64)
            }
        });
        let eig = herm_eig(&m).unwrap();
        assert!(eig.reconstruct().distance(&m) < 1e-13);
        for w in eig.eigenvalues.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for i in 0..4 {
            for j in 0..4 {
                let ip: C64 = eig.eigenvectors[i]
                    .iter()
                    .zip(&eig.eigenvectors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(target, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn sqrt_of_identity_is_identity() {
        let r = psd_sqrt(&CMatrix::identity(3)).unwrap();
        assert!(r.distance(&CMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn sqrt_of_noisy_z_is_the_kraus_operator() {
        let a = &CMatrix::identity(2).scale(0.5) + &pauli::z().scale(0.5 * FRAC_1_SQRT_2);
        let g = PI / 8.0;
        let k = (&CMatrix::identity(2).scale(g.cos()) + &pauli::z().scale(g.sin())).scale(FRAC_1_SQRT_2);
        assert!(psd_sqrt(&a).unwrap().distance(&k) < 1e-15);
    }

    #[test]
    fn sqrt_rejects_negative_and_clamps_slack() {
        assert!(matches!(
            psd_sqrt(&CMatrix::diag(&[1.0, -1e-6])),
            Err(Error::NotPsd { .. })
        ));
        let r = psd_sqrt(&CMatrix::diag(&[1.0, -1e-11])).unwrap();
        assert_eq!(r[(1, 1)], ZERO);
    }

    #[test]
    fn schur_products() {
        let rho = CMatrix::from_vec(
            2,
            vec![C64::new(0.6, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.4, 0.0)],
        )
        .unwrap();
        let diag = CMatrix::diag(&[0.6, 0.4]);
        assert_eq!(schur(&CMatrix::identity(2), &rho).unwrap(), diag);
        let c = (2.0 * PI / 4.0).cos();
        let mask = CMatrix::from_real(2, &[1.0, c, c, 1.0]).unwrap();
        assert!(schur(&mask, &rho).unwrap().distance(&diag) < 1e-16);
        let ones = CMatrix::from_real(2, &[1.0; 4]).unwrap();
        assert_eq!(schur(&ones, &ones).unwrap(), ones);
        assert!(matches!(
            schur(&ones, &CMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn born_rule_values() {
        let h = CMatrix::diag(&[1.0, 0.0]);
        assert_eq!(born_prob(&h, &h).unwrap(), 1.0);
        let a = &CMatrix::identity(2).scale(0.5) + &pauli::z().scale(0.5 * FRAC_1_SQRT_2);
        assert!(close(born_prob(&a, &h).unwrap(), 0.5 * (1.0 + FRAC_1_SQRT_2), 1e-15));
        let g = PI / 8.0;
        let psi = [C64::new(g.cos(), 0.0), C64::new(g.sin(), 0.0)];
        let x_plus = &CMatrix::identity(2).scale(0.5) + &pauli::x().scale(0.5);
        let p = born_prob(&x_plus, &CMatrix::outer(&psi)).unwrap();
        assert!(close(p, 0.854, 5e-4));
    }

    #[test]
    fn born_rule_rejects_bad_inputs() {
        let h = CMatrix::diag(&[1.0, 0.0]);
        assert!(matches!(
            born_prob(&CMatrix::diag(&[1.5, 0.0]), &h),
            Err(Error::NotEffect(_))
        ));
        assert!(matches!(
            born_prob(&h, &CMatrix::diag(&[0.7, 0.7])),
            Err(Error::NotState(_))
        ));
    }

    #[test]
    fn linear_solve_round_trip() {
        let a = vec![
            vec![C64::new(2.0, 0.0), C64::new(1.0, 1.0)],
            vec![C64::new(0.0, -1.0), C64::new(3.0, 0.0)],
        ];
        let x = [C64::new(1.0, -2.0), C64::new(0.5, 0.25)];
        let b = vec![a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]];
        let sol = solve_linear(a, b).unwrap();
        assert!((sol[0] - x[0]).norm() < 1e-14 && (sol[1] - x[1]).norm() < 1e-14);
        assert!(solve_linear(vec![vec![ZERO, ZERO], vec![ZERO, ONE]], vec![ONE, ONE]).is_none());
    }
}
