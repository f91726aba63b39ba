//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Each step zeroes one off-diagonal pair `(p, q)` with the unitary
//! `W = diag(1, e^{-iφ}) · G(θ)` acting on rows/columns `p, q`, where `φ` is the
//! phase of `a_pq` and `G(θ)` is the real Givens rotation that annihilates the
//! resulting real symmetric 2x2 block. Sweeps repeat until the off-diagonal
//! Frobenius mass falls below `1e-15` of the total.

use super::matrix::{CMatrix, C64, ZERO};
use super::tol;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

impl HermEig {
    /// `V diag(f(λ)) V†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }

    /// Eigenvector `k` as an owned vector.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len())
            .map(|i| self.vectors[(i, k)])
            .collect()
    }
}

/// Full eigen-decomposition; rejects inputs that are not Hermitian within [`tol::ALGEBRAIC`].
pub fn hermitian_eig(m: &CMatrix) -> Result<HermEig> {
    check_hermitian(m)?;
    let (values, vectors) = jacobi(m.hermitian_part(), true);
    Ok(sorted(values, vectors.expect("vectors requested")))
}

/// Eigenvalues only (descending). Skips accumulating the eigenvectors.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let (mut values, _) = jacobi(m.hermitian_part(), false);
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let err = m.hermiticity_error();
    // Scale-aware: large-norm matrices accumulate proportionally larger rounding.
    if err > tol::ALGEBRAIC * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

fn sorted(values: Vec<f64>, vectors: CMatrix) -> HermEig {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut v = CMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            v[(i, new)] = vectors[(i, old)];
        }
    }
    HermEig {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: v,
    }
}

fn jacobi(mut a: CMatrix, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    let n = a.rows();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let total = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                // W restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let w_pp = C64::new(c, 0.0);
                let w_pq = C64::new(s, 0.0);
                let w_qp = -phase.conj() * s;
                let w_qq = phase.conj() * c;
                rotate(&mut a, p, q, w_pp, w_pq, w_qp, w_qq);
                if let Some(v) = v.as_mut() {
                    // V ← V W (columns only)
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * w_pp + viq * w_qp;
                        v[(i, q)] = vip * w_pq + viq * w_qq;
                    }
                }
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}

/// `A ← W† A W` for `W` acting on indices `p, q`.
fn rotate(a: &mut CMatrix, p: usize, q: usize, w_pp: C64, w_pq: C64, w_qp: C64, w_qq: C64) {
    let n = a.rows();
    // columns: A ← A W
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * w_pp + aiq * w_qp;
        a[(i, q)] = aip * w_pq + aiq * w_qq;
    }
    // rows: A ← W† A
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = w_pp.conj() * apj + w_qp.conj() * aqj;
        a[(q, j)] = w_pq.conj() * apj + w_qq.conj() * aqj;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Principal square root of a PSD matrix; eigenvalues above `-tol` are clipped at zero.
pub fn sqrt_psd(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&min) = eig.values.last() {
        if min < -tol {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Uhlmann fidelity `(Tr √(√σ ρ √σ))²` of two density matrices.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let root = sqrt_psd(sigma, tol::PHYSICAL)?;
    let inner = (&(&root * rho) * &root).hermitian_part();
    let values = hermitian_eigenvalues(&inner)?;
    let s: f64 = values.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok((s * s).min(1.0))
}
