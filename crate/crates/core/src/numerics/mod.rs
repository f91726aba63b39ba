//! Dense complex linear algebra for the small matrices used throughout the crate.
//!
//! Vectorization stacks columns: `vec(A)[i + j·rows] = A[i, j]`. Read as a
//! tensor product with the slow index first, `vec(A) = Σ_ij A_ij |j⟩ ⊗ |i⟩`, so
//! the column index is the first factor and the row index the second. For a
//! state `ρ`, `vec(√ρ)` therefore lives on `reference ⊗ system`: tracing out the
//! first factor returns `ρ`, tracing out the second returns `ρᵀ`. Choi matrices
//! and purifications both follow this layout.

mod eig;
mod matrix;
pub mod tol;

pub use eig::{fidelity, hermitian_eig, hermitian_eigenvalues, sqrt_psd, HermEig};
pub use matrix::{CMatrix, C64, I, ONE, ZERO};

use crate::error::{Error, Result};

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a vector pair.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Traces out every factor of `m` not listed in `keep`.
///
/// `dims` lists the subsystem dimensions with the first factor slowest; `keep`
/// may be in any order but the output keeps the original factor order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for factor dims {dims:?}",
            m.rows(),
            m.cols()
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "factor {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|k| keep.contains(k)).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    // Place digits of kept/traced multi-indices into a full flat index.
    let strides: Vec<usize> = (0..dims.len())
        .map(|k| dims[k + 1..].iter().product())
        .collect();
    let compose = |factors: &[usize], factor_dims: &[usize], mut flat: usize| -> usize {
        let mut full = 0;
        for (pos, &k) in factors.iter().enumerate().rev() {
            let d = factor_dims[pos];
            full += (flat % d) * strides[k];
            flat /= d;
        }
        full
    };

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for e in 0..env_dim {
        let env_offset = compose(&traced, &traced_dims, e);
        for a in 0..out_dim {
            let row = env_offset + compose(&kept, &kept_dims, a);
            for b in 0..out_dim {
                let col = env_offset + compose(&kept, &kept_dims, b);
                out[(a, b)] += m[(row, col)];
            }
        }
    }
    Ok(out)
}

/// Column-stacking vectorization (see module docs).
pub fn vec(m: &CMatrix) -> Vec<C64> {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    for j in 0..cols {
        for i in 0..rows {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec`].
pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} into {rows}x{cols}",
            v.len()
        )));
    }
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = v[i + j * rows];
        }
    }
    Ok(m)
}

/// Purification `vec(√ρ)` on `reference ⊗ system`.
pub fn vec_sqrt(rho: &CMatrix) -> Result<Vec<C64>> {
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > tol::PHYSICAL || trace.im.abs() > tol::PHYSICAL {
        return Err(Error::InvalidChannel(format!(
            "purification needs a unit-trace state, got trace {trace}"
        )));
    }
    Ok(vec(&sqrt_psd(rho, tol::PHYSICAL)?))
}
