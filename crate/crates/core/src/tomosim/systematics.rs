use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::superpose::{ControlledChannel, ControlledEntry};

/// Interferometer imperfections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystematicsConfig {
    /// Standard deviation of the path phase, radians.
    pub phase_jitter: f64,
    /// Tilt of the rotation axis of the arm unitaries, radians.
    pub axis_error: f64,
    /// Fraction of `|V⟩` intensity lost in each arm.
    pub absorbance: f64,
    pub seed: u64,
}

impl Default for SystematicsConfig {
    fn default() -> Self {
        Self {
            phase_jitter: 0.3,
            axis_error: 0.06,
            absorbance: 0.07,
            seed: 0,
        }
    }
}

impl SystematicsConfig {
    pub fn none() -> Self {
        Self {
            phase_jitter: 0.0,
            axis_error: 0.0,
            absorbance: 0.0,
            seed: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phase_jitter == 0.0 && self.axis_error == 0.0 && self.absorbance == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("phase_jitter", self.phase_jitter),
            ("axis_error", self.axis_error),
            ("absorbance", self.absorbance),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: ">= 0",
                });
            }
        }
        if self.absorbance > 1.0 {
            return Err(Error::OutOfRange {
                name: "absorbance",
                value: self.absorbance,
                range: "[0, 1]",
            });
        }
        Ok(())
    }
}

/// Nodes and weights for `E[f(x)]`, `x ~ N(0, 1)` (probabilists' Hermite, Golub-Welsch).
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes
}

/// `exp(−iθσ_y)` on the polarization.
fn axis_rotation(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_real_rows(&[[c, -s], [s, c]])
}

/// Axis tilt (`+ε` in arm `a`, `−ε` in arm `b`) and `|V⟩` absorbance, without jitter.
pub fn with_static_errors(
    mz: &ControlledChannel,
    cfg: &SystematicsConfig,
) -> Result<ControlledChannel> {
    cfg.validate()?;
    if cfg.axis_error == 0.0 && cfg.absorbance == 0.0 {
        return Ok(mz.clone());
    }
    let ra = axis_rotation(cfg.axis_error);
    let rb = axis_rotation(-cfg.axis_error);
    let lossy = CMatrix::from_real_diag(&[1.0, (1.0 - cfg.absorbance).sqrt()]);
    let entries = mz
        .entries()
        .iter()
        .map(|e| {
            let a = &lossy * &e.block(0).conjugate_by(&ra);
            let b = &lossy * &e.block(1).conjugate_by(&rb);
            ControlledEntry {
                operator: a.direct_sum(&b),
                ..e.clone()
            }
        })
        .collect();
    ControlledChannel::from_entries(entries)
}

/// The channel averaged over a Gaussian path phase, with the static errors applied.
pub fn inject_systematics(
    mz: &ControlledChannel,
    cfg: &SystematicsConfig,
) -> Result<ControlledChannel> {
    let base = with_static_errors(mz, cfg)?;
    if cfg.phase_jitter == 0.0 {
        return Ok(base);
    }
    let mut entries = Vec::new();
    for (x, w) in gauss_hermite(24) {
        let shifted = base.with_path_phase(cfg.phase_jitter * x);
        entries.extend(shifted.entries().iter().map(|e| ControlledEntry {
            weight: e.weight * w.sqrt(),
            ..e.clone()
        }));
    }
    ControlledChannel::from_entries(entries)
}
