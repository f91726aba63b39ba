use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::TomoSetting;
use crate::channels::{Branch, ChoiState};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, tensor, CMatrix, C64, I, ONE};

/// Choi indices (`in·3 + out`, levels `0, H, V`) left free by the constrained fit:
/// `|00⟩` and the photon-to-photon block.
pub const ALLOWED_BLOCK: [usize; 5] = [0, 4, 5, 7, 8];

const DIM: usize = 3;
const NEGATIVE_MASS_FLAG: f64 = 0.1;

/// Linear map from the real Hermitian parameters of an unnormalized qutrit Choi
/// matrix to the setting probabilities.
#[derive(Clone, Debug)]
pub struct DesignMatrix {
    rows: DMatrix<f64>,
    support: Vec<usize>,
}

impl DesignMatrix {
    pub fn n_settings(&self) -> usize {
        self.rows.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.rows.ncols()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .rows
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn rank(&self) -> usize {
        let s = self.singular_values();
        let cut = s.first().copied().unwrap_or(0.0) * 1e-10;
        s.iter().filter(|&&x| x > cut).count()
    }

    /// `σ_max / σ_min`; infinite when rank deficient.
    pub fn condition_number(&self) -> f64 {
        let s = self.singular_values();
        match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if lo > hi * 1e-10 => hi / lo,
            _ => f64::INFINITY,
        }
    }

    fn basis_matrix(&self, k: usize) -> CMatrix {
        hermitian_basis(&self.support, k)
    }

    fn assemble(&self, x: &[f64]) -> CMatrix {
        let mut out = CMatrix::zeros(DIM * DIM, DIM * DIM);
        for (k, &xk) in x.iter().enumerate() {
            out += &self.basis_matrix(k).scale_real(xk);
        }
        out
    }
}

/// Element `k` of the real Hermitian basis over `support`: diagonals first, then
/// symmetric and antisymmetric pairs.
fn hermitian_basis(support: &[usize], k: usize) -> CMatrix {
    let n = DIM * DIM;
    let m = support.len();
    let mut b = CMatrix::zeros(n, n);
    if k < m {
        b[(support[k], support[k])] = ONE;
        return b;
    }
    let pair = (k - m) / 2;
    let (mut idx, mut found) = (0, (0, 0));
    'outer: for i in 0..m {
        for j in i + 1..m {
            if idx == pair {
                found = (support[i], support[j]);
                break 'outer;
            }
            idx += 1;
        }
    }
    let (i, j) = found;
    if (k - m).is_multiple_of(2) {
        b[(i, j)] = ONE;
        b[(j, i)] = ONE;
    } else {
        b[(i, j)] = I;
        b[(j, i)] = -I;
    }
    b
}

/// `p_s = Tr[(ρ_sᵀ ⊗ E_s) J]` for every setting, `J` unnormalized.
pub fn design_matrix(settings: &[TomoSetting], constrained: bool) -> DesignMatrix {
    let support: Vec<usize> = if constrained {
        ALLOWED_BLOCK.to_vec()
    } else {
        (0..DIM * DIM).collect()
    };
    let n_params = support.len() * support.len();
    let basis: Vec<CMatrix> = (0..n_params)
        .map(|k| hermitian_basis(&support, k))
        .collect();
    let rows = DMatrix::from_fn(settings.len(), n_params, |s, k| {
        let prep = CMatrix::projector(&settings[s].prep_trit());
        let meas = CMatrix::projector(&settings[s].meas_trit());
        tensor(&prep.transpose(), &meas).inner(&basis[k]).re
    });
    DesignMatrix { rows, support }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub choi: ChoiState,
    /// Fidelity to the ground-truth dual state, when one was supplied.
    pub fidelity: Option<f64>,
    /// RMS of `p_fit − f` over settings, before the positivity projection.
    pub residual: f64,
    /// Trace weight of the clipped negative eigenvalues, relative to the fitted trace.
    pub negative_mass: f64,
    pub flagged: bool,
}

/// Constrained least squares, projected onto unit-trace positive matrices.
pub fn reconstruct_qutrit(
    frequencies: &[f64],
    settings: &[TomoSetting],
    truth: Option<&ChoiState>,
) -> Result<ReconstructionResult> {
    if frequencies.len() != settings.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} frequencies for {} settings",
            frequencies.len(),
            settings.len()
        )));
    }
    if frequencies.iter().any(|f| !f.is_finite()) {
        return Err(Error::NonFinite);
    }
    let design = design_matrix(settings, true);
    let needed = design.n_params();
    let rank = design.rank();
    if rank < needed {
        return Err(Error::RankDeficient { rank, needed });
    }
    let f = DVector::from_column_slice(frequencies);
    let x = design
        .rows
        .clone()
        .svd(true, true)
        .solve(&f, 1e-12)
        .map_err(|e| Error::InvalidChannel(e.to_string()))?;
    let residual = ((&design.rows * &x - &f).norm_squared() / frequencies.len() as f64).sqrt();
    let fitted = design.assemble(x.as_slice()).hermitian_part();

    let support = design.support();
    let block = fitted.select(support, support);
    let eig = hermitian_eig(&block)?;
    let trace: f64 = eig.values.iter().sum();
    let negative: f64 = eig.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    let kept: f64 = eig.values.iter().filter(|&&v| v > 0.0).sum();
    if kept.is_nan() || kept <= 0.0 {
        return Err(Error::ZeroChannel);
    }
    let clipped = eig.reconstruct_with(|v| v.max(0.0) / kept);
    let mut matrix = CMatrix::zeros(DIM * DIM, DIM * DIM);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            matrix[(i, j)] = clipped[(a, b)];
        }
    }
    let choi = ChoiState::from_matrix(DIM, DIM, matrix.hermitian_part())?;
    let negative_mass = if trace.abs() > 0.0 {
        negative / trace.abs()
    } else {
        0.0
    };
    let fidelity = truth.map(|t| choi.fidelity(t)).transpose()?;
    Ok(ReconstructionResult {
        choi,
        fidelity,
        residual,
        negative_mass,
        flagged: negative_mass > NEGATIVE_MASS_FLAG,
    })
}

/// The `|00⟩`–`|VH⟩` entry for branch `a`, `|00⟩`–`|HV⟩` for branch `b`.
pub fn coherence_entry(choi: &ChoiState, branch: Branch) -> C64 {
    let col = match branch {
        Branch::A => 7,
        Branch::B => 5,
    };
    choi.matrix()[(0, col)]
}

/// Wrapped phase difference of the vacuum–photon coherence, in `[0, π]`.
pub fn coherence_phase_error(estimate: &ChoiState, truth: &ChoiState, branch: Branch) -> f64 {
    let d = coherence_entry(estimate, branch) * coherence_entry(truth, branch).conj();
    d.arg().abs()
}

pub fn reconstruction_json(result: &ReconstructionResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(result)?)
}
