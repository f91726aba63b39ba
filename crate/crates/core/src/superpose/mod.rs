//! Coherent control of two qubit channels in a Mach-Zehnder interferometer.
//!
//! The joint system is ordered `path ⊗ polarization` with path basis `{|a⟩, |b⟩}`
//! and polarization basis `{|H⟩, |V⟩}`. Each arm's random-unitary channel is
//! lifted either to a controlled two-qubit channel, to a post-selected qubit
//! map, or to a qutrit channel on `{|0⟩ (vacuum), |H⟩, |V⟩}`.

mod qutrit;
mod table;

pub use qutrit::{
    qutrit_extend, two_qutrit, QutritChannel, TwoQutritChannel, ONE_PHOTON_SUBSPACE, QUTRIT_LEVELS,
};
pub use table::{pairwise_operator_table, table_csv, TableEntry};

use crate::channels::{KrausChannel, PauliCoeffs, RandomUnitarySpec};
use crate::error::{Error, Result};
use crate::numerics::{tensor, tol, CMatrix, C64, ONE, ZERO};

/// A pure state of the path (control) qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathState(pub [C64; 2]);

impl PathState {
    pub fn a() -> Self {
        Self([ONE, ZERO])
    }

    pub fn b() -> Self {
        Self([ZERO, ONE])
    }

    /// `(|a⟩ + |b⟩)/√2`
    pub fn plus() -> Self {
        let s = C64::new(0.5f64.sqrt(), 0.0);
        Self([s, s])
    }

    /// `(|a⟩ − |b⟩)/√2`
    pub fn minus() -> Self {
        let s = C64::new(0.5f64.sqrt(), 0.0);
        Self([s, -s])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    fn check(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol::PHYSICAL {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }
}

/// One Kraus term of the controlled channel: `weight · operator` with
/// `operator = |a⟩⟨a| ⊗ s_i U_i + e^{iθ} |b⟩⟨b| ⊗ s_j U_j`.
#[derive(Clone, Debug)]
pub struct ControlledEntry {
    pub i: usize,
    pub j: usize,
    /// `√(p_i p_j)`
    pub weight: f64,
    pub operator: CMatrix,
}

impl ControlledEntry {
    pub fn kraus(&self) -> CMatrix {
        self.operator.scale_real(self.weight)
    }

    /// The `|a⟩⟨a|` or `|b⟩⟨b|` 2x2 block of the operator.
    pub fn block(&self, path: usize) -> CMatrix {
        let idx = [2 * path, 2 * path + 1];
        self.operator.select(&idx, &idx)
    }
}

/// The two-qubit channel realised by the interferometer.
#[derive(Clone, Debug)]
pub struct ControlledChannel {
    entries: Vec<ControlledEntry>,
}

fn controlled_operator(ua: &CMatrix, ub: &CMatrix) -> CMatrix {
    ua.direct_sum(ub)
}

/// Superposes two arms with a phase-stable interferometer.
pub fn mz_superpose(spec_a: &RandomUnitarySpec, spec_b: &RandomUnitarySpec) -> ControlledChannel {
    mz_superpose_with_phase(spec_a, spec_b, 0.0)
}

/// Superposes two arms; `path_phase` multiplies the `|b⟩⟨b|` block.
///
/// Every `(i, j)` pair is enumerated: the arms draw their unitaries independently.
pub fn mz_superpose_with_phase(
    spec_a: &RandomUnitarySpec,
    spec_b: &RandomUnitarySpec,
    path_phase: f64,
) -> ControlledChannel {
    let phase = C64::from_polar(1.0, path_phase);
    let mut entries = Vec::new();
    for (i, ea) in spec_a.effective_entries() {
        let ua = ea.phased_unitary();
        for (j, eb) in spec_b.effective_entries() {
            let ub = eb.phased_unitary().scale(phase);
            entries.push(ControlledEntry {
                i,
                j,
                weight: (ea.probability * eb.probability).sqrt(),
                operator: controlled_operator(&ua, &ub),
            });
        }
    }
    ControlledChannel { entries }
}

impl ControlledChannel {
    pub fn from_entries(entries: Vec<ControlledEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidChannel("no controlled entries".into()));
        }
        if let Some(e) = entries.iter().find(|e| e.operator.shape() != (4, 4)) {
            return Err(Error::DimensionMismatch(format!(
                "controlled operator ({}, {}) is {}x{}",
                e.i,
                e.j,
                e.operator.rows(),
                e.operator.cols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[ControlledEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplies the `|b⟩⟨b|` block of every operator by `e^{iφ}`.
    pub fn with_path_phase(&self, phase: f64) -> Self {
        let z = C64::from_polar(1.0, phase);
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let mut op = e.operator.clone();
                for r in 2..4 {
                    for c in 2..4 {
                        op[(r, c)] *= z;
                    }
                }
                ControlledEntry {
                    operator: op,
                    ..e.clone()
                }
            })
            .collect();
        Self { entries }
    }

    /// The full channel on `path ⊗ polarization`; trace preservation is inferred.
    pub fn to_channel(&self) -> Result<KrausChannel> {
        KrausChannel::infer(self.entries.iter().map(ControlledEntry::kraus).collect())
    }

    /// Prepares the path in `c_in` and projects it onto `c_out`.
    pub fn post_select(&self, c_in: &PathState, c_out: &PathState) -> Result<PostSelectedChannel> {
        post_select(self, c_in, c_out)
    }
}

/// Subnormalized qubit map left on the polarization after the path is
/// prepared in `control_in` and projected onto `control_out`.
#[derive(Clone, Debug)]
pub struct PostSelectedChannel {
    kraus: Vec<CMatrix>,
    indices: Vec<(usize, usize)>,
    control_in: PathState,
    control_out: PathState,
}

/// `K_ij = ⟨c_out| (√(p_i p_j) U_ij) |c_in⟩`, contracted over the path factor.
pub fn post_select(
    mz: &ControlledChannel,
    c_in: &PathState,
    c_out: &PathState,
) -> Result<PostSelectedChannel> {
    c_in.check()?;
    c_out.check()?;
    let bra = CMatrix::from_rows(&[[c_out.0[0].conj(), c_out.0[1].conj()]]);
    let ket = CMatrix::column(&c_in.0);
    let left = tensor(&bra, &CMatrix::identity(2));
    let right = tensor(&ket, &CMatrix::identity(2));
    let kraus = mz
        .entries
        .iter()
        .map(|e| &(&left * &e.kraus()) * &right)
        .collect();
    Ok(PostSelectedChannel {
        kraus,
        indices: mz.entries.iter().map(|e| (e.i, e.j)).collect(),
        control_in: *c_in,
        control_out: *c_out,
    })
}

impl PostSelectedChannel {
    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `(i, j)` arm indices of each Kraus operator.
    pub fn indices(&self) -> &[(usize, usize)] {
        &self.indices
    }

    pub fn control_in(&self) -> PathState {
        self.control_in
    }

    pub fn control_out(&self) -> PathState {
        self.control_out
    }

    /// Subnormalized Kraus channel (never renormalized).
    pub fn to_channel(&self) -> Result<KrausChannel> {
        KrausChannel::new(self.kraus.clone(), false)
    }

    /// Unnormalized output `Σ K ρ K†`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.shape() != (2, 2) {
            return Err(Error::DimensionMismatch(
                "post-selected map acts on a qubit".into(),
            ));
        }
        let mut out = CMatrix::zeros(2, 2);
        for k in &self.kraus {
            out += &rho.conjugate_by(k);
        }
        Ok(out)
    }

    /// `Tr[Σ K ρ K†]`
    pub fn success_probability(&self, rho: &CMatrix) -> Result<f64> {
        Ok(self.apply(rho)?.trace().re)
    }

    /// Pauli coefficients `f_{k,l}` of the subnormalized map.
    pub fn f_coefficients(&self) -> PauliCoeffs {
        PauliCoeffs::from_kraus(&self.kraus)
    }

    pub fn is_zero(&self) -> bool {
        self.kraus.iter().all(|k| k.max_abs() == 0.0)
    }
}

/// Free-function form of [`PostSelectedChannel::f_coefficients`].
pub fn f_coefficients(ps: &PostSelectedChannel) -> PauliCoeffs {
    ps.f_coefficients()
}

/// Free-function form of [`PostSelectedChannel::success_probability`].
pub fn success_probability(ps: &PostSelectedChannel, rho: &CMatrix) -> Result<f64> {
    ps.success_probability(rho)
}

/// Compresses a photon-number-preserving qutrit channel to its `{|H⟩, |V⟩}` block.
pub fn restrict_qutrit_to_qubit(ch: &QutritChannel) -> Result<KrausChannel> {
    ch.restrict_to_qubit()
}
