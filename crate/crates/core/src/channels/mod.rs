//! Qubit random-unitary channels, general Kraus maps, Pauli-basis coefficients
//! and normalized Choi (dual) states.

mod depolarizing;
mod dump;

pub use depolarizing::{
    coherent_phases, depolarizing_coherent, depolarizing_incoherent, pauli_probabilities,
};
pub use dump::ChannelDump;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, tensor, tol, CMatrix, C64, I, ONE, ZERO};

/// `σ_k` for `k ∈ {0, 1, 2, 3}` (identity, X, Y, Z).
pub fn pauli(k: usize) -> CMatrix {
    match k {
        0 => CMatrix::identity(2),
        1 => CMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        2 => CMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        3 => CMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Which interferometer arm a channel sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    A,
    B,
}

impl Branch {
    pub fn other(self) -> Self {
        match self {
            Branch::A => Branch::B,
            Branch::B => Branch::A,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::A => "a",
            Branch::B => "b",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Branch::A),
            "b" | "B" => Ok(Branch::B),
            other => Err(Error::Parse(format!("unknown branch '{other}'"))),
        }
    }
}

/// One implementation unitary: applied with `probability`, carrying the
/// physical phase `phase` separately from the unitary itself.
#[derive(Clone, Debug)]
pub struct SpecEntry {
    pub probability: f64,
    pub phase: C64,
    pub unitary: CMatrix,
}

impl SpecEntry {
    /// `s_i U_i`
    pub fn phased_unitary(&self) -> CMatrix {
        self.unitary.scale(self.phase)
    }
}

/// A weighted, phase-tagged list of qubit unitaries implementing a random-unitary channel.
#[derive(Clone, Debug)]
pub struct RandomUnitarySpec {
    branch: Branch,
    entries: Vec<SpecEntry>,
}

impl RandomUnitarySpec {
    pub fn new(branch: Branch, entries: Vec<SpecEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSpec("no entries".into()));
        }
        let mut total = 0.0;
        for (k, e) in entries.iter().enumerate() {
            if !(0.0..=1.0).contains(&e.probability) {
                return Err(Error::InvalidSpec(format!(
                    "entry {k} has probability {}",
                    e.probability
                )));
            }
            if (e.phase.norm() - 1.0).abs() > tol::PROBABILITY {
                return Err(Error::InvalidSpec(format!(
                    "entry {k} phase is not unit modulus"
                )));
            }
            if e.unitary.shape() != (2, 2) {
                return Err(Error::InvalidSpec(format!(
                    "entry {k} is not a qubit operator"
                )));
            }
            let gram = &e.unitary.dagger() * &e.unitary;
            if !gram.approx_eq(&CMatrix::identity(2), tol::ALGEBRAIC) {
                return Err(Error::InvalidSpec(format!("entry {k} is not unitary")));
            }
            total += e.probability;
        }
        if (total - 1.0).abs() > tol::PROBABILITY {
            return Err(Error::InvalidSpec(format!("probabilities sum to {total}")));
        }
        Ok(Self { branch, entries })
    }

    /// The noiseless channel: identity with probability one.
    pub fn identity(branch: Branch) -> Self {
        Self {
            branch,
            entries: vec![SpecEntry {
                probability: 1.0,
                phase: ONE,
                unitary: CMatrix::identity(2),
            }],
        }
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn entries(&self) -> &[SpecEntry] {
        &self.entries
    }

    /// Entries with non-zero probability, keeping their original indices.
    pub fn effective_entries(&self) -> impl Iterator<Item = (usize, &SpecEntry)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.probability > 0.0)
    }

    /// Same spec with every phase multiplied by `phase`.
    pub fn with_global_phase(&self, phase: C64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.phase *= phase;
        }
        out
    }

    /// Same spec relabelled to another branch.
    pub fn relabel(&self, branch: Branch) -> Self {
        Self {
            branch,
            entries: self.entries.clone(),
        }
    }

    /// Kraus operators `√p_i s_i U_i`; zero-probability entries are dropped.
    pub fn to_kraus(&self) -> KrausChannel {
        let kraus = self
            .effective_entries()
            .map(|(_, e)| e.phased_unitary().scale_real(e.probability.sqrt()))
            .collect();
        KrausChannel {
            dim_in: 2,
            dim_out: 2,
            kraus,
            trace_preserving: true,
        }
    }
}

/// A completely positive map given by Kraus operators.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    trace_preserving: bool,
}

impl KrausChannel {
    /// Validates shapes and the completeness relation: `Σ K†K = I` when
    /// `trace_preserving`, otherwise `Σ K†K ≼ I`.
    pub fn new(kraus: Vec<CMatrix>, trace_preserving: bool) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (dim_out, dim_in) = first.shape();
        if let Some(bad) = kraus.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators of shapes {dim_out}x{dim_in} and {}x{}",
                bad.rows(),
                bad.cols()
            )));
        }
        let ch = Self {
            dim_in,
            dim_out,
            kraus,
            trace_preserving,
        };
        let gram = ch.completeness();
        if trace_preserving {
            let dev = gram.max_abs_diff(&CMatrix::identity(dim_in));
            if dev > tol::PHYSICAL {
                return Err(Error::NotTracePreserving(dev));
            }
        } else {
            let top = hermitian_eigenvalues(&gram.hermitian_part())?[0];
            if top > 1.0 + tol::PHYSICAL {
                return Err(Error::InvalidChannel(format!(
                    "Σ K†K has eigenvalue {top} above one"
                )));
            }
        }
        Ok(ch)
    }

    /// Trace-preserving if the operators complete to identity, subnormalized otherwise.
    pub fn infer(kraus: Vec<CMatrix>) -> Result<Self> {
        match Self::new(kraus.clone(), true) {
            Ok(ch) => Ok(ch),
            Err(Error::NotTracePreserving(_)) => Self::new(kraus, false),
            Err(e) => Err(e),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![CMatrix::identity(dim)],
            trace_preserving: true,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `Σ K†K`
    pub fn completeness(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc += &(&k.dagger() * k);
        }
        acc
    }

    /// `Σ K ρ K†`
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} state into a channel on dimension {}",
                rho.rows(),
                rho.cols(),
                self.dim_in
            )));
        }
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &rho.conjugate_by(k);
        }
        Ok(out)
    }

    /// `(I ⊗ Φ)` on a state of `ancilla ⊗ input`.
    pub fn apply_to_second(&self, ancilla_dim: usize, rho: &CMatrix) -> Result<CMatrix> {
        let n = ancilla_dim * self.dim_in;
        if rho.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} joint state for ancilla {ancilla_dim} and input {}",
                rho.rows(),
                rho.cols(),
                self.dim_in
            )));
        }
        let id = CMatrix::identity(ancilla_dim);
        let mut out = CMatrix::zeros(ancilla_dim * self.dim_out, ancilla_dim * self.dim_out);
        for k in &self.kraus {
            out += &rho.conjugate_by(&tensor(&id, k));
        }
        Ok(out)
    }

    /// Unnormalized Choi matrix `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` (input factor first).
    pub fn choi_matrix(&self) -> CMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let mut out = CMatrix::zeros(din * dout, din * dout);
        for k in &self.kraus {
            // vec of K on input ⊗ output: Σ_i |i⟩ ⊗ K|i⟩
            let v: Vec<C64> = (0..din)
                .flat_map(|i| (0..dout).map(move |o| (i, o)))
                .map(|(i, o)| k[(o, i)])
                .collect();
            out += &CMatrix::projector(&v);
        }
        out
    }

    /// Canonical Kraus set from the Choi eigendecomposition; at most `dim_in·dim_out` operators.
    pub fn compressed(&self) -> Result<Self> {
        let choi = self.choi_matrix();
        let eig = crate::numerics::hermitian_eig(&choi)?;
        let scale = eig.values.first().copied().unwrap_or(0.0).max(1.0);
        let mut kraus = Vec::new();
        for (k, &lambda) in eig.values.iter().enumerate() {
            if lambda <= tol::EIGEN_CLIP * scale {
                continue;
            }
            let v = eig.vector(k);
            let mut op = CMatrix::zeros(self.dim_out, self.dim_in);
            for i in 0..self.dim_in {
                for o in 0..self.dim_out {
                    op[(o, i)] = v[i * self.dim_out + o] * lambda.sqrt();
                }
            }
            kraus.push(op);
        }
        if kraus.is_empty() {
            return Err(Error::ZeroChannel);
        }
        Ok(Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus,
            trace_preserving: self.trace_preserving,
        })
    }

    /// Entrywise distance between the unnormalized Choi matrices of two channels.
    pub fn distance(&self, other: &Self) -> f64 {
        self.choi_matrix().max_abs_diff(&other.choi_matrix())
    }

    /// Normalized dual state.
    pub fn choi(&self) -> Result<ChoiState> {
        ChoiState::from_matrix(self.dim_in, self.dim_out, normalize(self.choi_matrix())?)
    }

    pub fn pauli_decompose(&self) -> Result<PauliCoeffs> {
        if self.dim_in != 2 || self.dim_out != 2 {
            return Err(Error::DimensionMismatch(format!(
                "Pauli decomposition of a {}→{} channel",
                self.dim_in, self.dim_out
            )));
        }
        Ok(PauliCoeffs::from_kraus(&self.kraus))
    }
}

fn normalize(m: CMatrix) -> Result<CMatrix> {
    let trace = m.trace().re;
    if trace <= tol::MIN_SUCCESS {
        return Err(Error::ZeroChannel);
    }
    Ok(m.scale_real(1.0 / trace))
}

/// Coefficients `c_{k,l}` of a qubit map `ρ ↦ Σ c_{k,l} σ_k ρ σ_l†`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliCoeffs {
    c: CMatrix,
}

impl PauliCoeffs {
    /// `c_{k,l} = Σ_i Tr[K_i σ_k†] · Tr[K_i σ_l†]* / 4`
    pub fn from_kraus(kraus: &[CMatrix]) -> Self {
        let paulis: Vec<CMatrix> = (0..4).map(pauli).collect();
        let mut c = CMatrix::zeros(4, 4);
        for k in kraus {
            // Tr[K σ†] = Σ_ab K_ab conj(σ_ab)
            let t: Vec<C64> = paulis.iter().map(|s| s.inner(k)).collect();
            for a in 0..4 {
                for b in 0..4 {
                    c[(a, b)] += t[a] * t[b].conj() / 4.0;
                }
            }
        }
        Self { c }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.c
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.c[(k, l)]
    }

    /// `Σ_k c_{k,k}`; equals `Tr Φ(I/2)`.
    pub fn trace(&self) -> f64 {
        self.c.trace().re
    }

    /// `Σ c_{k,l} σ_k ρ σ_l†`
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(2, 2);
        for k in 0..4 {
            let left = &pauli(k) * rho;
            for l in 0..4 {
                let c = self.c[(k, l)];
                if c == ZERO {
                    continue;
                }
                out += &(&left * &pauli(l).dagger()).scale(c);
            }
        }
        out
    }

    /// Smallest eigenvalue of the coefficient matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*hermitian_eigenvalues(&self.c)?.last().expect("4x4"))
    }
}

/// Unit-trace Choi matrix, basis ordered input-then-output.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawChoi")]
pub struct ChoiState {
    dim_in: usize,
    dim_out: usize,
    matrix: CMatrix,
}

#[derive(Deserialize)]
struct RawChoi {
    dim_in: usize,
    dim_out: usize,
    matrix: CMatrix,
}

impl TryFrom<RawChoi> for ChoiState {
    type Error = Error;

    fn try_from(raw: RawChoi) -> Result<Self> {
        Self::from_matrix(raw.dim_in, raw.dim_out, raw.matrix)
    }
}

impl ChoiState {
    pub fn from_matrix(dim_in: usize, dim_out: usize, matrix: CMatrix) -> Result<Self> {
        let n = dim_in * dim_out;
        if matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Choi matrix for {dim_in}→{dim_out}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > tol::ALGEBRAIC {
            return Err(Error::NotHermitian(herm));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol::PHYSICAL {
            return Err(Error::InvalidChannel(format!(
                "dual state has trace {trace}"
            )));
        }
        let min = *hermitian_eigenvalues(&matrix)?.last().expect("non-empty");
        if min < -tol::PHYSICAL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            dim_in,
            dim_out,
            matrix,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Entry `⟨in_r out_r| J |in_c out_c⟩`.
    pub fn entry(&self, row: (usize, usize), col: (usize, usize)) -> C64 {
        self.matrix[(row.0 * self.dim_out + row.1, col.0 * self.dim_out + col.1)]
    }

    /// Basis labels `"<in><out>"` from per-level names.
    pub fn labels(&self, in_names: &[&str], out_names: &[&str]) -> Vec<String> {
        in_names
            .iter()
            .flat_map(|i| out_names.iter().map(move |o| format!("{i}{o}")))
            .collect()
    }

    /// Largest modulus among off-diagonal entries.
    pub fn max_offdiagonal(&self) -> f64 {
        let n = self.matrix.rows();
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|ij| self.matrix[ij].norm())
            .fold(0.0, f64::max)
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        crate::numerics::fidelity(&self.matrix, &other.matrix)
    }
}

/// Level names for a qubit polarization.
pub const QUBIT_LEVELS: [&str; 2] = ["H", "V"];
