//! Von Neumann entropy, coherent information and its maximization over inputs.
//!
//! Entropies are in bits. For subnormalized maps both the output and the joint
//! state are divided by the success probability `Tr[Φ(ρ)]` first.

mod simplex;
mod sweep;

pub use simplex::{minimize, SimplexOptions, SimplexResult};
pub use sweep::{
    parse_grid, sweep, sweep_csv, sweep_with, two_qutrit_bound, Implementation, Model, SweepCurve,
    SweepOptions, SweepPoint, SweepResult,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, tol, vec_sqrt, CMatrix, C64, ZERO};

/// Hermitian, PSD, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix", into = "CMatrix")]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} state",
                m.rows(),
                m.cols()
            )));
        }
        let herm = m.hermiticity_error();
        if herm > tol::ALGEBRAIC {
            return Err(Error::NotHermitian(herm));
        }
        let trace = m.trace().re;
        if (trace - 1.0).abs() > tol::PHYSICAL {
            return Err(Error::NotNormalized(trace));
        }
        let min = hermitian_eigenvalues(&m)?.last().copied().unwrap_or(0.0);
        if min < -tol::PHYSICAL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self(m.hermitian_part()))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(CMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// `|v⟩⟨v|/⟨v|v⟩`
    pub fn pure(v: &[C64]) -> Result<Self> {
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if n <= tol::MIN_SUCCESS {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self(CMatrix::projector(v).scale_real(1.0 / n)))
    }

    /// `A†A/Tr[A†A]` for any nonzero `A`.
    pub fn from_factor(a: &CMatrix) -> Result<Self> {
        let m = &a.dagger() * a;
        let t = m.trace().re;
        if t <= tol::MIN_SUCCESS {
            return Err(Error::NotNormalized(t));
        }
        Ok(Self(m.scale_real(1.0 / t).hermitian_part()))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

impl TryFrom<CMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(m: CMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityMatrix> for CMatrix {
    fn from(rho: DensityMatrix) -> Self {
        rho.0
    }
}

/// `−Σ λ log₂ λ` over a spectrum, dropping eigenvalues below the clip.
pub fn spectrum_entropy(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > tol::EIGEN_CLIP)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        + 0.0
}

pub fn entropy(rho: &DensityMatrix) -> f64 {
    spectrum_entropy(&hermitian_eigenvalues(rho.matrix()).expect("density matrices are Hermitian"))
}

/// `H(Φ(ρ)) − H((I ⊗ Φ)(vec(√ρ) vec(√ρ)†))`, computed through the purification.
pub fn coherent_information(ch: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    let d = ch.dim_in();
    if rho.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional state into a channel on dimension {d}",
            rho.dim()
        )));
    }
    let out = ch.apply(rho.matrix())?;
    let success = out.trace().re;
    if !ch.is_trace_preserving() && success < tol::MIN_SUCCESS {
        return Err(Error::VanishingSuccess(success));
    }
    let psi = vec_sqrt(rho.matrix())?;
    let joint = ch.apply_to_second(d, &CMatrix::projector(&psi))?;
    let h_out = spectrum_entropy(&scaled(hermitian_eigenvalues(&out)?, success));
    let h_joint = spectrum_entropy(&scaled(hermitian_eigenvalues(&joint)?, success));
    Ok(h_out - h_joint)
}

fn scaled(mut v: Vec<f64>, s: f64) -> Vec<f64> {
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Fast evaluator of the coherent information for a fixed channel.
///
/// The joint state has the same nonzero spectrum as the complementary output
/// `G_kl = Tr[K_k ρ K_l†]`, which is at most `rank(Choi)` square.
#[derive(Clone, Debug)]
pub struct IcObjective {
    kraus: Vec<CMatrix>,
    /// `K_l† K_k`, upper triangle `k ≤ l`, row-major.
    products: Vec<CMatrix>,
    /// `Σ K†K`
    effect: CMatrix,
    dim_in: usize,
}

impl IcObjective {
    pub fn new(ch: &KrausChannel) -> Result<Self> {
        let compact = ch.compressed()?;
        let kraus = compact.kraus().to_vec();
        let mut products = Vec::new();
        for k in 0..kraus.len() {
            for l in k..kraus.len() {
                products.push(&kraus[l].dagger() * &kraus[k]);
            }
        }
        Ok(Self {
            kraus,
            products,
            effect: ch.completeness(),
            dim_in: ch.dim_in(),
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn success_probability(&self, rho: &CMatrix) -> f64 {
        trace_product(&self.effect, rho).re
    }

    pub fn evaluate(&self, rho: &CMatrix) -> Result<f64> {
        let r = self.kraus.len();
        let mut g = CMatrix::zeros(r, r);
        let mut idx = 0;
        for k in 0..r {
            for l in k..r {
                let v = trace_product(&self.products[idx], rho);
                g[(k, l)] = v;
                g[(l, k)] = v.conj();
                idx += 1;
            }
        }
        let success = g.trace().re;
        if success < tol::MIN_SUCCESS {
            return Err(Error::VanishingSuccess(success));
        }
        let d_out = self.kraus[0].rows();
        let mut out = CMatrix::zeros(d_out, d_out);
        for k in &self.kraus {
            out += &rho.conjugate_by(k);
        }
        let h_out = spectrum_entropy(&scaled(hermitian_eigenvalues(&out)?, success));
        let h_env = spectrum_entropy(&scaled(hermitian_eigenvalues(&g)?, success));
        Ok(h_out - h_env)
    }
}

/// `Tr[A B]`
fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.rows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Real coordinates of an upper-triangular `A`: the diagonal is real, each
/// strictly upper entry takes a real and imaginary part (`d²` numbers).
pub fn factor_from_params(x: &[f64], d: usize) -> CMatrix {
    let mut a = CMatrix::zeros(d, d);
    let mut it = x.iter().copied();
    for r in 0..d {
        a[(r, r)] = C64::new(it.next().unwrap_or(0.0), 0.0);
        for c in (r + 1)..d {
            let re = it.next().unwrap_or(0.0);
            let im = it.next().unwrap_or(0.0);
            a[(r, c)] = C64::new(re, im);
        }
    }
    a
}

/// Upper-triangular `R` with `R†R = ρ`; rows with vanishing pivots are left at zero.
pub fn params_from_state(rho: &CMatrix) -> Vec<f64> {
    let d = rho.rows();
    let mut r = CMatrix::zeros(d, d);
    for i in 0..d {
        let a = rho[(i, i)].re - (0..i).map(|k| r[(k, i)].norm_sqr()).sum::<f64>();
        if a <= 1e-14 {
            continue;
        }
        let piv = a.sqrt();
        r[(i, i)] = C64::new(piv, 0.0);
        for c in (i + 1)..d {
            let s: C64 = (0..i).map(|k| r[(k, i)].conj() * r[(k, c)]).sum();
            r[(i, c)] = (rho[(i, c)] - s) / piv;
        }
    }
    let mut x = Vec::with_capacity(d * d);
    for i in 0..d {
        x.push(r[(i, i)].re);
        for c in (i + 1)..d {
            x.push(r[(i, c)].re);
            x.push(r[(i, c)].im);
        }
    }
    x
}

fn state_from_params(x: &[f64], d: usize) -> Option<CMatrix> {
    let a = factor_from_params(x, d);
    let m = &a.dagger() * &a;
    let t = m.trace().re;
    (t > 1e-300 && t.is_finite()).then(|| m.scale_real(1.0 / t))
}

#[derive(Clone, Debug)]
pub struct OptimizerOptions {
    pub simplex: SimplexOptions,
    pub n_starts: usize,
    pub n_probes: usize,
    pub seed: u64,
    /// Additional starting states tried after the built-in ones.
    pub extra_starts: Vec<DensityMatrix>,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            simplex: SimplexOptions::default(),
            n_starts: 8,
            n_probes: 20,
            seed: 0x5eed,
            extra_starts: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IcMaximum {
    pub value: f64,
    pub argmax: DensityMatrix,
    /// Best value over `I/d` and the probe states.
    pub baseline: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Maximally mixed state, basis states, then pure states on the first two levels
/// (Hadamard eigenstates, `|±⟩`, `|±i⟩`), truncated to `n`.
pub fn default_starts(d: usize, n: usize) -> Vec<DensityMatrix> {
    let mut out = vec![DensityMatrix::maximally_mixed(d)];
    let ket = |a: C64, b: C64| {
        let mut v = vec![ZERO; d];
        v[0] = a;
        if d > 1 {
            v[1] = b;
        }
        DensityMatrix::pure(&v).expect("nonzero vector")
    };
    for k in 0..d {
        let mut v = vec![ZERO; d];
        v[k] = C64::new(1.0, 0.0);
        out.push(DensityMatrix::pure(&v).expect("basis vector"));
    }
    if d > 1 {
        let (s, c) = (std::f64::consts::PI / 8.0).sin_cos();
        let r = |x: f64| C64::new(x, 0.0);
        out.push(ket(r(c), r(s)));
        out.push(ket(r(-s), r(c)));
        out.push(ket(r(1.0), r(1.0)));
        out.push(ket(r(1.0), r(-1.0)));
        out.push(ket(r(1.0), C64::new(0.0, 1.0)));
        out.push(ket(r(1.0), C64::new(0.0, -1.0)));
    }
    out.truncate(n);
    out
}

/// Deterministic pseudo-random states: alternately pure and full rank.
pub fn probe_states(d: usize, n: usize, seed: u64) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut gauss = || {
        C64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    };
    (0..n)
        .map(|i| {
            if i % 2 == 0 {
                let v: Vec<C64> = (0..d).map(|_| gauss()).collect();
                DensityMatrix::pure(&v).expect("nonzero gaussian vector")
            } else {
                let data: Vec<C64> = (0..d * d).map(|_| gauss()).collect();
                let a = CMatrix::from_vec(d, d, data).expect("finite entries");
                DensityMatrix::from_factor(&a).expect("nonzero gaussian matrix")
            }
        })
        .collect()
}

pub fn max_coherent_information(ch: &KrausChannel) -> Result<IcMaximum> {
    max_coherent_information_with(ch, &OptimizerOptions::default())
}

/// Multi-start simplex search over `ρ = A†A/Tr[A†A]`.
pub fn max_coherent_information_with(
    ch: &KrausChannel,
    opts: &OptimizerOptions,
) -> Result<IcMaximum> {
    let d = ch.dim_in();
    if d > 9 {
        return Err(Error::OutOfRange {
            name: "input dimension",
            value: d as f64,
            range: "<= 9",
        });
    }
    let objective = IcObjective::new(ch)?;
    let score = |rho: &CMatrix| objective.evaluate(rho).unwrap_or(f64::NEG_INFINITY);

    let mut baseline = score(DensityMatrix::maximally_mixed(d).matrix());
    let mut best_probe: Option<(f64, DensityMatrix)> = None;
    for p in probe_states(d, opts.n_probes, opts.seed) {
        let v = score(p.matrix());
        baseline = baseline.max(v);
        if best_probe.as_ref().is_none_or(|(b, _)| v > *b) {
            best_probe = Some((v, p));
        }
    }

    let mut starts = default_starts(d, opts.n_starts);
    starts.extend(best_probe.map(|(_, p)| p));
    starts.extend(opts.extra_starts.iter().cloned());

    let mut best: Option<(f64, CMatrix, bool)> = None;
    let mut evaluations = 0;
    for start in &starts {
        if start.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}-dimensional start for a channel on dimension {d}",
                start.dim()
            )));
        }
        let x0 = params_from_state(start.matrix());
        let run = minimize(
            |x| match state_from_params(x, d) {
                Some(rho) => -score(&rho),
                None => f64::INFINITY,
            },
            &x0,
            &opts.simplex,
        );
        evaluations += run.evaluations;
        let value = -run.f;
        if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
            let rho = state_from_params(&run.x, d).unwrap_or_else(|| start.matrix().clone());
            best = Some((value, rho, run.converged));
        }
    }
    let (value, rho, converged) = best.ok_or(Error::ZeroChannel)?;
    if !value.is_finite() {
        return Err(Error::VanishingSuccess(0.0));
    }
    Ok(IcMaximum {
        value,
        argmax: DensityMatrix::new(rho)?,
        baseline,
        converged,
        evaluations,
    })
}

#[cfg(test)]
mod tests;
