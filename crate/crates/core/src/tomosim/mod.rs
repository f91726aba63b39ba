//! Simulated qutrit process tomography through the interferometer.
//!
//! For tomography of arm `a`, the photon enters path `a` with polarization
//! amplitudes `(a_H, a_V)` and path `b` with amplitude `a₀`. The `b` arm carries
//! the identity and a fixed `|H⟩` reference polarization, so it plays the role
//! of the vacuum level `|0⟩` of the qutrit `{|0⟩, |H⟩, |V⟩}`. Arm `b` is
//! measured with the roles of the paths swapped.

mod reconstruct;
mod systematics;

pub use reconstruct::{
    coherence_entry, coherence_phase_error, design_matrix, reconstruct_qutrit, reconstruction_json,
    DesignMatrix, ReconstructionResult, ALLOWED_BLOCK,
};
pub use systematics::{gauss_hermite, inject_systematics, with_static_errors, SystematicsConfig};

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{Branch, ChoiState, RandomUnitarySpec};
use crate::error::{Error, Result};
use crate::numerics::{C64, ONE, ZERO};
use crate::superpose::{mz_superpose, qutrit_extend, ControlledChannel};

/// One prepare-and-measure configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomoSetting {
    pub id: usize,
    pub branch: Branch,
    /// Polarization `(H, V)` sent into the measured arm.
    pub prep_pol: [C64; 2],
    /// Amplitude `a₀` of the vacuum level: 0, 1 or `1/√2`.
    pub prep_vacuum: f64,
    /// Phase of the vacuum amplitude relative to the photon amplitude.
    pub prep_phase: f64,
    pub meas_pol: [C64; 2],
    pub meas_vacuum: f64,
    pub meas_phase: f64,
}

fn trit(pol: [C64; 2], vacuum: f64, phase: f64) -> [C64; 3] {
    let n = (pol[0].norm_sqr() + pol[1].norm_sqr()).sqrt();
    let a_pol = (1.0 - vacuum * vacuum).max(0.0).sqrt();
    let s = if n > 0.0 { a_pol / n } else { 0.0 };
    [C64::from_polar(vacuum, phase), pol[0] * s, pol[1] * s]
}

impl TomoSetting {
    /// Qutrit prepared in the measured arm, basis `(0, H, V)`.
    pub fn prep_trit(&self) -> [C64; 3] {
        trit(self.prep_pol, self.prep_vacuum, self.prep_phase)
    }

    pub fn meas_trit(&self) -> [C64; 3] {
        trit(self.meas_pol, self.meas_vacuum, self.meas_phase)
    }

    /// Path ⊗ polarization vector of a qutrit for this branch.
    fn mz_vector(&self, t: [C64; 3]) -> [C64; 4] {
        match self.branch {
            // |a⟩|H⟩, |a⟩|V⟩, |b⟩|H⟩, |b⟩|V⟩
            Branch::A => [t[1], t[2], t[0], ZERO],
            Branch::B => [t[0], ZERO, t[1], t[2]],
        }
    }

    pub fn prep_state(&self) -> [C64; 4] {
        self.mz_vector(self.prep_trit())
    }

    pub fn meas_state(&self) -> [C64; 4] {
        self.mz_vector(self.meas_trit())
    }

    fn check(&self) -> Result<()> {
        for (v, pol) in [
            (self.prep_vacuum, self.prep_pol),
            (self.meas_vacuum, self.meas_pol),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    name: "vacuum amplitude",
                    value: v,
                    range: "[0, 1]",
                });
            }
            if v < 1.0 && pol[0].norm_sqr() + pol[1].norm_sqr() == 0.0 {
                return Err(Error::NotNormalized(0.0));
            }
        }
        Ok(())
    }
}

/// The interferometer used for tomography of one arm: the other arm is the identity.
pub fn tomography_interferometer(spec: &RandomUnitarySpec) -> ControlledChannel {
    let companion = RandomUnitarySpec::identity(spec.branch().other());
    match spec.branch() {
        Branch::A => mz_superpose(spec, &companion),
        Branch::B => mz_superpose(&companion, spec),
    }
}

/// `Σ_ij |⟨ψ′| K_ij |ψ⟩|²`
pub fn born_probability(setting: &TomoSetting, mz: &ControlledChannel) -> f64 {
    let psi = setting.prep_state();
    let phi = setting.meas_state();
    mz.entries()
        .iter()
        .map(|e| (e.operator.sandwich(&phi, &psi) * e.weight).norm_sqr())
        .sum()
}

/// `|0⟩, H, V, D, R, (|0⟩+|H⟩)/√2, (i|0⟩+|H⟩)/√2, (|0⟩+|V⟩)/√2, (i|0⟩+|V⟩)/√2`
/// as `(polarization, vacuum amplitude, phase)`.
fn qutrit_states() -> [([C64; 2], f64, f64); 9] {
    let s = 0.5f64.sqrt();
    let h = [ONE, ZERO];
    let v = [ZERO, ONE];
    let half_pi = std::f64::consts::FRAC_PI_2;
    [
        (h, 1.0, 0.0),
        (h, 0.0, 0.0),
        (v, 0.0, 0.0),
        ([ONE, ONE], 0.0, 0.0),
        ([ONE, C64::new(0.0, 1.0)], 0.0, 0.0),
        (h, s, 0.0),
        (h, s, half_pi),
        (v, s, 0.0),
        (v, s, half_pi),
    ]
}

/// 9 preparations × 9 measurements, each informationally complete on the qutrit.
pub fn qutrit_settings(branch: Branch) -> Vec<TomoSetting> {
    let states = qutrit_states();
    let mut out = Vec::with_capacity(81);
    for (pp, pv, pph) in states {
        for (mp, mv, mph) in states {
            out.push(TomoSetting {
                id: out.len(),
                branch,
                prep_pol: pp,
                prep_vacuum: pv,
                prep_phase: pph,
                meas_pol: mp,
                meas_vacuum: mv,
                meas_phase: mph,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting_id: usize,
    pub shots: u64,
    pub successes: u64,
}

impl CountRecord {
    pub fn frequency(&self) -> f64 {
        self.successes as f64 / self.shots as f64
    }
}

/// Shots per setting; `Exact` uses the probabilities themselves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shots {
    Finite(u64),
    Exact,
}

impl std::str::FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("exact") {
            return Ok(Shots::Exact);
        }
        let n: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("invalid shot count '{s}'")))?;
        if n.is_nan() || n < 1.0 || n.fract() != 0.0 || n > u64::MAX as f64 {
            return Err(Error::Parse(format!(
                "shot count must be a positive integer, got '{s}'"
            )));
        }
        Ok(Shots::Finite(n as u64))
    }
}

const COUNT_STREAM: u64 = 0;
const JITTER_STREAM: u64 = 1;

fn setting_rng(seed: u64, id: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * id as u64 + purpose);
    rng
}

/// One binomial draw per setting from its own stream of the master seed.
pub fn sample_counts(probabilities: &[f64], shots: u64, seed: u64) -> Result<Vec<CountRecord>> {
    if shots == 0 {
        return Err(Error::OutOfRange {
            name: "shots",
            value: 0.0,
            range: ">= 1",
        });
    }
    probabilities
        .iter()
        .enumerate()
        .map(|(id, &p)| {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            let dist = Binomial::new(shots, p.clamp(0.0, 1.0))
                .map_err(|e| Error::InvalidSpec(e.to_string()))?;
            Ok(CountRecord {
                setting_id: id,
                shots,
                successes: dist.sample(&mut setting_rng(seed, id, COUNT_STREAM)),
            })
        })
        .collect()
}

/// Header `setting_id,shots,successes`.
pub fn counts_csv(records: &[CountRecord]) -> String {
    let mut out = String::from("setting_id,shots,successes\n");
    for r in records {
        writeln!(out, "{},{},{}", r.setting_id, r.shots, r.successes).unwrap();
    }
    out
}

pub fn parse_counts_csv(text: &str) -> Result<Vec<CountRecord>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == "setting_id,shots,successes" => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header 'setting_id,shots,successes', got {other:?}"
            )))
        }
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("line {}: invalid integer '{s}'", n + 2)))
            };
            let [id, shots, succ] = f[..] else {
                return Err(Error::Parse(format!("line {}: expected 3 fields", n + 2)));
            };
            let r = CountRecord {
                setting_id: parse(id)? as usize,
                shots: parse(shots)?,
                successes: parse(succ)?,
            };
            if r.shots == 0 || r.successes > r.shots {
                return Err(Error::Parse(format!(
                    "line {}: need 0 <= successes <= shots, shots > 0",
                    n + 2
                )));
            }
            Ok(r)
        })
        .collect()
}

/// Probabilities of every setting, each with its own quasi-static path-phase offset.
pub fn simulate_probabilities(
    mz: &ControlledChannel,
    settings: &[TomoSetting],
    jitter: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let normal = Normal::new(0.0, jitter).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    settings
        .par_iter()
        .map(|s| {
            s.check()?;
            if jitter == 0.0 {
                return Ok(born_probability(s, mz));
            }
            let delta = normal.sample(&mut setting_rng(seed, s.id, JITTER_STREAM));
            Ok(born_probability(s, &mz.with_path_phase(delta)))
        })
        .collect()
}

/// Ground-truth dual state of the vacuum-extended arm.
pub fn true_qutrit_choi(spec: &RandomUnitarySpec) -> Result<ChoiState> {
    qutrit_extend(spec).to_channel().choi()
}

/// Everything produced by one simulated tomography run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TomographyRun {
    pub settings: Vec<TomoSetting>,
    pub probabilities: Vec<f64>,
    /// `None` in exact mode.
    pub counts: Option<Vec<CountRecord>>,
    pub result: ReconstructionResult,
}

/// Full loop: simulate, sample, reconstruct, compare with the ideal qutrit channel.
pub fn run_tomography(
    spec: &RandomUnitarySpec,
    shots: Shots,
    systematics: &SystematicsConfig,
) -> Result<TomographyRun> {
    let settings = qutrit_settings(spec.branch());
    let mz = with_static_errors(&tomography_interferometer(spec), systematics)?;
    let probabilities =
        simulate_probabilities(&mz, &settings, systematics.phase_jitter, systematics.seed)?;
    let counts = match shots {
        Shots::Exact => None,
        Shots::Finite(n) => Some(sample_counts(&probabilities, n, systematics.seed)?),
    };
    let freqs: Vec<f64> = match &counts {
        None => probabilities.clone(),
        Some(c) => c.iter().map(CountRecord::frequency).collect(),
    };
    let truth = true_qutrit_choi(spec)?;
    let result = reconstruct_qutrit(&freqs, &settings, Some(&truth))?;
    Ok(TomographyRun {
        settings,
        probabilities,
        counts,
        result,
    })
}

/// Frequencies aligned with `settings` from a counts table keyed by setting id.
pub fn frequencies_for(settings: &[TomoSetting], counts: &[CountRecord]) -> Result<Vec<f64>> {
    settings
        .iter()
        .map(|s| {
            let mut hits = counts.iter().filter(|c| c.setting_id == s.id);
            match (hits.next(), hits.next()) {
                (Some(c), None) => Ok(c.frequency()),
                (None, _) => Err(Error::Parse(format!("no counts for setting {}", s.id))),
                _ => Err(Error::Parse(format!(
                    "duplicate counts for setting {}",
                    s.id
                ))),
            }
        })
        .collect()
}
