use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{max_coherent_information_with, DensityMatrix, IcMaximum, OptimizerOptions};
use crate::channels::{depolarizing_coherent, depolarizing_incoherent, Branch, RandomUnitarySpec};
use crate::error::{Error, Result};
use crate::numerics::{tensor, CMatrix};
use crate::superpose::{mz_superpose, qutrit_extend, PathState, QutritChannel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Implementation {
    Coherent,
    Incoherent,
}

impl Implementation {
    pub fn spec(self, alpha: f64, branch: Branch) -> Result<RandomUnitarySpec> {
        match self {
            Implementation::Coherent => depolarizing_coherent(alpha, branch),
            Implementation::Incoherent => depolarizing_incoherent(alpha, branch),
        }
    }
}

impl fmt::Display for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Implementation::Coherent => "coherent",
            Implementation::Incoherent => "incoherent",
        })
    }
}

impl FromStr for Implementation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(Implementation::Coherent),
            "incoherent" => Ok(Implementation::Incoherent),
            other => Err(Error::Parse(format!(
                "unknown implementation '{other}' (expected coherent or incoherent)"
            ))),
        }
    }
}

/// Channel models ordered from lowest to highest in the hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Qubit,
    PostSelected,
    MachZehnder,
    QutritT0,
    TwoQutritBound,
}

impl Model {
    pub const ALL: [Model; 5] = [
        Model::Qubit,
        Model::PostSelected,
        Model::MachZehnder,
        Model::QutritT0,
        Model::TwoQutritBound,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Model::Qubit => "qubit",
            Model::PostSelected => "post_selected",
            Model::MachZehnder => "mach_zehnder",
            Model::QutritT0 => "qutrit_t0",
            Model::TwoQutritBound => "two_qutrit_bound",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    pub ic_bits: f64,
    pub argmax: DensityMatrix,
    /// Success probability at the argmax (post-selected model only).
    pub success_probability: Option<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepCurve {
    pub model: Model,
    pub points: Vec<SweepPoint>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub implementation: Implementation,
    pub alphas: Vec<f64>,
    pub curves: Vec<SweepCurve>,
}

impl SweepResult {
    pub fn curve(&self, model: Model) -> Option<&SweepCurve> {
        self.curves.iter().find(|c| c.model == model)
    }

    pub fn values(&self, model: Model) -> Option<Vec<f64>> {
        self.curve(model)
            .map(|c| c.points.iter().map(|p| p.ic_bits).collect())
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    pub optimizer: OptimizerOptions,
}

/// `"start:stop:step"` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("invalid number '{t}' in grid '{s}'")))
    };
    let grid: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(Error::Parse(format!("grid '{s}' must be start:stop:step")));
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(Error::Parse(format!(
                "grid '{s}' needs step > 0 and stop >= start"
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| round12(start + k as f64 * step)).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    validate_grid(&grid)?;
    Ok(grid)
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Parse("empty alpha grid".into()));
    }
    if let Some(&a) = grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: a,
            range: "[0, 1]",
        });
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse(
            "alpha grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `Ic_max(a) + Ic_max(b)`: a lower bound for the two-qutrit product channel.
pub fn two_qutrit_bound(ch_a: &QutritChannel, ch_b: &QutritChannel) -> Result<f64> {
    let opts = OptimizerOptions::default();
    Ok(
        max_coherent_information_with(&ch_a.to_channel(), &opts)?.value
            + max_coherent_information_with(&ch_b.to_channel(), &opts)?.value,
    )
}

pub fn sweep(grid: &[f64], implementation: Implementation) -> Result<SweepResult> {
    sweep_with(grid, implementation, &SweepOptions::default())
}

/// Every model at every grid point; points run in parallel, results keep grid order.
pub fn sweep_with(
    grid: &[f64],
    implementation: Implementation,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    validate_grid(grid)?;
    let rows: Vec<[SweepPoint; 5]> = grid
        .par_iter()
        .map(|&alpha| sweep_point(alpha, implementation, &opts.optimizer))
        .collect::<Result<_>>()?;
    let curves = Model::ALL
        .iter()
        .enumerate()
        .map(|(m, &model)| SweepCurve {
            model,
            points: rows.iter().map(|r| r[m].clone()).collect(),
        })
        .collect();
    Ok(SweepResult {
        implementation,
        alphas: grid.to_vec(),
        curves,
    })
}

fn point(max: IcMaximum) -> SweepPoint {
    SweepPoint {
        ic_bits: max.value,
        argmax: max.argmax,
        success_probability: None,
        converged: max.converged,
    }
}

/// `U ρ U†` embedding of a state into the levels `idx` of a `d`-dimensional space.
fn embed(rho: &CMatrix, d: usize, idx: &[usize]) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            out[(i, j)] = rho[(a, b)];
        }
    }
    out
}

fn sweep_point(
    alpha: f64,
    implementation: Implementation,
    base: &OptimizerOptions,
) -> Result<[SweepPoint; 5]> {
    let spec_a = implementation.spec(alpha, Branch::A)?;
    let spec_b = implementation.spec(alpha, Branch::B)?;
    let with_starts = |starts: Vec<DensityMatrix>| OptimizerOptions {
        extra_starts: base.extra_starts.iter().cloned().chain(starts).collect(),
        ..base.clone()
    };

    let qubit = max_coherent_information_with(&spec_a.to_kraus(), base)?;

    let mz = mz_superpose(&spec_a, &spec_b);
    let ps = mz.post_select(&PathState::plus(), &PathState::plus())?;
    let ps_channel = ps.to_channel()?;
    let post =
        max_coherent_information_with(&ps_channel, &with_starts(vec![qubit.argmax.clone()]))?;
    let post_success = ps.success_probability(post.argmax.matrix())?;

    // path |a⟩ with the qubit optimum reproduces the single-arm value
    let in_a = DensityMatrix::new(embed(qubit.argmax.matrix(), 4, &[0, 1]))?;
    let mzm = max_coherent_information_with(&mz.to_channel()?, &with_starts(vec![in_a]))?;

    let t0 = qutrit_extend(&spec_a);
    let t1 = qutrit_extend(&spec_b);
    let in_photon = DensityMatrix::new(embed(qubit.argmax.matrix(), 3, &[1, 2]))?;
    let q0 =
        max_coherent_information_with(&t0.to_channel(), &with_starts(vec![in_photon.clone()]))?;
    let q1 = max_coherent_information_with(
        &t1.to_channel(),
        &with_starts(vec![in_photon, q0.argmax.clone()]),
    )?;

    let bound = SweepPoint {
        ic_bits: q0.value + q1.value,
        argmax: DensityMatrix::new(tensor(q0.argmax.matrix(), q1.argmax.matrix()))?,
        success_probability: None,
        converged: q0.converged && q1.converged,
    };
    let mut post = point(post);
    post.success_probability = Some(post_success);
    Ok([point(qubit), post, point(mzm), point(q0), bound])
}

/// Header `alpha,model,ic_bits,success_probability,converged`; success is blank
/// except for the post-selected model.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("alpha,model,ic_bits,success_probability,converged\n");
    for (i, alpha) in result.alphas.iter().enumerate() {
        for curve in &result.curves {
            let p = &curve.points[i];
            let success = p
                .success_probability
                .map(|s| format!("{:.6}", s + 0.0))
                .unwrap_or_default();
            writeln!(
                out,
                "{:.6},{},{:.6},{},{}",
                alpha,
                curve.model,
                p.ic_bits + 0.0,
                success,
                p.converged
            )
            .unwrap();
        }
    }
    out
}
