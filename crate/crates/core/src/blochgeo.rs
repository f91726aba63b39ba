//! Bloch-ball geometry of qubit maps: affine form of trace-preserving channels
//! and sampled images of normalized post-selected maps.

use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::channels::{pauli, KrausChannel};
use crate::error::{Error, Result};
use crate::numerics::{tol, CMatrix};
use crate::superpose::PostSelectedChannel;

pub type BlochVector = [f64; 3];

pub fn bloch_vector(rho: &CMatrix) -> BlochVector {
    [1, 2, 3].map(|k| pauli(k).inner(rho).re)
}

/// `(I + r·σ)/2`
pub fn density_from_bloch(r: BlochVector) -> CMatrix {
    let mut m = CMatrix::identity(2);
    for (k, x) in r.iter().enumerate() {
        m = &m + &pauli(k + 1).scale_real(*x);
    }
    m.scale_real(0.5)
}

/// Anything that maps a qubit state to an (unnormalized) qubit state.
pub trait QubitMap {
    fn map_qubit(&self, rho: &CMatrix) -> Result<CMatrix>;
}

impl QubitMap for KrausChannel {
    fn map_qubit(&self, rho: &CMatrix) -> Result<CMatrix> {
        if self.dim_in() != 2 || self.dim_out() != 2 {
            return Err(Error::DimensionMismatch("qubit map expected".into()));
        }
        self.apply(rho)
    }
}

impl QubitMap for PostSelectedChannel {
    fn map_qubit(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.apply(rho)
    }
}

/// `r_out = M·r_in + t`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineBlochMap {
    pub m: [[f64; 3]; 3],
    pub t: BlochVector,
}

impl AffineBlochMap {
    pub fn apply(&self, r: BlochVector) -> BlochVector {
        std::array::from_fn(|i| self.t[i] + (0..3).map(|j| self.m[i][j] * r[j]).sum::<f64>())
    }

    /// Descending singular values of `M`.
    pub fn singular_values(&self) -> [f64; 3] {
        let m = Matrix3::from_fn(|i, j| self.m[i][j]);
        let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        [s[0], s[1], s[2]]
    }
}

/// `M_mn = Tr[σ_m Φ(σ_n)]/2`, `t_m = Tr[σ_m Φ(I/2)]`.
pub fn affine_of(ch: &KrausChannel) -> Result<AffineBlochMap> {
    if ch.dim_in() != 2 || ch.dim_out() != 2 {
        return Err(Error::DimensionMismatch(
            "affine Bloch form needs a qubit channel".into(),
        ));
    }
    if !ch.is_trace_preserving() {
        return Err(Error::NotTracePreserving(
            ch.completeness().max_abs_diff(&CMatrix::identity(2)),
        ));
    }
    let mut m = [[0.0; 3]; 3];
    for n in 0..3 {
        let out = ch.apply(&pauli(n + 1))?;
        for (row, r) in m.iter_mut().zip(bloch_vector(&out)) {
            row[n] = r / 2.0;
        }
    }
    let t = bloch_vector(&ch.apply(&CMatrix::identity(2).scale_real(0.5))?);
    Ok(AffineBlochMap { m, t })
}

/// `n` near-uniform unit vectors on a Fibonacci lattice.
pub fn fibonacci_sphere(n: usize) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (1.0 + 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let theta = golden * i as f64;
            [rho * theta.cos(), rho * theta.sin(), z]
        })
        .collect()
}

/// The six pure states `±x, ±y, ±z`.
pub fn cardinal_states() -> [BlochVector; 6] {
    [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub input: BlochVector,
    /// Bloch vector of the normalized output.
    pub output: BlochVector,
    pub success: f64,
}

impl BlochPoint {
    /// Fidelity of the normalized output with the pure input.
    pub fn self_fidelity(&self) -> f64 {
        (1.0 + dot(self.input, self.output)) / 2.0
    }
}

/// Normalized image of one pure (or mixed) input.
pub fn image_point(map: &impl QubitMap, input: BlochVector) -> Result<Option<BlochPoint>> {
    let out = map.map_qubit(&density_from_bloch(input))?;
    let success = out.trace().re;
    if success < tol::MIN_SUCCESS {
        return Ok(None);
    }
    Ok(Some(BlochPoint {
        input,
        output: bloch_vector(&out.scale_real(1.0 / success)),
        success,
    }))
}

/// Normalized images of the Fibonacci lattice; vanishing-success points are dropped.
pub fn sampled_image(map: &impl QubitMap, n_samples: usize) -> Result<Vec<BlochPoint>> {
    if n_samples < 6 {
        return Err(Error::OutOfRange {
            name: "n_samples",
            value: n_samples as f64,
            range: ">= 6",
        });
    }
    let mut points = Vec::with_capacity(n_samples);
    for r in fibonacci_sphere(n_samples) {
        if let Some(p) = image_point(map, r)? {
            points.push(p);
        }
    }
    if points.is_empty() {
        return Err(Error::ZeroChannel);
    }
    Ok(points)
}

/// Normalized image of `I/2`.
pub fn image_center(map: &impl QubitMap) -> Result<BlochVector> {
    image_point(map, [0.0; 3])?
        .map(|p| p.output)
        .ok_or(Error::ZeroChannel)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiAxis {
    pub direction: BlochVector,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub center: BlochVector,
    /// Longest first.
    pub semi_axes: [SemiAxis; 3],
}

impl Ellipsoid {
    pub fn lengths(&self) -> [f64; 3] {
        self.semi_axes.each_ref().map(|a| a.length)
    }

    /// `Σ ((p − c)·e_k / l_k)²` over axes longer than `min_length`; out-of-plane
    /// offsets along shorter axes are ignored.
    pub fn radius_of(&self, p: BlochVector, min_length: f64) -> f64 {
        let d = sub(p, self.center);
        self.semi_axes
            .iter()
            .filter(|a| a.length > min_length)
            .map(|a| (dot(d, a.direction) / a.length).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidFit {
    pub ellipsoid: Ellipsoid,
    /// Linear map `L` of the model `output ≈ center + L·input`.
    pub linear: [[f64; 3]; 3],
    /// RMS and max distance between sampled points and the linear model.
    pub rms_residual: f64,
    pub max_residual: f64,
    /// Largest `radius_of` over the samples minus one: positive when points leave the ellipsoid.
    pub max_excess: f64,
}

/// Fits the normalized image around `center_hint`.
///
/// The unnormalized Bloch output `success·r_out` and the success probability
/// are both affine in the input, so each is regressed on `[1, r_in]`; the
/// semi-axes are the singular values and left singular vectors of
/// `L = (numerator slope)/(success at I/2)`. For trace-preserving maps this is
/// the ordinary least-squares slope.
pub fn fit_ellipsoid(points: &[BlochPoint], center_hint: BlochVector) -> Result<EllipsoidFit> {
    if points.len() < 9 {
        return Err(Error::OutOfRange {
            name: "points",
            value: points.len() as f64,
            range: ">= 9",
        });
    }
    let design = DMatrix::from_fn(points.len(), 4, |i, j| match j {
        0 => 1.0,
        _ => points[i].input[j - 1],
    });
    let rhs = DMatrix::from_fn(points.len(), 4, |i, j| match j {
        0 => points[i].success,
        _ => points[i].success * points[i].output[j - 1],
    });
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let s0 = coef[(0, 0)];
    if s0.abs() < tol::MIN_SUCCESS {
        return Err(Error::VanishingSuccess(s0));
    }
    let linear: [[f64; 3]; 3] =
        std::array::from_fn(|m| std::array::from_fn(|n| coef[(n + 1, m + 1)] / s0));

    let l = Matrix3::from_fn(|i, j| linear[i][j]);
    let eig = SymmetricEigen::new(l * l.transpose());
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let semi_axes = [0, 1, 2].map(|k| {
        let col: Vector3<f64> = eig.eigenvectors.column(order[k]).into();
        SemiAxis {
            direction: canonical_sign([col[0], col[1], col[2]]),
            length: eig.eigenvalues[order[k]].max(0.0).sqrt(),
        }
    });
    let ellipsoid = Ellipsoid {
        center: center_hint,
        semi_axes,
    };

    let model = AffineBlochMap {
        m: linear,
        t: center_hint,
    };
    let residuals: Vec<f64> = points
        .iter()
        .map(|p| norm(sub(p.output, model.apply(p.input))))
        .collect();
    let rms_residual =
        (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let longest = ellipsoid.semi_axes[0].length;
    let max_excess = if longest > 1e-9 {
        points
            .iter()
            .map(|p| ellipsoid.radius_of(p.output, 1e-6 * longest) - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    };
    Ok(EllipsoidFit {
        ellipsoid,
        linear,
        rms_residual,
        max_residual,
        max_excess,
    })
}

/// Input whose normalized output is closest to itself.
pub fn least_disturbed(points: &[BlochPoint]) -> Option<&BlochPoint> {
    points
        .iter()
        .max_by(|a, b| a.self_fidelity().total_cmp(&b.self_fidelity()))
}

/// Header `in_x,in_y,in_z,out_x,out_y,out_z,success`, six decimals.
pub fn points_csv(points: &[BlochPoint]) -> String {
    let mut out = String::from("in_x,in_y,in_z,out_x,out_y,out_z,success\n");
    for p in points {
        let vals = p
            .input
            .iter()
            .chain(&p.output)
            .chain(std::iter::once(&p.success));
        let row: Vec<String> = vals.map(|v| format!("{:.6}", v + 0.0)).collect();
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

/// Angle in radians between two Bloch directions.
pub fn bloch_angle(a: BlochVector, b: BlochVector) -> f64 {
    let c = dot(a, b) / (norm(a) * norm(b));
    c.clamp(-1.0, 1.0).acos()
}

fn canonical_sign(v: BlochVector) -> BlochVector {
    let lead = v.iter().copied().find(|x| x.abs() > 1e-9).unwrap_or(1.0);
    if lead < 0.0 {
        v.map(|x| -x + 0.0)
    } else {
        v
    }
}

fn dot(a: BlochVector, b: BlochVector) -> f64 {
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

fn sub(a: BlochVector, b: BlochVector) -> BlochVector {
    std::array::from_fn(|i| a[i] - b[i])
}

fn norm(a: BlochVector) -> f64 {
    dot(a, a).sqrt()
}
