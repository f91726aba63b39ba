use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superchan::blochgeo::{bloch_vector, fit_ellipsoid, sampled_image};
use superchan::channels::{
    depolarizing_coherent, depolarizing_incoherent, Branch, RandomUnitarySpec,
};
use superchan::cohinfo::{
    coherent_information, max_coherent_information, parse_grid, sweep, DensityMatrix,
    Implementation, Model,
};
use superchan::superpose::{
    mz_superpose, pairwise_operator_table, qutrit_extend, PathState, PostSelectedChannel,
};
use superchan::tomosim::{
    coherence_phase_error, run_tomography, true_qutrit_choi, Shots, SystematicsConfig,
};
use superchan::{CMatrix, C64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(
        elapsed < limit,
        format!("runtime {elapsed:.2?} exceeds {limit:?}"),
    )
}

fn post_selected(a: &RandomUnitarySpec, b: &RandomUnitarySpec) -> PostSelectedChannel {
    mz_superpose(a, b)
        .post_select(&PathState::plus(), &PathState::plus())
        .unwrap()
}

fn pair(implementation: Implementation, alpha: f64) -> (RandomUnitarySpec, RandomUnitarySpec) {
    (
        implementation.spec(alpha, Branch::A).unwrap(),
        implementation.spec(alpha, Branch::B).unwrap(),
    )
}

fn random_pure(rng: &mut ChaCha8Rng) -> CMatrix {
    let v: Vec<C64> = (0..2)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    CMatrix::projector(&[v[0] / n, v[1] / n])
}

fn probabilities(alpha: f64) -> [f64; 4] {
    [
        1.0 - 3.0 * alpha / 4.0,
        alpha / 4.0,
        alpha / 4.0,
        alpha / 4.0,
    ]
}

fn pauli_closed_forms() -> Outcome {
    let start = Instant::now();
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let sa = [one, one, i, one];
    let sb = [one, one, -i, one];
    let mut worst: f64 = 0.0;
    for k in 0..=10 {
        let alpha = k as f64 / 10.0;
        let p = probabilities(alpha);
        let (a, b) = pair(Implementation::Coherent, alpha);
        let f = post_selected(&a, &b).f_coefficients();
        let (ia, ib) = pair(Implementation::Incoherent, alpha);
        let g = post_selected(&ia, &ib).f_coefficients();
        for k in 0..4 {
            for l in 0..4 {
                let coh = if k == l {
                    C64::new(
                        p[k] / 2.0 + p[k] * p[k] / 2.0 * (sa[k] * sb[k].conj()).re,
                        0.0,
                    )
                } else {
                    (sa[k] * sb[l].conj() + sb[k] * sa[l].conj()) * (p[k] * p[l] / 4.0)
                };
                let inc = if k == l { p[k] / 2.0 } else { 0.0 };
                worst = worst
                    .max((f.get(k, l) - coh).norm())
                    .max((g.get(k, l) - C64::new(inc, 0.0)).norm());
            }
        }
    }
    ensure(worst < 1e-12, format!("max deviation {worst:.3e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("max deviation {worst:.1e} over 11 alphas"))
}

fn incoherent_post_selection() -> Outcome {
    let start = Instant::now();
    let (a, b) = pair(Implementation::Incoherent, 1.0);
    let ps = post_selected(&a, &b);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut dev, mut radius): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let rho = random_pure(&mut rng);
        let out = ps.apply(&rho).unwrap();
        let s = out.trace().re;
        dev = dev.max((s - 0.5).abs());
        let r = bloch_vector(&out.scale_real(1.0 / s));
        radius = radius.max(r.iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    ensure(dev < 1e-9, format!("success deviation {dev:.3e}"))?;
    ensure(radius < 1e-9, format!("image radius {radius:.3e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "success deviation {dev:.1e}, image radius {radius:.1e}"
    ))
}

fn disc_geometry() -> Outcome {
    let start = Instant::now();
    let (a, b) = pair(Implementation::Coherent, 1.0);
    let ps = post_selected(&a, &b);
    let pts = sampled_image(&ps, 200).unwrap();
    let fit = fit_ellipsoid(&pts, [1.0 / 9.0, 0.0, 1.0 / 9.0]).unwrap();
    let c = fit.ellipsoid.center;
    let dc = ((c[0] - 1.0 / 9.0).powi(2) + c[1].powi(2) + (c[2] - 1.0 / 9.0).powi(2)).sqrt();
    let [l0, l1, l2] = fit.ellipsoid.lengths();
    let d = fit.ellipsoid.semi_axes[0].direction;
    let along = ((d[0] + d[2]) / 2f64.sqrt()).abs();
    ensure(dc < 1e-6, format!("center {c:?}"))?;
    ensure(
        (l0 - 2.0 / 9.0).abs() < 1e-4 && (l1 - 1.0 / 9.0).abs() < 1e-4 && l2 < 1e-6,
        format!("semi-axes {l0}, {l1}, {l2}"),
    )?;
    ensure(along > 1.0 - 1e-6, format!("longest axis {d:?}"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "center ({:.6}, {:.6}, {:.6}), semi-axes {l0:.6}, {l1:.6}, {l2:.1e}",
        c[0], c[1], c[2]
    ))
}

fn operator_table() -> Outcome {
    let (a, b) = pair(Implementation::Coherent, 1.0);
    let table = pairwise_operator_table(&a, &b);
    ensure(table.len() == 16, "table size")?;
    let s = 0.5f64.sqrt();
    let r = |rows: [[f64; 2]; 2]| CMatrix::from_real_rows(&rows);
    let id = r([[1.0, 0.0], [0.0, 1.0]]);
    let x = r([[0.0, 1.0], [1.0, 0.0]]);
    let z = r([[1.0, 0.0], [0.0, -1.0]]);
    let h = r([[s, s], [s, -s]]);
    let plus = r([[0.5, 0.5], [0.5, 0.5]]);
    let minus = r([[0.5, -0.5], [-0.5, 0.5]]);
    let p0 = r([[1.0, 0.0], [0.0, 0.0]]);
    let p1 = r([[0.0, 0.0], [0.0, 1.0]]);
    let rt2 = 2f64.sqrt();
    // (arm a unitary, arm b unitary, tabulated operator, multiplicity of the tabulated entry)
    let expected: Vec<(usize, usize, CMatrix, f64)> = vec![
        (0, 0, id.scale_real(2.0), 1.0),
        (1, 0, plus.clone(), 2.0),
        (3, 0, p0.clone(), 2.0),
        (2, 0, &h * &x, rt2),
        (0, 1, plus.clone(), 2.0),
        (1, 1, x.scale_real(2.0), 1.0),
        (3, 1, h.clone(), rt2),
        (2, 1, &x * &p1, 2.0),
        (0, 3, p0.clone(), 2.0),
        (1, 3, h.clone(), rt2),
        (3, 3, z.scale_real(2.0), 1.0),
        (2, 3, &z * &plus, 2.0),
        (0, 2, &x * &h, rt2),
        (1, 2, &x * &p0, 2.0),
        (3, 2, &z * &minus, 2.0),
        (2, 2, CMatrix::zeros(2, 2), 1.0),
    ];
    let mut worst: f64 = 0.0;
    for (i, j, m, k) in expected {
        let e = table
            .iter()
            .find(|e| e.i == i && e.j == j)
            .ok_or("missing entry")?;
        worst = worst.max(e.operator.max_abs_diff(&m.scale_real(k)));
    }
    ensure(worst < 1e-12, format!("max deviation {worst:.3e}"))?;
    Ok(format!("16 entries, max deviation {worst:.1e}"))
}

fn h4(p: [f64; 4]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

fn depolarizing_oracle() -> Outcome {
    let start = Instant::now();
    let grid = parse_grid("0:1:0.05").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for &alpha in &grid {
        let ch = depolarizing_coherent(alpha, Branch::A).unwrap().to_kraus();
        let max = max_coherent_information(&ch).unwrap();
        let analytic = 1.0 - h4(probabilities(alpha));
        let at_mixed = coherent_information(&ch, &DensityMatrix::maximally_mixed(2)).unwrap();
        ensure(
            (at_mixed - analytic).abs() < 1e-10,
            format!("Ic(I/2) {at_mixed} vs {analytic} at {alpha}"),
        )?;
        for _ in 0..20 {
            let probe = DensityMatrix::new(random_pure(&mut rng)).unwrap();
            let v = coherent_information(&ch, &probe).unwrap();
            ensure(
                max.value >= v - 1e-9,
                format!("pure probe {v} beats {} at {alpha}", max.value),
            )?;
        }
        ensure(
            max.value >= at_mixed - 1e-9,
            format!("I/2 beats optimizer at {alpha}"),
        )?;
        worst = worst.max((max.value - analytic.max(0.0)).abs());
    }
    ensure(worst < 1e-4, format!("max deviation {worst:.3e}"))?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("21 alphas, max deviation {worst:.1e}"))
}

fn hierarchy() -> Outcome {
    let start = Instant::now();
    let grid = parse_grid("0:1:0.05").unwrap();
    let result = sweep(&grid, Implementation::Coherent).unwrap();
    let v = |m: Model| result.values(m).unwrap();
    let (q, ps, mz, t0, bound) = (
        v(Model::Qubit),
        v(Model::PostSelected),
        v(Model::MachZehnder),
        v(Model::QutritT0),
        v(Model::TwoQutritBound),
    );
    let tol = 1e-4;
    let mut min_gain = f64::INFINITY;
    for (k, &alpha) in grid.iter().enumerate() {
        if alpha > 0.0 && alpha <= 0.35 + 1e-9 {
            ensure(
                ps[k] > q[k],
                format!("post-selected {} <= qubit {} at {alpha}", ps[k], q[k]),
            )?;
            min_gain = min_gain.min(ps[k] - q[k]);
        }
        ensure(
            bound[k] >= mz[k] - tol,
            format!("bound {} < MZ {} at {alpha}", bound[k], mz[k]),
        )?;
        ensure(
            mz[k] >= q[k] - tol,
            format!("MZ {} < qubit {} at {alpha}", mz[k], q[k]),
        )?;
        ensure(
            t0[k] >= q[k] - tol,
            format!("T0 {} < qubit {} at {alpha}", t0[k], q[k]),
        )?;
    }
    let unconverged = result
        .curves
        .iter()
        .flat_map(|c| c.points.iter())
        .filter(|p| !p.converged)
        .count();
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!(
        "post-selection gain >= {min_gain:.4} on (0, 0.35], hierarchy holds on 21 points, {unconverged} unconverged, {:.1?}",
        start.elapsed()
    ))
}

fn qutrit_structure() -> Outcome {
    let start = Instant::now();
    let (zero_zero, h_v, v_h) = (0, 5, 7);
    let choi = |spec: &RandomUnitarySpec| qutrit_extend(spec).to_channel().choi().unwrap();
    let ja = choi(&depolarizing_coherent(1.0, Branch::A).unwrap());
    let jb = choi(&depolarizing_coherent(1.0, Branch::B).unwrap());
    let (a_on, a_off) = (
        ja.matrix()[(zero_zero, v_h)].norm(),
        ja.matrix()[(zero_zero, h_v)].norm(),
    );
    let (b_on, b_off) = (
        jb.matrix()[(zero_zero, h_v)].norm(),
        jb.matrix()[(zero_zero, v_h)].norm(),
    );
    ensure(
        a_on > 1e-3 && a_off < 1e-12,
        format!("branch a: {a_on}, {a_off}"),
    )?;
    ensure(
        b_on > 1e-3 && b_off < 1e-12,
        format!("branch b: {b_on}, {b_off}"),
    )?;
    let mut diag: f64 = 0.0;
    for branch in [Branch::A, Branch::B] {
        diag = diag.max(choi(&depolarizing_incoherent(1.0, branch).unwrap()).max_offdiagonal());
    }
    ensure(diag < 1e-12, format!("incoherent off-diagonal {diag:.3e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("|J(00,VH)| = {a_on:.4} (a), |J(00,HV)| = {b_on:.4} (b), incoherent off-diagonal {diag:.1e}"))
}

fn tomography_loop() -> Outcome {
    let start = Instant::now();
    let spec = depolarizing_coherent(1.0, Branch::A).unwrap();
    let truth = true_qutrit_choi(&spec).unwrap();
    let exact = run_tomography(&spec, Shots::Exact, &SystematicsConfig::none())
        .unwrap()
        .result;
    let exact_f = exact.fidelity.unwrap();
    ensure(exact_f >= 1.0 - 1e-8, format!("exact fidelity {exact_f}"))?;
    let shots = Shots::Finite(1_000_000);
    let (mut clean_min, mut errors) = (f64::INFINITY, Vec::new());
    for seed in 0..10 {
        let clean_cfg = SystematicsConfig {
            seed,
            ..SystematicsConfig::none()
        };
        let noisy_cfg = SystematicsConfig {
            seed,
            ..SystematicsConfig::default()
        };
        let clean = run_tomography(&spec, shots, &clean_cfg).unwrap().result;
        let noisy = run_tomography(&spec, shots, &noisy_cfg).unwrap().result;
        let (fc, fn_) = (clean.fidelity.unwrap(), noisy.fidelity.unwrap());
        ensure(fc >= 0.99, format!("clean fidelity {fc} at seed {seed}"))?;
        ensure(
            fn_ < fc,
            format!("systematics did not lower fidelity at seed {seed}"),
        )?;
        clean_min = clean_min.min(fc);
        errors.push(coherence_phase_error(&noisy.choi, &truth, Branch::A));
    }
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    let lo = errors.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = errors.iter().copied().fold(0.0, f64::max);
    ensure(
        (0.1..=0.8).contains(&mean),
        format!("mean phase error {mean:.3} rad"),
    )?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "clean fidelity >= {clean_min:.4}, exact 1 - {:.1e}, phase error mean {mean:.3} rad (per seed {lo:.3} to {hi:.3})",
        1.0 - exact_f
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("Pauli closed forms", pauli_closed_forms),
        ("incoherent post-selection", incoherent_post_selection),
        ("post-selected disc geometry", disc_geometry),
        ("pairwise operator table", operator_table),
        (
            "depolarizing coherent-information oracle",
            depolarizing_oracle,
        ),
        ("channel hierarchy", hierarchy),
        ("qutrit dual-state structure", qutrit_structure),
        ("tomography closed loop", tomography_loop),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", n + 1);
            }
        }
    }
    println!(
        "criterion 9: NOTE  experimental data points are not reproduced; theory curves and simulated systematics stand in for them"
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
