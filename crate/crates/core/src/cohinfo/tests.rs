use super::*;
use crate::channels::{
    depolarizing_coherent, depolarizing_incoherent, pauli, Branch, RandomUnitarySpec,
};
use crate::numerics::I;
use crate::superpose::{mz_superpose, qutrit_extend, restrict_qutrit_to_qubit, PathState};
use proptest::prelude::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_state(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> DensityMatrix {
    let data: Vec<C64> = (0..rank * d)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    DensityMatrix::from_factor(&CMatrix::from_vec(rank, d, data).unwrap()).unwrap()
}

fn h2(p: f64) -> f64 {
    spectrum_entropy(&[p, 1.0 - p])
}

/// Coherent information of the depolarizing channel at `diag(λ, 1 − λ)`, from
/// the 2x2 blocks `{σ0, σ3}` and `{σ1, σ2}` of the complementary output.
fn depolarizing_ic_diag(alpha: f64, lambda: f64) -> f64 {
    let p = [1.0 - 0.75 * alpha, alpha / 4.0, alpha / 4.0, alpha / 4.0];
    let z = 2.0 * lambda - 1.0;
    let block = |a: f64, b: f64, off: f64| {
        let mean = (a + b) / 2.0;
        let r = (((a - b) / 2.0).powi(2) + off * off).sqrt();
        [mean + r, mean - r]
    };
    let b1 = block(p[0], p[3], (p[0] * p[3]).sqrt() * z);
    let b2 = block(p[1], p[2], (p[1] * p[2]).sqrt() * z);
    let out = h2((1.0 + (1.0 - alpha) * z) / 2.0);
    out - spectrum_entropy(&[b1[0], b1[1], b2[0], b2[1]])
}

fn depolarizing_oracle(alpha: f64) -> f64 {
    (0..=5000)
        .map(|k| depolarizing_ic_diag(alpha, 0.5 + 0.5 * k as f64 / 5000.0))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn fully_depolarizing() -> KrausChannel {
    depolarizing_coherent(1.0, Branch::A).unwrap().to_kraus()
}

#[test]
fn entropy_examples() {
    assert!(entropy(&DensityMatrix::pure(&[C64::new(1.0, 0.0), I]).unwrap()).abs() < 1e-12);
    assert!((entropy(&DensityMatrix::maximally_mixed(2)) - 1.0).abs() < 1e-12);
    let rho = DensityMatrix::new(CMatrix::from_real_diag(&[0.75, 0.25])).unwrap();
    assert!((entropy(&rho) - 0.811278).abs() < 1e-6);
    assert!((entropy(&DensityMatrix::maximally_mixed(9)) - 9f64.log2()).abs() < 1e-12);
}

#[test]
fn entropy_is_concave() {
    let mut r = rng(1);
    for i in 0..50 {
        let d = 2 + i % 3;
        let a = random_state(&mut r, d, 1 + i % d);
        let b = random_state(&mut r, d, d);
        let mix = DensityMatrix::new((a.matrix() + b.matrix()).scale_real(0.5)).unwrap();
        assert!(entropy(&mix) >= 0.5 * entropy(&a) + 0.5 * entropy(&b) - 1e-9);
    }
}

#[test]
fn density_matrix_validation() {
    assert!(matches!(
        DensityMatrix::new(CMatrix::from_real_diag(&[0.5, 0.4])),
        Err(Error::NotNormalized(_))
    ));
    assert!(matches!(
        DensityMatrix::new(CMatrix::from_real_diag(&[1.5, -0.5])),
        Err(Error::NotPositive(_))
    ));
    assert!(matches!(
        DensityMatrix::new(CMatrix::from_real_rows(&[[0.5, 0.1], [0.0, 0.5]])),
        Err(Error::NotHermitian(_))
    ));
    let json = serde_json::to_string(&DensityMatrix::maximally_mixed(2)).unwrap();
    let back: DensityMatrix = serde_json::from_str(&json).unwrap();
    assert_eq!(back, DensityMatrix::maximally_mixed(2));
    let bad = json.replace("0.5", "0.7");
    assert!(serde_json::from_str::<DensityMatrix>(&bad).is_err());
}

#[test]
fn coherent_information_examples() {
    let id = KrausChannel::identity(2);
    let mixed = DensityMatrix::maximally_mixed(2);
    assert!((coherent_information(&id, &mixed).unwrap() - 1.0).abs() < 1e-9);
    let dep = fully_depolarizing();
    assert!((coherent_information(&dep, &mixed).unwrap() + 1.0).abs() < 1e-9);
    let mut r = rng(4);
    for _ in 0..10 {
        let pure = random_state(&mut r, 2, 1);
        assert!(coherent_information(&dep, &pure).unwrap().abs() < 1e-9);
    }
    assert!(coherent_information(&id, &DensityMatrix::maximally_mixed(3)).is_err());
}

#[test]
fn vanishing_success_is_an_error() {
    let proj = KrausChannel::new(vec![CMatrix::from_real_diag(&[1.0, 0.0])], false).unwrap();
    let one = DensityMatrix::pure(&[ZERO, C64::new(1.0, 0.0)]).unwrap();
    assert!(matches!(
        coherent_information(&proj, &one),
        Err(Error::VanishingSuccess(_))
    ));
    let obj = IcObjective::new(&proj).unwrap();
    assert!(matches!(
        obj.evaluate(one.matrix()),
        Err(Error::VanishingSuccess(_))
    ));
}

#[test]
fn fast_evaluator_matches_purification() {
    let mut r = rng(9);
    let spec_a = depolarizing_coherent(0.6, Branch::A).unwrap();
    let spec_b = depolarizing_coherent(0.6, Branch::B).unwrap();
    let mz = mz_superpose(&spec_a, &spec_b);
    let channels = [
        spec_a.to_kraus(),
        mz.post_select(&PathState::plus(), &PathState::plus())
            .unwrap()
            .to_channel()
            .unwrap(),
        mz.to_channel().unwrap(),
        qutrit_extend(&depolarizing_incoherent(0.3, Branch::B).unwrap()).to_channel(),
    ];
    for ch in &channels {
        let obj = IcObjective::new(ch).unwrap();
        for rank in 1..=ch.dim_in() {
            let rho = random_state(&mut r, ch.dim_in(), rank);
            let slow = coherent_information(ch, &rho).unwrap();
            let fast = obj.evaluate(rho.matrix()).unwrap();
            assert!((slow - fast).abs() < 1e-9, "{slow} vs {fast}");
            let success = ch.apply(rho.matrix()).unwrap().trace().re;
            assert!((obj.success_probability(rho.matrix()) - success).abs() < 1e-12);
        }
    }
}

#[test]
fn cholesky_parameters_round_trip() {
    let mut r = rng(21);
    for d in 2..=4 {
        for rank in 1..=d {
            let rho = random_state(&mut r, d, rank);
            let x = params_from_state(rho.matrix());
            assert_eq!(x.len(), d * d);
            let back = DensityMatrix::from_factor(&factor_from_params(&x, d)).unwrap();
            assert!(back.matrix().approx_eq(rho.matrix(), 1e-9));
        }
    }
    let one = DensityMatrix::pure(&[ZERO, ZERO, C64::new(1.0, 0.0)]).unwrap();
    let back = DensityMatrix::from_factor(&factor_from_params(&params_from_state(one.matrix()), 3))
        .unwrap();
    assert!(back.matrix().approx_eq(one.matrix(), 1e-12));
}

#[test]
fn starts_and_probes() {
    let starts = default_starts(2, 8);
    assert_eq!(starts.len(), 8);
    assert_eq!(starts[0], DensityMatrix::maximally_mixed(2));
    // the Hadamard eigenstates
    let h = (&pauli(1) + &pauli(3)).scale_real(0.5f64.sqrt());
    for s in &starts[3..5] {
        let hv = (&h * s.matrix()).trace().re;
        assert!((hv.abs() - 1.0).abs() < 1e-12);
    }
    assert_eq!(default_starts(4, 8).len(), 8);
    let p1 = probe_states(3, 20, 7);
    let p2 = probe_states(3, 20, 7);
    assert_eq!(p1.len(), 20);
    assert_eq!(p1, p2);
    assert!(p1.iter().all(|p| p.dim() == 3));
}

#[test]
fn identity_maximum() {
    let m = max_coherent_information(&KrausChannel::identity(2)).unwrap();
    assert!((m.value - 1.0).abs() < 1e-8);
    assert!(m
        .argmax
        .matrix()
        .approx_eq(&CMatrix::identity(2).scale_real(0.5), 1e-3));
    let m = max_coherent_information(&KrausChannel::identity(3)).unwrap();
    assert!((m.value - 3f64.log2()).abs() < 1e-8);
}

#[test]
fn depolarizing_maximum_matches_oracle() {
    for step in 0..=10 {
        let alpha = step as f64 / 10.0;
        let oracle = depolarizing_oracle(alpha);
        let closed =
            1.0 - spectrum_entropy(&[1.0 - 0.75 * alpha, alpha / 4.0, alpha / 4.0, alpha / 4.0]);
        assert!((depolarizing_ic_diag(alpha, 0.5) - closed).abs() < 1e-12);
        assert!((oracle - closed.max(0.0)).abs() < 1e-9);

        let ch = depolarizing_coherent(alpha, Branch::A).unwrap().to_kraus();
        let m = max_coherent_information(&ch).unwrap();
        assert!(
            (m.value - oracle).abs() < 1e-6,
            "alpha {alpha}: {} vs {oracle}",
            m.value
        );
        assert!(m.value >= m.baseline - 1e-12);
    }
    let m = max_coherent_information(&fully_depolarizing()).unwrap();
    assert!(m.value.abs() < 1e-6);
    assert!(entropy(&m.argmax) < 1e-2);
}

#[test]
fn maximum_beats_probes_on_general_channels() {
    let spec_a = depolarizing_coherent(0.4, Branch::A).unwrap();
    let spec_b = depolarizing_coherent(0.4, Branch::B).unwrap();
    let ps = mz_superpose(&spec_a, &spec_b)
        .post_select(&PathState::plus(), &PathState::plus())
        .unwrap()
        .to_channel()
        .unwrap();
    let amp = KrausChannel::new(
        vec![
            CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 0.8]]),
            CMatrix::from_real_rows(&[[0.0, 0.6], [0.0, 0.0]]),
        ],
        true,
    )
    .unwrap();
    for ch in [ps, amp] {
        let m = max_coherent_information(&ch).unwrap();
        let direct = coherent_information(&ch, &m.argmax).unwrap();
        assert!((direct - m.value).abs() < 1e-9);
        assert!(
            m.value
                >= coherent_information(&ch, &DensityMatrix::maximally_mixed(2)).unwrap() - 1e-6
        );
        for p in probe_states(2, 20, OptimizerOptions::default().seed) {
            assert!(m.value >= coherent_information(&ch, &p).unwrap() - 1e-6);
        }
    }
}

#[test]
fn restriction_never_increases_coherent_information() {
    for alpha in [0.2, 0.7] {
        for spec in [
            depolarizing_coherent(alpha, Branch::A).unwrap(),
            depolarizing_incoherent(alpha, Branch::B).unwrap(),
        ] {
            let q = qutrit_extend(&spec);
            let small = max_coherent_information(&restrict_qutrit_to_qubit(&q).unwrap()).unwrap();
            let big = max_coherent_information(&q.to_channel()).unwrap();
            assert!(
                small.value <= big.value + 1e-6,
                "{} > {}",
                small.value,
                big.value
            );
        }
    }
}

#[test]
fn two_qutrit_bound_examples() {
    let id_a = qutrit_extend(&RandomUnitarySpec::identity(Branch::A));
    let id_b = qutrit_extend(&RandomUnitarySpec::identity(Branch::B));
    assert!((two_qutrit_bound(&id_a, &id_b).unwrap() - 2.0 * 3f64.log2()).abs() < 1e-7);

    let coh = two_qutrit_bound(
        &qutrit_extend(&depolarizing_coherent(1.0, Branch::A).unwrap()),
        &qutrit_extend(&depolarizing_coherent(1.0, Branch::B).unwrap()),
    )
    .unwrap();
    assert!(coh > 1e-3, "{coh}");
    let inc = two_qutrit_bound(
        &qutrit_extend(&depolarizing_incoherent(1.0, Branch::A).unwrap()),
        &qutrit_extend(&depolarizing_incoherent(1.0, Branch::B).unwrap()),
    )
    .unwrap();
    assert!(inc >= -1e-9);
}

#[test]
fn grid_parsing() {
    let g = parse_grid("0:1:0.05").unwrap();
    assert_eq!(g.len(), 21);
    assert_eq!(g[0], 0.0);
    assert_eq!(g[20], 1.0);
    assert_eq!(g[7], 0.35);
    assert_eq!(parse_grid("0.1, 0.5,1").unwrap(), vec![0.1, 0.5, 1.0]);
    assert!(parse_grid("0:2:0.5").is_err());
    assert!(parse_grid("0.5,0.1").is_err());
    assert!(parse_grid("0:1").is_err());
    assert!(parse_grid("0:1:0").is_err());
    assert!(parse_grid("a,b").is_err());
    assert!("coherent".parse::<Implementation>().is_ok());
    assert!("bogus".parse::<Implementation>().is_err());
}

#[test]
fn sweep_at_zero_noise() {
    let r = sweep(&[0.0], Implementation::Coherent).unwrap();
    assert_eq!(r.curves.len(), 5);
    for m in Model::ALL {
        assert!(r.values(m).unwrap()[0] >= 1.0 - 1e-7, "{m}");
    }
    assert!((r.values(Model::MachZehnder).unwrap()[0] - 2.0).abs() < 1e-7);
    assert!((r.values(Model::TwoQutritBound).unwrap()[0] - 2.0 * 3f64.log2()).abs() < 1e-7);
    let ps = &r.curve(Model::PostSelected).unwrap().points[0];
    assert!((ps.success_probability.unwrap() - 1.0).abs() < 1e-9);

    let csv = sweep_csv(&r);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,model,ic_bits,success_probability,converged"
    );
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.contains("0.000000,post_selected,1.000000,1.000000,"));
}

#[test]
fn incoherent_post_selection_success_is_half() {
    let r = sweep(&[0.5], Implementation::Incoherent).unwrap();
    let ps = &r.curve(Model::PostSelected).unwrap().points[0];
    assert!((ps.success_probability.unwrap() - 0.5).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn objective_is_unitarily_invariant_for_identity(seed in 0u64..1000) {
        let mut r = rng(seed);
        let rho = random_state(&mut r, 3, 3);
        let obj = IcObjective::new(&KrausChannel::identity(3)).unwrap();
        let v = obj.evaluate(rho.matrix()).unwrap();
        prop_assert!((v - entropy(&rho)).abs() < 1e-9);
    }
}
