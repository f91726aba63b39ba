use super::{pauli, Branch, RandomUnitarySpec, SpecEntry};
use crate::error::{Error, Result};
use crate::numerics::{C64, I, ONE};

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `p_0 = 1 − 3α/4`, `p_{1,2,3} = α/4`.
pub fn pauli_probabilities(alpha: f64) -> [f64; 4] {
    let q = alpha / 4.0;
    [1.0 - 3.0 * q, q, q, q]
}

/// Phase-coherent phases: `s_2 = +i` in branch a, `−i` in branch b, all others 1.
pub fn coherent_phases(branch: Branch) -> [C64; 4] {
    let s2 = match branch {
        Branch::A => I,
        Branch::B => -I,
    };
    [ONE, ONE, s2, ONE]
}

/// Depolarizing channel of degree `alpha` as four phased Paulis.
pub fn depolarizing_coherent(alpha: f64, branch: Branch) -> Result<RandomUnitarySpec> {
    check_alpha(alpha)?;
    let p = pauli_probabilities(alpha);
    let s = coherent_phases(branch);
    let entries = (0..4)
        .map(|k| SpecEntry {
            probability: p[k],
            phase: s[k],
            unitary: pauli(k),
        })
        .collect();
    RandomUnitarySpec::new(branch, entries)
}

/// Phase-randomized implementation: the branch-a coherent operators plus copies
/// carrying an extra π phase, each at half the probability. Both arms draw from
/// this same eight-element set.
pub fn depolarizing_incoherent(alpha: f64, branch: Branch) -> Result<RandomUnitarySpec> {
    check_alpha(alpha)?;
    let p = pauli_probabilities(alpha);
    let s = coherent_phases(Branch::A);
    let entries = [ONE, -ONE]
        .into_iter()
        .flat_map(|sign| {
            (0..4).map(move |k| SpecEntry {
                probability: p[k] / 2.0,
                phase: s[k] * sign,
                unitary: pauli(k),
            })
        })
        .collect();
    RandomUnitarySpec::new(branch, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::tests::basis_states;
    use crate::numerics::{CMatrix, ZERO};

    #[test]
    fn coherent_alpha_zero_is_identity() {
        let spec = depolarizing_coherent(0.0, Branch::A).unwrap();
        let eff: Vec<_> = spec.effective_entries().collect();
        assert_eq!(eff.len(), 1);
        assert_eq!(eff[0].1.probability, 1.0);
        assert_eq!(eff[0].1.unitary, CMatrix::identity(2));
    }

    #[test]
    fn coherent_alpha_one_branch_a() {
        let spec = depolarizing_coherent(1.0, Branch::A).unwrap();
        let p: Vec<f64> = spec.entries().iter().map(|e| e.probability).collect();
        assert_eq!(p, vec![0.25; 4]);
        let s: Vec<C64> = spec.entries().iter().map(|e| e.phase).collect();
        assert_eq!(s, vec![ONE, ONE, I, ONE]);
        let b = depolarizing_coherent(1.0, Branch::B).unwrap();
        assert_eq!(b.entries()[2].phase, -I);
    }

    #[test]
    fn coherent_two_thirds() {
        let spec = depolarizing_coherent(2.0 / 3.0, Branch::B).unwrap();
        assert!((spec.entries()[0].probability - 0.5).abs() < 1e-15);
        for e in &spec.entries()[1..] {
            assert!((e.probability - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_out_of_range() {
        assert!(depolarizing_coherent(1.2, Branch::A).is_err());
        assert!(depolarizing_incoherent(-0.1, Branch::A).is_err());
    }

    #[test]
    fn incoherent_structure() {
        let spec = depolarizing_incoherent(1.0, Branch::A).unwrap();
        assert_eq!(spec.entries().len(), 8);
        assert!(spec.entries().iter().all(|e| e.probability == 0.125));

        let zero = depolarizing_incoherent(0.0, Branch::A).unwrap();
        let eff: Vec<_> = zero
            .effective_entries()
            .map(|(_, e)| e.phased_unitary())
            .collect();
        assert_eq!(eff.len(), 2);
        assert_eq!(eff[0], CMatrix::identity(2));
        assert_eq!(eff[1], CMatrix::identity(2).scale(-ONE));
    }

    #[test]
    fn to_kraus_phases() {
        let ch = depolarizing_coherent(1.0, Branch::A).unwrap().to_kraus();
        assert!(ch.kraus()[2].approx_eq(&pauli(2).scale(I * 0.5), 1e-15));
        let inc = depolarizing_incoherent(1.0, Branch::A).unwrap().to_kraus();
        assert!(inc.completeness().approx_eq(&CMatrix::identity(2), 1e-15));
    }

    #[test]
    fn depolarizing_action() {
        let zero = CMatrix::from_real_diag(&[1.0, 0.0]);
        let full = depolarizing_coherent(1.0, Branch::A).unwrap().to_kraus();
        let s = 0.5f64.sqrt();
        let plus = CMatrix::projector(&[C64::new(s, 0.0), C64::new(0.0, s)]);
        for rho in [&zero, &plus] {
            assert!(full
                .apply(rho)
                .unwrap()
                .approx_eq(&CMatrix::identity(2).scale_real(0.5), 1e-15));
        }
        let none = depolarizing_coherent(0.0, Branch::A).unwrap().to_kraus();
        assert!(none.apply(&plus).unwrap().approx_eq(&plus, 1e-15));
        // α = 1/2: σ0 at 5/8 keeps |0>, σ3 at 1/8 keeps |0>, σ1 and σ2 flip: diag(3/4, 1/4)
        let half = depolarizing_coherent(0.5, Branch::A).unwrap().to_kraus();
        assert!(half
            .apply(&zero)
            .unwrap()
            .approx_eq(&CMatrix::from_real_diag(&[0.75, 0.25]), 1e-15));
    }

    #[test]
    fn pauli_coefficients_are_diagonal() {
        for alpha in [0.0, 0.3, 0.75, 1.0] {
            let d = depolarizing_coherent(alpha, Branch::A)
                .unwrap()
                .to_kraus()
                .pauli_decompose()
                .unwrap();
            let expected = CMatrix::from_real_diag(&pauli_probabilities(alpha));
            assert!(d.matrix().approx_eq(&expected, 1e-15));
        }
    }

    #[test]
    fn incoherent_equals_coherent_as_qubit_map() {
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            let coh = depolarizing_coherent(alpha, Branch::A).unwrap().to_kraus();
            let inc = depolarizing_incoherent(alpha, Branch::A)
                .unwrap()
                .to_kraus();
            let dc = coh.pauli_decompose().unwrap();
            let di = inc.pauli_decompose().unwrap();
            assert!(dc.matrix().approx_eq(di.matrix(), 1e-15));
            assert!(coh.distance(&inc) < 1e-15);
        }
    }

    #[test]
    fn global_phase_covariance() {
        let spec = depolarizing_coherent(0.6, Branch::B).unwrap();
        let rotated = spec.with_global_phase(C64::from_polar(1.0, 1.234));
        for rho in basis_states() {
            let a = spec.to_kraus().apply(&rho).unwrap();
            let b = rotated.to_kraus().apply(&rho).unwrap();
            assert!(a.approx_eq(&b, 1e-12));
        }
    }

    #[test]
    fn fully_depolarizing_choi() {
        let j = depolarizing_coherent(1.0, Branch::A)
            .unwrap()
            .to_kraus()
            .choi()
            .unwrap();
        assert!(j
            .matrix()
            .approx_eq(&CMatrix::identity(4).scale_real(0.25), 1e-15));
        assert_eq!(j.matrix()[(0, 1)], ZERO);
    }
}
