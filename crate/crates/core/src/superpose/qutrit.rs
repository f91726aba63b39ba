use crate::channels::{Branch, KrausChannel, RandomUnitarySpec};
use crate::error::{Error, Result};
use crate::numerics::{tensor, tol, CMatrix, ONE};

/// Level names of the vacuum-extended qutrit, in basis order.
pub const QUTRIT_LEVELS: [&str; 3] = ["0", "H", "V"];

const VACUUM: usize = 0;
const PHOTON: [usize; 2] = [1, 2];

/// Channel on `{|0⟩, |H⟩, |V⟩}` for one interferometer arm.
#[derive(Clone, Debug)]
pub struct QutritChannel {
    branch: Branch,
    kraus: Vec<CMatrix>,
}

/// Each unitary becomes `|0⟩⟨0| ⊕ s_i U_i`, so the phase `s_i` is now relative
/// to the vacuum amplitude and no longer global.
pub fn qutrit_extend(spec: &RandomUnitarySpec) -> QutritChannel {
    let vacuum = CMatrix::from_diag(&[ONE]);
    let kraus = spec
        .effective_entries()
        .map(|(_, e)| {
            vacuum
                .direct_sum(&e.phased_unitary())
                .scale_real(e.probability.sqrt())
        })
        .collect();
    QutritChannel {
        branch: spec.branch(),
        kraus,
    }
}

impl QutritChannel {
    /// Arbitrary trace-preserving qutrit channel.
    pub fn from_kraus(branch: Branch, kraus: Vec<CMatrix>) -> Result<Self> {
        let ch = KrausChannel::new(kraus, true)?;
        if ch.dim_in() != 3 || ch.dim_out() != 3 {
            return Err(Error::DimensionMismatch(format!(
                "qutrit channel with {}x{} Kraus operators",
                ch.dim_out(),
                ch.dim_in()
            )));
        }
        Ok(Self {
            branch,
            kraus: ch.kraus().to_vec(),
        })
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn to_channel(&self) -> KrausChannel {
        KrausChannel::new(self.kraus.clone(), true).expect("validated on construction")
    }

    /// No Kraus operator moves amplitude between the vacuum and the photon levels.
    pub fn is_photon_number_preserving(&self) -> bool {
        self.kraus.iter().all(|k| {
            PHOTON.iter().all(|&p| {
                k[(VACUUM, p)].norm() <= tol::EIGEN_CLIP && k[(p, VACUUM)].norm() <= tol::EIGEN_CLIP
            })
        })
    }

    /// The polarization block of each Kraus operator.
    pub fn restrict_to_qubit(&self) -> Result<KrausChannel> {
        if !self.is_photon_number_preserving() {
            return Err(Error::NotPhotonNumberPreserving);
        }
        let kraus = self
            .kraus
            .iter()
            .map(|k| k.select(&PHOTON, &PHOTON))
            .collect();
        KrausChannel::new(kraus, true)
    }
}

/// Product channel of the two arms, qutrit `a` first.
#[derive(Clone, Debug)]
pub struct TwoQutritChannel {
    factors: (QutritChannel, QutritChannel),
    kraus: Vec<CMatrix>,
}

/// All pairwise tensor products of the two Kraus sets.
pub fn two_qutrit(ch_a: &QutritChannel, ch_b: &QutritChannel) -> TwoQutritChannel {
    let kraus = ch_a
        .kraus
        .iter()
        .flat_map(|ka| ch_b.kraus.iter().map(move |kb| tensor(ka, kb)))
        .collect();
    TwoQutritChannel {
        factors: (ch_a.clone(), ch_b.clone()),
        kraus,
    }
}

/// Indices of `|H0⟩, |V0⟩, |0H⟩, |0V⟩` in the two-qutrit basis, matching the
/// controlled channel's `|aH⟩, |aV⟩, |bH⟩, |bV⟩` order.
pub const ONE_PHOTON_SUBSPACE: [usize; 4] = [3, 6, 1, 2];

impl TwoQutritChannel {
    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn factors(&self) -> (&QutritChannel, &QutritChannel) {
        (&self.factors.0, &self.factors.1)
    }

    pub fn to_channel(&self) -> KrausChannel {
        KrausChannel::new(self.kraus.clone(), true).expect("product of valid channels")
    }

    /// Prepare and measure within the one-photon subspace; for photon-number
    /// preserving factors this is the interferometer channel.
    pub fn one_photon_restriction(&self) -> Result<KrausChannel> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| k.select(&ONE_PHOTON_SUBSPACE, &ONE_PHOTON_SUBSPACE))
            .collect();
        KrausChannel::infer(kraus)
    }
}
