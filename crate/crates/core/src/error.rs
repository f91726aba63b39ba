use thiserror::Error;

/// Errors raised across the channel toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid random-unitary spec: {0}")]
    InvalidSpec(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("state vector is not normalized (norm {0:.12})")]
    NotNormalized(f64),

    #[error("channel is not trace preserving (max deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("channel exchanges amplitude between vacuum and photon levels")]
    NotPhotonNumberPreserving,

    #[error("channel has no transmitted output")]
    ZeroChannel,

    #[error("success probability {0:.3e} too small to renormalize")]
    VanishingSuccess(f64),

    #[error("rank-deficient design matrix (rank {rank} of {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
