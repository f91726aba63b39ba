//! Superposed qubit channels: random-unitary implementations, interferometric
//! superposition, post-selection, vacuum-extended qutrit models, maximal
//! coherent information and simulated qutrit process tomography.

pub mod blochgeo;
pub mod channels;
pub mod cohinfo;
pub mod error;
pub mod numerics;
pub mod superpose;
pub mod tomosim;

pub use channels::{Branch, ChoiState, KrausChannel, RandomUnitarySpec};
pub use cohinfo::{DensityMatrix, Implementation, Model};
pub use error::{Error, Result};
pub use numerics::{CMatrix, C64};
pub use superpose::{ControlledChannel, PathState, PostSelectedChannel, QutritChannel};
pub use tomosim::{Shots, SystematicsConfig};
