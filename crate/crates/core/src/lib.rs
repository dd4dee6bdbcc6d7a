//! Density-matrix simulation of single-photon optical logic: Fock-space
//! states, beamsplitter/Kerr gates, photon loss and Kerr dephasing, the
//! two-switch Deutsch machine and its projective error correction.

pub mod channels;
pub mod correction;
pub mod error;
pub mod fock;
pub mod gates;
pub mod linalg;
pub mod machine;
pub mod sweep;

pub use channels::{Channel, KrausChannel, LossPlacement, NoiseParams};
pub use error::{Error, Result};
pub use fock::{DensityOperator, FockSpace, LinearOperator, OccupationVector, PureState};
pub use gates::FredkinModes;
