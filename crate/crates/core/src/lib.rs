//! Holevo capacity of qubit channels, entanglement measures for small
//! systems, and the seeded numerical searches built on them.

pub mod channel;
pub mod entanglement;
pub mod error;
pub mod holevo;
pub mod info;
pub mod matrix;
pub mod rng;
pub mod search;

pub use channel::{BlochPoint, PauliProbs, QubitChannel};
pub use error::{Error, Result};
pub use holevo::{CapacityResult, EnsembleMember, Lattice};
pub use info::{DensityMatrix, PureState};
pub use matrix::{ComplexMatrix, FactoredDims, C64};
