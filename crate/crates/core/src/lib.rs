//! Capacity computations for quantum and classical channels: the
//! entanglement-assisted capacity and its relatives, bosonic Gaussian
//! formulas, typical subspaces, and an exactly faithful simulator for
//! discrete memoryless channels.

pub mod capacity;
pub mod channels;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod numfmt;
pub mod qmath;
pub mod reverse_shannon;
pub mod typeclasses;

pub use error::{Error, Result};
