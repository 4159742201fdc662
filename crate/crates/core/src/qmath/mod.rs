//! Finite-dimensional linear algebra and entropy primitives.

pub mod channel;
pub mod entropy;
pub mod matrix;
pub mod random;
pub mod state;

pub use channel::{extend_channel, tensor_channels, QuantumChannel, KRAUS_TOL};
pub use entropy::{
    entropy_exchange, entropy_exchange_via_purification, fidelity, quantum_mutual_information,
    ssa_slack, von_neumann_entropy,
};
pub use matrix::{ComplexMatrix, ComplexVector, EIG_ZERO_TOL};
pub use state::{partial_trace, purify, DensityOperator, PureState, STATE_TOL};
