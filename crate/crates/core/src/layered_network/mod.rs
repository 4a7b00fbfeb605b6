//! Layered Hamiltonians over visible and hidden bases, their slice
//! kernels, and the feed-forward reading of the same parameters.

mod activation;
mod network;
mod ops;

pub use activation::{logistic, ActivationKind};
pub use network::{edge_key, HigherFile, HigherWeight, LayerKind, LayerSpec, LayeredNetwork, NetworkFile};
pub use ops::{
    assemble_hamiltonian, boltzmann_joint, classical_chain, configuration_energy, forward_map,
    slice_blocks, slice_complete,
};

pub(crate) use ops::forward_trace;
