//! Feynman path integrals over layered Hamiltonians, read as neural
//! networks and Boltzmann machines.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` / `*F32` aliases below fix the scalar.

pub mod circuits;
pub mod entropy;
pub mod error;
pub mod ising;
pub mod layered_network;
pub mod operators;
pub mod path_integral;
pub mod rbm;
pub mod rng;
pub mod scalar;
pub mod trainer;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type ComplexMatrixF64 = operators::ComplexMatrix<f64>;
pub type ComplexMatrixF32 = operators::ComplexMatrix<f32>;
pub type HermitianOperatorF64 = operators::HermitianOperator<f64>;
pub type HermitianOperatorF32 = operators::HermitianOperator<f32>;
pub type TransferChainF64 = path_integral::TransferChain<f64>;
pub type TransferChainF32 = path_integral::TransferChain<f32>;
pub type LayeredNetworkF64 = layered_network::LayeredNetwork<f64>;
pub type LayeredNetworkF32 = layered_network::LayeredNetwork<f32>;
pub type ProbabilityTableF64 = entropy::ProbabilityTable<f64>;
pub type ProbabilityTableF32 = entropy::ProbabilityTable<f32>;
pub type RbmParamsF64 = rbm::RbmParams<f64>;
pub type RbmParamsF32 = rbm::RbmParams<f32>;
pub type PauliHamiltonianF64 = ising::PauliHamiltonian<f64>;
pub type CircuitF64 = circuits::CircuitDescription<f64>;
