//! Sliced propagators: transfer chains, explicit sums over paths, and their
//! resummation as matrix products.

mod chain;
mod paths;

pub use chain::{build_chain, slice_kernel, ChainDump, SliceScheme, TransferChain};
pub use paths::{
    amplitude_by_contraction, amplitude_by_enumeration, path_distribution, path_weight,
    Endpoints, PathIndex, ENUMERATION_BUDGET,
};

use crate::error::Result;
use crate::operators::{frobenius_distance, matrix_exponential, EvolutionParameter, HermitianOperator};
use crate::scalar::{Cplx, Real};

/// `Z = Tr exp(-beta H)`.
pub fn partition_function<T: Real>(
    h: &HermitianOperator<T>,
    beta: &EvolutionParameter<T>,
) -> Result<Cplx<T>> {
    matrix_exponential(h, beta)?.trace()
}

/// Frobenius distance between the contracted `P`-slice chain and `exp(-beta H)`.
pub fn trotter_error<T: Real>(
    h: &HermitianOperator<T>,
    beta: &EvolutionParameter<T>,
    slices: usize,
    scheme: SliceScheme,
) -> Result<T> {
    let chain = build_chain(h, beta, slices, scheme)?;
    let exact = matrix_exponential(h, beta)?;
    frobenius_distance(&chain.contract(), &exact)
}
