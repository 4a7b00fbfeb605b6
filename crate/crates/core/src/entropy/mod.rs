//! Shannon entropies of path marginals and the chain, Bethe and Kikuchi
//! entropy functionals built from them. All entropies are in nats.

mod complex;
mod functionals;
mod table;

pub use complex::{multiplicities, MultiplicityMode, SimplicialComplex};
pub use functionals::{
    bethe_breakdown, chain_decomposition, kikuchi_breakdown, kikuchi_entropy, marginalize,
    mutual_information, paper_chain_breakdown, paper_chain_entropy, shannon, tree_bethe_entropy,
    ChainDecomposition, EntropyBreakdown, EntropyTerm,
};
pub use table::{ProbabilityTable, Variable};

pub(crate) use table::odometer_step;
