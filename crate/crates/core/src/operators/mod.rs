//! Dense complex linear algebra: Hermitian operators and `exp(-beta H)`
//! in complex time.

mod evolution;
mod hermitian;
mod io;
mod matrix;

pub use evolution::{EvolutionKind, EvolutionParameter};
pub use hermitian::{hermitian_tol, matrix_exponential, Eigen, HermitianOperator};
pub use io::{matrix_from_csv_str, matrix_to_csv_string, read_matrix_csv, write_matrix_csv};
pub use matrix::{check_hermitian, check_unitary, frobenius_distance, ComplexMatrix};
