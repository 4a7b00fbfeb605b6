use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigendecomposition failed to converge (residual norm {residual:e})")]
    EigenFailure { residual: f64 },

    #[error("invalid evolution parameter: {0}")]
    InvalidEvolution(String),

    #[error("slice count must be at least 1")]
    ZeroSlices,

    #[error("index {index} out of range for boundary {boundary} of dimension {dim}")]
    IndexOutOfRange {
        boundary: usize,
        index: usize,
        dim: usize,
    },

    #[error("path enumeration needs {paths} terms, above the budget of {budget}")]
    EnumerationBudget { paths: u128, budget: u128 },

    #[error("kernel {kernel} entry ({row}, {col}) = {re:e}{im:+e}i is not a nonnegative real weight")]
    NegativeKernelEntry {
        kernel: usize,
        row: usize,
        col: usize,
        re: f64,
        im: f64,
    },

    #[error("network carries k-local weights; build it through the Pauli Hamiltonian route instead")]
    KLocalUnsupported,

    #[error("complex weight on edge {edge} at ({row}, {col}) where a real weight is required")]
    ComplexWeights { edge: usize, row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid RBM parameters: {0}")]
    InvalidRbm(String),

    #[error("spin value {0} is not +1 or -1")]
    InvalidSpin(f64),

    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),

    #[error("register of {qubits} qubits exceeds the limit of {max}")]
    RegisterTooLarge { qubits: usize, max: usize },

    #[error("probability table does not sum to one (sum = {sum})")]
    Unnormalized { sum: f64 },

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("edge set is not a spanning tree: {0}")]
    NotATree(String),

    #[error("invalid simplicial complex: {0}")]
    InvalidComplex(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("target puts mass on a configuration the model cannot reach")]
    SupportMismatch,

    #[error("analytic gradient unavailable: {0}")]
    AnalyticUnavailable(String),

    #[error("optimization diverged at step {step}")]
    Divergence { step: usize, trace: Vec<f64> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::EigenFailure { .. } | Error::Divergence { .. } | Error::SupportMismatch
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
