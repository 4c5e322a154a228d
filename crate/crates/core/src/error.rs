use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("gate targets repeat qubit {0}")]
    DuplicateQubit(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{n} qubits exceeds the simulator cap of {cap}")]
    QubitCap { n: usize, cap: usize },

    #[error("malformed Pauli word {0:?}")]
    MalformedPauli(String),

    #[error("gate is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("condition number must exceed 1, got {0}")]
    InvalidKappa(f64),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("oracle matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    #[error("matrix entry ({row}, {col}) has magnitude {magnitude} > 1")]
    EntryTooLarge { row: usize, col: usize, magnitude: f64 },

    #[error("expected {expected} parameters, got {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("parameter {0} does not admit the two-point shift rule")]
    NotShiftCompatible(usize),

    #[error("<psi|psi> = {0:.3e} is too small to normalize the cost")]
    VanishingNorm(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
