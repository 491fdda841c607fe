use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("symmetric eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("KAK decomposition failed: {0}")]
    Decomposition(String),
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("rewrite rule does not match: {0}")]
    ShapeMismatch(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("qubit index {index} out of range for a {n_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
