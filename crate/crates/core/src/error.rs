use thiserror::Error;

/// Errors produced by the enumerator, connection-matrix and program builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("{what} supports at most {limit} qubits, got {n}")]
    TooManyQubits {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("codewords are not orthonormal: <L_{i}|L_{j}> deviates from delta by {deviation:.3e}")]
    NotOrthonormal { i: usize, j: usize, deviation: f64 },

    #[error("code is not permutation-invariant: {0}")]
    NotPermutationInvariant(String),

    #[error("unknown builtin code `{0}` (expected leung4, shor9, perfect5 or repetition(n))")]
    UnknownCode(String),

    #[error("invalid Pauli string `{0}`")]
    ParsePauli(String),

    #[error("invalid program specification: {0}")]
    InvalidSpec(String),

    #[error("invalid LP model: {0}")]
    InvalidModel(String),

    #[error("LP text parse error at line {line}: {msg}")]
    LpParse { line: usize, msg: String },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(what: &'static str, detail: impl Into<String>) -> Error {
    Error::OutOfRange {
        what,
        detail: detail.into(),
    }
}
