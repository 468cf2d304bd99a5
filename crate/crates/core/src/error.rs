use thiserror::Error;

/// Errors raised by the simulators and monotone routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("too many qubits: {n} (limit {limit})")]
    TooManyQubits { n: usize, limit: usize },
    #[error("Pauli operator is not Hermitian (phase must be +1 or -1)")]
    NonHermitianPauli,
    #[error("projector generators do not commute")]
    NonCommutingGenerators,
    #[error("invalid Bloch vector: norm {0} exceeds 1")]
    InvalidBloch(f64),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state is a stabilizer state; {0} is undefined")]
    StabilizerInput(&'static str),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program did not converge: {0}")]
    LpFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
