use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("inverse temperature must be strictly positive and finite, got {0}")]
    InvalidBeta(f64),

    #[error("states are defined on different Hamiltonians")]
    HamiltonianMismatch,

    #[error("noisy-operation check requires a fully degenerate Hamiltonian")]
    NonDegenerate,

    #[error("source does not majorize target (prefix of length {0} violated)")]
    NotMajorizing(usize),

    #[error("matrix is not bistochastic: {0}")]
    NotBistochastic(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("multiplicity overflow while building {0}")]
    Overflow(String),

    #[error("linear program is numerically degenerate: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
