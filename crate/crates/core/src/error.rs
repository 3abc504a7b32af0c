use thiserror::Error;

/// Errors raised by the simulation engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("{n_links} links exceeds the statevector cap of {cap}")]
    CapExceeded { n_links: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("link set is not a contiguous run: {0:?}")]
    NonContiguous(Vec<usize>),

    #[error("momentum {0} is not on the lattice grid")]
    OffGrid(f64),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("state is not a momentum eigenstate (|<T>| = {0})")]
    NotMomentumEigenstate(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
