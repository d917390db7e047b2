use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("rank {rank} is not in 1..={dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("vectors are not orthonormal (max deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("vectors do not form a complete basis: {0}")]
    NotComplete(String),

    #[error("k = {k} is infeasible: {reason}")]
    InfeasibleK { k: f64, reason: String },

    #[error("invalid coarse-graining map: {0}")]
    BadMap(String),

    #[error("measurement element {index} is not rank one")]
    NotRankOne { index: usize },

    #[error("state has dimension {dim}, a two-qubit (d = 4) state is required")]
    NotFourDim { dim: usize },

    #[error("wrong number of parameters: expected {expected}, found {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("search did not reach tolerance (best residual {best_residual:.3e})")]
    NoSuccess { best_residual: f64 },

    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },
}
