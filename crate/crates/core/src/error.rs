use thiserror::Error;

use crate::solver::SdpSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {value} lies outside [-1, 1]")]
    Domain { value: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("problem too large: {size} exceeds the size cap {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("coefficient support mismatch: {0}")]
    SupportMismatch(String),

    #[error("inconsistent solution: {0}")]
    InconsistentSolution(String),

    #[error("solver did not converge after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        best: Box<SdpSolution>,
    },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("problem appears infeasible or unbounded: {0}")]
    Infeasible(String),

    #[error("symmetry-adapted basis failed validation: {0}")]
    BasisQuality(String),

    #[error("could not resolve eigenvalue degeneracies after {attempts} attempts")]
    Degeneracy { attempts: usize },

    #[error("malformed coefficient file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
