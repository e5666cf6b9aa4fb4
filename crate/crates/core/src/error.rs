use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NonSymmetric(f64),
    #[error("singular expression: {0}")]
    SingularExpression(String),
    #[error("singular intertwiner: {0}")]
    SingularIntertwiner(String),
    #[error("branch obstruction: {0}")]
    BranchObstruction(String),
    #[error("step limit exceeded after {0} steps")]
    StepLimit(usize),
    #[error("not in group: {0}")]
    NotInGroup(String),
    #[error("vector is not a unit vector: <a,a> = {0}")]
    NotUnit(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
