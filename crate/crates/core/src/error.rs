use thiserror::Error;

/// Errors raised by grid construction, linear algebra, and the analysis drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("grid resolution n = {n} is below the minimum of {min}")]
    GridTooCoarse { n: usize, min: usize },

    #[error("field length {got} does not match {expected} interior nodes")]
    FieldLength { expected: usize, got: usize },

    #[error("field value at node {node} is not finite")]
    NonFinite { node: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile rejected at node {node}: {reason}")]
    ProfileBound { node: usize, reason: String },

    #[error("linear solver failed to converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("factorization broke down at row {row}: pivot {pivot:e} is not positive")]
    Breakdown { row: usize, pivot: f64 },

    #[error("eigen iteration did not converge after {iterations} iterations (residual {residual:e})")]
    EigenDiverged { iterations: usize, residual: f64 },

    #[error("nonpositive gap a + eps - u = {gap:e} at node {node}")]
    NonpositiveGap { node: usize, gap: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bracket invalid: {0}")]
    InvalidBracket(String),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
