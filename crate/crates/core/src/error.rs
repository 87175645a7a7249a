//! Error type shared across the workbench.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("input must be Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("weight is not faithful: density eigenvalue {0:.3e} is not strictly positive")]
    NotFaithful(f64),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("matrix must be square")]
    NonSquare,
    #[error("not a centralizer projection: {0}")]
    NotCentralizerProjection(String),
    #[error("map is not weight-preserving (residual {0:.3e})")]
    NotWeightPreserving(f64),
    #[error("map is missing its declared dual")]
    MissingDual,
    #[error("map is not completely positive (Choi defect {0:.3e})")]
    NotCompletelyPositive(f64),
    #[error("map is not unital (residual {0:.3e})")]
    NotUnital(f64),
    #[error("domination ρ ≤ ψ fails (smallest eigenvalue of d_ψ − d_ρ is {0:.3e})")]
    NotDominated(f64),
    #[error("operator norm exceeds 1 ({0:.6})")]
    NotContraction(f64),
    #[error("truncation memory estimate exceeded: {0}")]
    MemoryEstimate(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
}

pub type Result<V> = std::result::Result<V, Error>;
