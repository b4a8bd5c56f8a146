use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("angle {0} is outside the admissible open interval")]
    InvalidAngle(String),
    #[error("rho must be positive, got {0}")]
    InvalidRho(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("contraction order {r} out of range for tensors of order {q}")]
    ContractionOrder { r: usize, q: usize },
    #[error("theta grid rejected: {0}")]
    InvalidGrid(String),
    #[error("matrix is ill-conditioned: residual {residual:e} exceeds {bound:e}")]
    IllConditioned { residual: f64, bound: f64 },
    #[error("covariance is not positive semidefinite: {0}")]
    NotPositiveSemidefinite(String),
    #[error("Gaussian degree {degree} exceeds the budget of {budget}")]
    DegreeBudget { degree: u32, budget: u32 },
    #[error("invalid criterion: {0}")]
    InvalidCriterion(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate target distribution: {0}")]
    DegenerateTarget(String),
    #[error("worker pool: {0}")]
    WorkerPool(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, ChaosError>;
