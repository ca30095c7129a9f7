use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular even after ridge jitter")]
    SingularMatrix,
    #[error("probability {0} outside (0, 1)")]
    InvalidProbability(f64),
    #[error("bandwidth must be positive, got {0}")]
    NonpositiveBandwidth(f64),
    #[error("zero is not inside the convex hull of the estimating functions")]
    HullViolation,
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("logarithm argument 1 + lambda'g is not positive")]
    LogDomain,
    #[error("complete-case design matrix is rank deficient")]
    RankDeficient,
    #[error("need at least {needed} complete cases, found {found}")]
    InsufficientCompleteCases { needed: usize, found: usize },
    #[error("sample is degenerate (all values equal)")]
    DegenerateSample,
    #[error("residual sample has a single sign")]
    OneSidedSample,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("active set is empty")]
    EmptyActiveSet,
    #[error("{failed} of {total} replications failed")]
    TooManyFailures { failed: usize, total: usize },
}

impl Error {
    /// Whether the error comes from invalid input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidProbability(_)
                | Error::NonpositiveBandwidth(_)
                | Error::DimensionMismatch(_)
                | Error::InvalidConfig(_)
                | Error::NonFinite(_)
                | Error::InsufficientCompleteCases { .. }
                | Error::DegenerateSample
                | Error::OneSidedSample
        )
    }
}
