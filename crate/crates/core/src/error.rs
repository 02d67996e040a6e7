use thiserror::Error;

/// Failure modes shared by all modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A scenario parameter violates a configuration invariant.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// An estimator was asked to run outside the regime it is valid in.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Quadrature, series or finite-difference evaluation did not converge.
    #[error("numerical convergence failure: {0}")]
    Convergence(String),
    /// A computed quantity broke a property it must satisfy.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// A coverage estimate of exactly 0 or 1 where an inverse Q-function is needed.
    #[error("degenerate coverage: {0}")]
    DegenerateCoverage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
pub(crate) use domain;
