use thiserror::Error;

/// Errors raised by evaluation, quadrature and reconstruction routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolylogError {
    /// The argument lies outside the open domain the function is holomorphic on.
    #[error("domain error: {0}")]
    Domain(String),
    /// A precondition on the arguments was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An integer argument is out of range.
    #[error("argument error: {0}")]
    Argument(String),
    /// A series or adaptive scheme ran out of its evaluation budget.
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// A contour specification is inconsistent.
    #[error("contour error: {0}")]
    Contour(String),
    /// The requested accuracy cannot be reached with the given discretisation.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// An integration path leaves its holomorphy domain.
    #[error("path error: {0}")]
    Path(String),
    /// A reconstruction level exceeded the configured defect ceiling.
    #[error("level {k} aborted: liouville defect {defect:e} exceeds ceiling {ceiling:e}")]
    Ceiling { k: usize, defect: f64, ceiling: f64 },
}

pub type Result<T> = std::result::Result<T, PolylogError>;
