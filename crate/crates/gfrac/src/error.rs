use thiserror::Error;

/// Crate-wide error type.
///
/// Variants split into three families that the CLI maps onto exit codes:
/// configuration/usage problems (exit 2), numerical failures (exit 1), and
/// I/O problems (exit 2).
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter or configuration (violated precondition).
    #[error("configuration error: {0}")]
    Config(String),

    /// A value outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative procedure failed to converge.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// Degenerate input for which the operation is undefined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Line search could not make progress.
    #[error("line search stagnation: {0}")]
    LineSearch(String),

    /// Deformation path collapsed onto the zero profile.
    #[error("path collapse: {0}")]
    PathCollapse(String),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Parse(_) | Error::Io(_) => 2,
            Error::NonConvergence(_)
            | Error::Degenerate(_)
            | Error::LineSearch(_)
            | Error::PathCollapse(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
