use thiserror::Error;

/// Errors produced by the design, allocation and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// Arguments are individually valid but inconsistent or infeasible.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// An iterative solver or quadrature failed to produce a usable value.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Structured input (JSON documents, bit strings) is malformed.
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $kind:ident, $($arg:tt)+) => {
        {
            let holds: bool = $cond;
            if !holds {
                return Err($crate::error::Error::$kind(format!($($arg)+)));
            }
        }
    };
}
pub(crate) use ensure;
