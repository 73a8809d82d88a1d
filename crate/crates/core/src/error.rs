use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Table size is zero, too small for the function, or over the memory budget.
    #[error("sizing error: {0}")]
    Sizing(String),

    /// An evaluation point lies outside the table.
    #[error("range error: checkpoint {x} exceeds n_max = {n_max}")]
    Range { x: f64, n_max: usize },

    #[error("overflow: {0}")]
    Overflow(String),

    /// Two inputs that must share a shape do not.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("unknown claim `{0}`")]
    UnknownClaim(String),

    /// Exact Abel identity failed beyond floating tolerance.
    #[error("abel identity violated: relative error {0:e}")]
    Identity(f64),

    #[error("cache format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
