use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Cylinder refinement ran out of budget; `lo..=hi` still encloses the mass.
    #[error("measure evaluation did not converge (depth cap {depth}): partial interval [{lo}, {hi}]")]
    NonConvergence { lo: f64, hi: f64, depth: u32 },

    #[error("enumeration too large: window volume x block size = {0:.3e} exceeds 1e8, shrink the window")]
    TooLarge(f64),

    #[error("block n = {requested} is not resolvable; max feasible block is {max_feasible:?}")]
    Infeasible {
        requested: u32,
        max_feasible: Option<u32>,
    },

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
