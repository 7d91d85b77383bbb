use thiserror::Error;

/// Errors raised by the estimators and their building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expressions over different spaces cannot be combined")]
    SpaceMismatch,

    #[error("linear program infeasible on grid (mass {grid_mass}, test {grid_test}); refine the mass grid")]
    LpInfeasible { grid_mass: usize, grid_test: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_) | Error::Numerical(_) | Error::LpInfeasible { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
