//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by dataset handling, training, and bound evaluation.
#[derive(Debug, Error)]
pub enum DalcError {
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty sample: {0}")]
    EmptySample(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero-norm example at index {0} (margins are norm-normalized)")]
    ZeroNormExample(usize),

    #[error("degenerate kernel diagonal at support index {0}")]
    DegenerateKernel(usize),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unsupported model format version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("non-finite objective or gradient at iteration {iteration}")]
    NonFiniteEvaluation {
        iteration: usize,
        /// Last iterate at which the objective and gradient were still finite.
        last_point: Vec<f64>,
    },

    #[error("all cross-validation folds were degenerate (single-class training split)")]
    AllFoldsDegenerate,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DalcError>;

impl DalcError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        DalcError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
