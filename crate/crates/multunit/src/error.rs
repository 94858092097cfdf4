use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum MuError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("operator is not a contraction (norm {norm:.3e})")]
    NotContraction { norm: f64 },
    #[error("singular or ill-conditioned system: {0}")]
    Singular(String),
    #[error("input is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("multiplicity != 1 (found {0})")]
    Multiplicity(usize),
    #[error("invariant failure: {name} (residual {residual:.3e})")]
    Invariant { name: String, residual: f64 },
    #[error("not a member of {algebra} (residual {residual:.3e})")]
    Membership { algebra: String, residual: f64 },
    #[error("not a pre-subgroup: {condition} (residual {residual:.3e})")]
    NotPresubgroup { condition: String, residual: f64 },
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("invalid group table: {0}")]
    GroupTable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl MuError {
    pub(crate) fn invariant(name: impl Into<String>, residual: f64) -> Self {
        MuError::Invariant { name: name.into(), residual }
    }

    /// True for errors caused by malformed input rather than a failed identity.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            MuError::Dimension(_)
                | MuError::GroupTable(_)
                | MuError::Parse(_)
                | MuError::InvalidArgument(_)
                | MuError::Io(_)
                | MuError::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, MuError>;
