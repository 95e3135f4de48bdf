use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("resource limit exceeded: {0}")]
    Limit(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("data corruption in {entry}: {reason}")]
    DataCorruption { entry: String, reason: String },

    /// A computed fact contradicts a theorem the toolkit checks. The witness is
    /// machine readable so reports can carry it verbatim.
    #[error("theorem violation ({claim}): {detail}")]
    TheoremViolation {
        claim: String,
        detail: String,
        witness: serde_json::Value,
    },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn limit(msg: impl Into<String>) -> Self {
        Error::Limit(msg.into())
    }

    pub fn violation(
        claim: impl Into<String>,
        detail: impl Into<String>,
        witness: serde_json::Value,
    ) -> Self {
        Error::TheoremViolation {
            claim: claim.into(),
            detail: detail.into(),
            witness,
        }
    }

    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TheoremViolation { .. } => 1,
            Error::Limit(_) => 3,
            Error::Internal(_) => 1,
            _ => 2,
        }
    }
}
