//! Error taxonomy shared across the crate.
//!
//! Every failure is classified so the CLI can map it to a stable exit code:
//! invalid input (2), resource limit (3), strategy fault (4).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments, graphs, or parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configured budget (states, subsets, geodesic combinations) was hit.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A strategy emitted an illegal move; names the side and stage.
    #[error("strategy fault ({side} at stage {stage}): {reason}")]
    StrategyFault {
        side: &'static str,
        stage: usize,
        reason: String,
    },

    /// No path exists between the requested vertices.
    #[error("no path between vertices {0} and {1}")]
    NoPath(usize, usize),

    /// A finite patch is too small for the requested computation.
    #[error("insufficient patch: {0}")]
    InsufficientPatch(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }

    /// Exit code class for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::NoPath(..) | Error::InsufficientPatch(_) => 2,
            Error::ResourceLimit(_) => 3,
            Error::StrategyFault { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
