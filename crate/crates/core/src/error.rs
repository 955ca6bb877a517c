use thiserror::Error;

use crate::network::AdoptionEvent;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An id or value outside the domain of the operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A reduction step whose events are not all enabled.
    #[error("invalid reduction step at {event:?}: {reason}")]
    Reduction {
        event: Option<AdoptionEvent>,
        reason: String,
    },

    /// The input falls outside the class an algorithm is defined for.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The exhaustive search or a size-capped construction ran out of room.
    #[error("budget exhausted after {visited} states (limit {limit})")]
    Budget { visited: usize, limit: usize },

    /// A construction would exceed its configured size cap.
    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    /// A malformed network document.
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// A well-formed document describing an invalid network.
    #[error("{message}")]
    Semantic {
        node: Option<usize>,
        message: String,
    },
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn semantic(node: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Semantic {
            node,
            message: msg.into(),
        }
    }

    /// True for errors caused by running out of search or size budget.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::SizeCap(_))
    }
}
