use thiserror::Error;

/// Errors raised by space, cover, map and verification operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point is not a member of the space: {0}")]
    Membership(String),

    #[error("point kind does not match the space: expected {expected}, got {got}")]
    WrongSpace { expected: String, got: String },

    #[error("factor dimensions differ: {0} vs {1}")]
    FactorMismatch(usize, usize),

    #[error("cannot truncate a level-{level} point to level {target}")]
    CannotTruncate { level: u32, target: u32 },

    #[error("window is not finite for this space: {0}")]
    InfiniteWindow(String),

    #[error("malformed window: {0}")]
    MalformedWindow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point outside the map domain: {0}")]
    OutsideDomain(String),

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
