use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed instance document: {0}")]
    Malformed(String),

    #[error("invalid distribution for element {element}: {reason}")]
    Distribution { element: usize, reason: String },

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("invalid matroid: {0}")]
    Matroid(String),

    #[error("set {set} is not contained in the ground set {ground}")]
    NotInGround { set: String, ground: String },

    #[error("cannot contract by {0}: set is not independent")]
    NotIndependent(String),

    #[error("state cap exceeded: {needed} states needed, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("instance too large for this oracle: {0}")]
    TooLarge(String),

    #[error("policy violation: {0}")]
    Policy(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn policy(msg: impl Into<String>) -> Self {
        Error::Policy(msg.into())
    }
}
