use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A desk-scale guard (basis size, class, group order) was tripped.
    #[error("resource limit exceeded: {what} is {requested}, limit {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("elements belong to different nilpotent group contexts")]
    ContextMismatch,

    #[error("element is not in layer {weight} of the lower central series")]
    NotInLayer { weight: u32 },

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("quotient group is not abelian")]
    NonAbelianQuotient,

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
