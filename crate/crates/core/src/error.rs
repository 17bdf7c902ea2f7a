use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: String,
        requested: u128,
        limit: u128,
    },

    #[error("operands belong to different algebras")]
    AlgebraMismatch,

    #[error("quotient by the unit element collapses the algebra")]
    DegenerateQuotient,

    #[error("inconsistent extension: prescribed ideals meet in a nonzero element")]
    InconsistentExtension,

    #[error("presentation inconsistent at stage {stage}: natural map not injective, offending relation {relation}")]
    PresentationInconsistent { stage: usize, relation: String },

    #[error("invalid ladder system: {0}")]
    InvalidLadder(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
