use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty set has no canonical point")]
    EmptySet,

    /// Two stored points share the same cell in every round up to the cap.
    #[error("points not separated by the family within {rounds} rounds")]
    NotSeparated { rounds: u32 },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid discrete universe size {0} (expected 1..={max})", max = crate::setalg::MAX_DISCRETE_POINTS)]
    InvalidUniverse(usize),

    #[error("point {point} outside universe of size {m}")]
    PointOutsideUniverse { point: usize, m: usize },

    /// A model or config field failed validation; the field path is named.
    #[error("invalid value for `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
