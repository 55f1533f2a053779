use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("weight mismatch: operands live in different weighted algebras")]
    WeightMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not invertible by the Neumann route: {0}")]
    NotInvertible(String),

    #[error("summability bound diverges: {0}")]
    Summability(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("construction verification failed: {0}")]
    Verification(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("json error: {0}")]
    Json(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(format!("{e} (line {}, column {})", e.line(), e.column()))
    }
}
