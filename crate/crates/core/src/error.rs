use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    /// An argument outside the domain of an operation (non-Hall word,
    /// nonzero constant term under `exp⧢`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("time {t} is not a grid point of the iterated-integral table")]
    OffGrid { t: f64 },

    #[error("word {0} is not covered by the iterated-integral table")]
    MissingWord(String),

    #[error("finite escape: solution blows up near t = {t}")]
    BlowUp { t: f64 },

    #[error("flow factorization failed: best convention error {best_error:e} exceeds {tolerance:e}")]
    Factorization { best_error: f64, tolerance: f64 },

    #[error("degree {requested} exceeds the cap {cap}; pass an explicit override to allow it")]
    DegreeCap { requested: usize, cap: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
