use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps each variant onto a distinct exit code, see [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller supplied an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numeric input was not finite or otherwise unusable.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("weight not rapidly decreasing at this scale (m = {m})")]
    NotRapidlyDecreasing { m: f64 },

    #[error("weight degenerate for Lusky construction after m = {m}")]
    DegenerateLusky { m: f64 },

    /// The coefficient support is not covered by the block boundaries.
    #[error("coefficient index {index} exceeds last block boundary {last}; extend Lusky sequence")]
    Coverage { index: usize, last: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::Serialization(_) => 2,
            Error::Coverage { .. } => 3,
            Error::Domain(_) | Error::NotRapidlyDecreasing { .. } | Error::DegenerateLusky { .. } => 4,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
