use std::path::PathBuf;

use crate::adders::AdderKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("operand error: {0}")]
    Operand(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("adder kind `{0}` has no executable logic")]
    UnsupportedKind(AdderKind),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("refusing to enumerate 2^{bits} input pairs (limit is n <= {limit})")]
    ResourceGuard { bits: u32, limit: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid format: {0}")]
    Format(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("truncated input: {0}")]
    Truncated(String),

    #[error("layer chain mismatch: {0}")]
    ChainMismatch(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
