use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("malformed manifest: {0}")]
    MalformedManifest(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("mask out of bounds in series `{series}`: rows {row0}..{} / cols {col0}..{} exceed {height}x{width}", row0 + k, col0 + k)]
    MaskOutOfBounds {
        series: String,
        row0: usize,
        col0: usize,
        k: usize,
        height: usize,
        width: usize,
    },

    #[error("bundle contains no series")]
    RejectedEmptyBundle,

    #[error("series `{series}` has {len} usable image(s); at least 2 are required")]
    SeriesTooShort { series: String, len: usize },

    #[error("series `{series}`: timestamps must be strictly increasing (image {index})")]
    NonMonotonicTimestamps { series: String, index: usize },

    #[error("channel {channel} has a 99th percentile of zero")]
    DegenerateChannel { channel: usize },

    #[error("channel statistics cover {stats} channel(s) but data has {data}")]
    StatsMismatch { stats: usize, data: usize },

    #[error("expected a uint8-domain image")]
    DomainError,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed CSV: {0}")]
    MalformedCsv(String),

    #[error("mAP value {value} out of range [0, 1] at line {line}")]
    OutOfRangeMap { value: f64, line: usize },

    #[error("training CSV references technique `{0}` which is not in the score summary")]
    UnknownTechniqueInTrainingCsv(String),

    #[error("I/O failure on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
