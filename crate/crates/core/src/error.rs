use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("finite set must be nonempty")]
    EmptySet,
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("invalid metric parameters: {0}")]
    InvalidMetric(String),
    #[error("index path of length {len} is longer than level {level}")]
    PathTooLong { len: usize, level: usize },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("level {0} exceeds the maximum nesting level")]
    LevelCap(usize),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("contraction condition not met: {0}")]
    NotContractive(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
