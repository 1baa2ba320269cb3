use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {error}")]
    Io { path: PathBuf, error: std::io::Error },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: score {value} is outside [0, 1]")]
    ScoreOutOfRange { line: u64, value: String },

    #[error("line {line}: outcome {value} is not 0 or 1")]
    InvalidOutcome { line: u64, value: String },

    #[error("line {line}: true probability {value} is outside [0, 1]")]
    TrueProbOutOfRange { line: u64, value: String },

    #[error("no observations")]
    Empty,

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid index range ({lo}, {hi}] for n = {n}")]
    InvalidRange { lo: usize, hi: usize, n: usize },

    #[error("invalid binning: {0}")]
    InvalidBinning(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, error: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            error,
        }
    }
}
