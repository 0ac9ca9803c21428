use std::path::PathBuf;

/// Errors produced by the core library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("duplicate measure for series `{series_id}` at timestamp {timestamp} (line {line})")]
    Duplicate {
        series_id: String,
        timestamp: u64,
        line: u64,
    },

    #[error("irregular timestamp grid: {0}")]
    Grid(String),

    #[error("invalid dataset: {0}")]
    Invalid(String),

    #[error("window t={t}, k={k} does not fit in {m} timestamps")]
    Bounds { t: usize, k: usize, m: usize },

    #[error("unknown series id `{0}`")]
    UnknownSeries(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("alignment error: {0}")]
    Alignment(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
