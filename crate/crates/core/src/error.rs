use thiserror::Error;

/// Errors raised while building or running a loop.
#[derive(Debug, Error)]
pub enum Error {
    /// One or more configuration constraints are violated. Every violation is listed.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("ingest error: {0}")]
    Ingest(#[from] IngestError),

    /// A step was rejected because of non-finite inputs or state.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Frequency-domain analysis failed (e.g. no 0 dB crossing in the scan range).
    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Ingest(_) => 3,
            Error::Numerical(_) | Error::Analysis(_) => 4,
            Error::Metric(_) | Error::Io(_) => 1,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Ingest(_) => "ingest",
            Error::Numerical(_) => "numerical",
            Error::Analysis(_) => "analysis",
            Error::Metric(_) => "metric",
            Error::Io(_) => "io",
        }
    }
}

/// Problems found while reading recorded three-phase data.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("row {row}: timestamp {t} does not increase (previous {prev})")]
    NonMonotonic { row: usize, t: f64, prev: f64 },
    #[error("file holds {0} rows, at least 2 are required")]
    TooShort(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
