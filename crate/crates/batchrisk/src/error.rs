use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{source_name}: line {line} (row {row}): {message}")]
    Parse {
        source_name: String,
        line: u64,
        row: u64,
        message: String,
    },

    #[error("{0}: no data rows")]
    EmptyInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] batchrisk_core::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit status for this error: 2 for anything wrong with the
    /// invocation or its inputs, 1 for failures during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::EmptyInput(_) | Error::Config(_) => 2,
            Error::Core(batchrisk_core::Error::TaskMismatch { .. }) => 2,
            Error::Core(_) | Error::Json(_) | Error::Csv(_) => 1,
            Error::Context { source, .. } => source.exit_code(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
