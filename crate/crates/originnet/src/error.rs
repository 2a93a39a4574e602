use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] originnet_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: bad header: {reason}", path.display())]
    Header { path: PathBuf, reason: String },

    #[error("{}: data row {row} has {found} fields, header has {expected}", path.display())]
    RaggedRow {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{}: data row {row}, column `{column}`: `{value}` is not a number", path.display())]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("unsupported model format version {0}")]
    FormatVersion(u32),

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error; see `originnet --help`.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => crate::cli::EXIT_USAGE,
            Error::Io { .. } => crate::cli::EXIT_IO,
            Error::Csv { source, .. } if source.is_io_error() => crate::cli::EXIT_IO,
            Error::Csv { .. }
            | Error::Json { .. }
            | Error::Header { .. }
            | Error::RaggedRow { .. }
            | Error::Parse { .. }
            | Error::FormatVersion(_) => crate::cli::EXIT_INPUT,
            Error::Core(_) => crate::cli::EXIT_COMPUTE,
        }
    }
}
