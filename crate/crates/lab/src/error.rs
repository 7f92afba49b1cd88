use std::io;
use std::path::PathBuf;

use cellsort_core::ConfigError;

use crate::trace::TraceError;

/// Anything the lab can fail with. Every variant maps to one CLI exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// A setting is missing, malformed or inconsistent. `key` uses the
    /// dotted config-file names.
    #[error("{key}: {message}")]
    Config { key: String, message: String },
    /// The command line asked for something the inputs cannot provide.
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Trace {
        path: PathBuf,
        #[source]
        source: TraceError,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    /// Stored battery files disagree with each other.
    #[error("{}: {message}", path.display())]
    Inconsistent { path: PathBuf, message: String },
}

impl LabError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration and usage problems, 3 for anything wrong with
    /// reading or writing files.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config { .. } | LabError::Usage(_) => 2,
            LabError::Io { .. } | LabError::Trace { .. } | LabError::Csv { .. } | LabError::Inconsistent { .. } => 3,
        }
    }
}

impl From<ConfigError> for LabError {
    fn from(e: ConfigError) -> Self {
        LabError::config(e.key, e.message)
    }
}
