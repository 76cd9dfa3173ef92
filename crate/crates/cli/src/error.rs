use std::path::PathBuf;

use proxipoint_core::dsl::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error at `{key}`: {reason}")]
    Schema { key: String, reason: String },
    #[error("syntax error in `{key}`: {source}")]
    Syntax {
        key: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Core(#[from] proxipoint_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown example `{0}` (see `proxipoint list-examples`)")]
    UnknownExample(String),
    #[error("{0}")]
    Usage(String),
}

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

impl CliError {
    pub fn schema(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Schema {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Syntax { .. } | CliError::UnknownExample(_) | CliError::Usage(_) => {
                EXIT_USAGE
            }
            CliError::Core(e) if e.is_hypothesis_failure() => EXIT_HYPOTHESIS,
            CliError::Core(_) | CliError::Io { .. } => EXIT_FAILURE,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
