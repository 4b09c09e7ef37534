use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("could not parse configuration: {0}")]
    Parse(String),

    #[error("invalid configuration at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("--seedless was given but the configuration uses a random number generator ({0})")]
    RngRequested(String),

    #[error("column `{0}` not found in CSV")]
    MissingColumn(String),

    #[error("CSV: {0}")]
    Csv(String),

    #[error(transparent)]
    Core(#[from] harvest_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
