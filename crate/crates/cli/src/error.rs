use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in '{field}': {message}")]
    Config { field: String, message: String },

    #[error("{0}")]
    Resource(String),

    /// At least one empirical rate sits more than the allowed number of
    /// standard errors from its prediction.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(spdc_boson::Error),
}

impl CliError {
    /// 0 success, 1 config or I/O error, 2 resource cap, 3 validation failure.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config { .. } | CliError::Io { .. } | CliError::Core(_) => 1,
            CliError::Resource(_) => 2,
            CliError::Validation(_) => 3,
        })
    }
}

impl From<spdc_boson::Error> for CliError {
    fn from(e: spdc_boson::Error) -> Self {
        match e {
            spdc_boson::Error::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

pub fn config_error(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config { field: field.to_string(), message: message.into() }
}

pub fn io_error(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}
