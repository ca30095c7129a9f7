use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("csv schema error: {0}")]
    CsvSchema(String),
    #[error("invalid arguments: {0}")]
    Usage(String),
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("config file: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] expectile_el::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input (schema, arguments, domain checks), 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Model(e) if !e.is_input_error() => 3,
            CliError::Json(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::CsvSchema(e.to_string())
    }
}
