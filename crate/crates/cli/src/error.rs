use heflow_core::HeError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config field `{field}`: {msg}")]
    Field { field: String, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: HeError,
    },

    #[error("grid-field file {}: {msg}", path.display())]
    Hegf { path: PathBuf, msg: String },

    #[error("csv {}: {msg}", path.display())]
    Csv { path: PathBuf, msg: String },

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("unknown bundled config `{0}`")]
    UnknownBundled(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn field(field: &str, msg: impl Into<String>) -> CliError {
    CliError::Field {
        field: field.to_string(),
        msg: msg.into(),
    }
}

pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

pub(crate) fn core(context: impl Into<String>) -> impl FnOnce(HeError) -> CliError {
    let context = context.into();
    move |source| CliError::Core { context, source }
}
