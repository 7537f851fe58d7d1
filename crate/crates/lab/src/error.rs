use std::path::Path;

use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown experiment `{name}`; valid names: {}", valid.join(", "))]
    UnknownExperiment { name: String, valid: Vec<String> },
    #[error("parameter `{param}` is not recognized by {experiment}; known: {}", known.join(", "))]
    UnknownParam { experiment: String, param: String, known: Vec<String> },
    #[error("empty sweep: parameter `{0}` has no values")]
    EmptySweep(String),
    #[error("parameter `{param}`: {message}")]
    BadParam { param: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] strichartz::Error),
}

impl LabError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io { path: path.display().to_string(), source }
    }

    pub fn bad(param: &str, message: impl Into<String>) -> Self {
        LabError::BadParam { param: param.into(), message: message.into() }
    }
}
