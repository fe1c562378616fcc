use std::path::Path;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown problem \"{0}\" (expected phillips, shaw or blur2d)")]
    UnknownProblem(String),
    #[error("unknown solver \"{0}\" (expected gmres, qmr, rrgmres, rrqmr or tsvd)")]
    UnknownSolver(String),
    #[error("cannot parse config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] krr_core::Error),
}

pub(crate) fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub(crate) fn io_error(action: &str, path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        context: format!("cannot {action} {}", path.display()),
        source,
    }
}
