use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("computation failed: {0}")]
    Compute(#[from] casimir_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{failed} of {total} checks failed")]
    Verify { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Compute(_) | Self::Io { .. } => 2,
            Self::Verify { .. } => 3,
        }
    }
}

pub fn config_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

pub type Result<T> = std::result::Result<T, CliError>;
