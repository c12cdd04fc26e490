use std::io;

/// Exit code for usage and input errors (BSD `EX_USAGE`).
pub const EXIT_USAGE: i32 = 64;
/// Exit code for inconclusive results and numeric failures.
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Core(#[from] regdec_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(regdec_core::Error::NonFinite(_)) => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        }
    }
}
