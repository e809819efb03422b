use std::path::Path;

/// Process exit codes.
pub const EXIT_MATCH: u8 = 0;
pub const EXIT_NO_MATCH: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("invalid input: {0}")]
    Input(#[from] urquhart_core::Error),
}

impl CliError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self::Io(format!("{}: {err}", path.display()))
    }

    /// Configuration and invalid-input errors map to the config code; files
    /// that cannot be read, written or parsed map to the I/O code.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Input(_) => EXIT_CONFIG,
            Self::Io(_) => EXIT_IO,
        }
    }
}
