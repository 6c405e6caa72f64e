use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("computation failed: {0}")]
    Core(#[from] xxchain::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn infeasible(e: xxchain::Error) -> Self {
        Self::Infeasible(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) | Self::Core(_) => 1,
            Self::Verification(_) => 2,
            Self::Infeasible(_) => 3,
        }
    }
}
