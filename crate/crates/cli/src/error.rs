use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] hvlab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} acceptance criteria failed")]
    Acceptance(usize),
}

impl CliError {
    /// 2 for configuration problems, 3 for failed acceptance, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Lib(hvlab::Error::Config(_) | hvlab::Error::Input(_)) => 2,
            CliError::Acceptance(_) => 3,
            CliError::Lib(_) | CliError::Io(_) => 1,
        }
    }
}
