use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A solver or self-check failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<parpolar::Error> for CliError {
    fn from(e: parpolar::Error) -> Self {
        use parpolar::Error as E;
        match e {
            E::Numerical(_) => CliError::Numerical(e.to_string()),
            E::Domain(_) | E::Argument(_) | E::Parse(_) | E::Json(_) => {
                CliError::Config(e.to_string())
            }
            E::Csv(_) | E::Io(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
