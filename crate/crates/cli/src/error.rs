use thiserror::Error;

/// Failure classes of the command-line tool, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<emtauc::Error> for CliError {
    fn from(e: emtauc::Error) -> Self {
        use emtauc::Error as E;
        match e {
            E::Parse { .. }
            | E::NonIncreasingIndex { .. }
            | E::MissingClass { .. }
            | E::ClassTooSmall { .. }
            | E::EmptyClass(_) => CliError::Data(e.to_string()),
            E::RateOutOfRange(_) | E::InvalidConfig(_) => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
