use flywheel_core::FlywheelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(FlywheelError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 usage, 3 configuration, 4 numerical, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}

impl From<FlywheelError> for CliError {
    fn from(e: FlywheelError) -> Self {
        match e {
            FlywheelError::Config(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}
