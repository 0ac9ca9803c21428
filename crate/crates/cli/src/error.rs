use unitrace_core::Error as CoreError;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or invalid input data.
    #[error("{0}")]
    Input(String),
    /// Invalid command-line parameters.
    #[error("{0}")]
    Param(String),
    #[error("{0}")]
    Alignment(String),
    #[error("no series matches the query")]
    NoMatch,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Param(_) => 3,
            CliError::Alignment(_) => 4,
            CliError::NoMatch => 5,
        }
    }

    pub fn param(message: impl Into<String>) -> Self {
        CliError::Param(message.into())
    }

    /// Classifies a core error raised while reading input data.
    pub fn from_input(err: CoreError) -> Self {
        match err {
            CoreError::Alignment(m) => CliError::Alignment(m),
            other => CliError::Input(other.to_string()),
        }
    }

    /// Classifies a core error raised while running an analysis.
    pub fn from_analysis(err: CoreError) -> Self {
        match err {
            CoreError::Bounds { .. } | CoreError::Config(_) => CliError::Param(err.to_string()),
            CoreError::Alignment(m) => CliError::Alignment(m),
            other => CliError::Input(other.to_string()),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }
}

pub type CliResult<T> = Result<T, CliError>;
