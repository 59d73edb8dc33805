use std::fmt;

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, invalid configuration or spec, unreadable inputs (exit 2).
    Usage(anyhow::Error),
    /// Failure while running the pipeline (exit 1).
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn usage(e: impl Into<anyhow::Error>) -> Self {
        Self::Usage(e.into())
    }

    pub fn runtime(e: impl Into<anyhow::Error>) -> Self {
        Self::Runtime(e.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(e) | Self::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Classifies library errors: configuration and spec problems are usage
/// errors, everything else is a runtime failure.
impl From<qmseg_core::Error> for CliError {
    fn from(e: qmseg_core::Error) -> Self {
        use qmseg_core::Error as E;
        match e {
            E::Config(_) | E::Spec(_) | E::TooLarge { .. } => Self::Usage(e.into()),
            _ => Self::Runtime(e.into()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
