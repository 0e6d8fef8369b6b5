use std::path::PathBuf;

use smc_atmd_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Self::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 0 success, 2 validation, 3 infeasible tuning, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } | Self::Parse { .. } | Self::Validation(_) => 2,
            Self::Core(e) => match e {
                CoreError::Infeasible => 3,
                CoreError::InvalidParameter { .. }
                | CoreError::LengthMismatch { .. }
                | CoreError::CoincidentModes { .. }
                | CoreError::ModeOutOfRange { .. }
                | CoreError::Uncontrollable { .. }
                | CoreError::NonConjugatePoles
                | CoreError::Accelerogram(_)
                | CoreError::EmptyWindow { .. } => 2,
                CoreError::Eigen(_)
                | CoreError::UnscalableMode
                | CoreError::SingularTransform { .. }
                | CoreError::UndefinedZero(_)
                | CoreError::Riccati(_)
                | CoreError::NoComplexPair
                | CoreError::Diverged { .. } => 4,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
