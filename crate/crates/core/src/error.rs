use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integration diverged at step {step}: non-finite state")]
    IntegrationDiverged { step: usize },

    #[error("constraint degeneracy at step {step}: saddle-point matrix is singular")]
    ConstraintDegeneracy { step: usize },

    #[error("kinematics error: {0}")]
    Kinematics(String),

    #[error("linearization error: {0}")]
    Linearization(String),

    #[error("eigenvalue error: {0}")]
    Eigen(String),

    #[error("no damped mode: every mode is rigid")]
    NoDampedMode,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("window error: {0}")]
    Window(String),

    #[error("training diverged at epoch {epoch}, iteration {iteration}")]
    TrainingDiverged { epoch: usize, iteration: usize },

    #[error("configuration error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn format(offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::IntegrationDiverged { .. } | Error::TrainingDiverged { .. } => 4,
            _ => 3,
        }
    }
}
