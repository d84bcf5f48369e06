use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension {dim} exceeds the dense propagator cap of {cap}")]
    Capacity { dim: usize, cap: usize },

    #[error("{message} (residual {residual:.3e}, step {step}, dimension {dim})")]
    Numerical {
        message: String,
        residual: f64,
        step: f64,
        dim: usize,
    },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Config { .. } | Error::Io(_) => 1,
            Error::Capacity { .. } | Error::Numerical { .. } => 2,
        }
    }
}
