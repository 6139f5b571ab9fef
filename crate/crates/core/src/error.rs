use thiserror::Error;

/// Errors produced by the simulation and estimation stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("collision domain: gap {gap} m is not positive")]
    Collision { gap: f64 },

    #[error("history buffer is empty")]
    EmptyHistory,

    #[error("degenerate landmark frame {frame}: {reason}")]
    DegenerateFrame { frame: u64, reason: String },

    #[error("controller state used before initialization")]
    Uninitialized,

    #[error("non-finite value in `{field}` at step {step}")]
    NonFinite { step: usize, field: &'static str },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
