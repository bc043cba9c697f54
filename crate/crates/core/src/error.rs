use thiserror::Error;

use crate::data::DataError;
use crate::eval::EvalError;
use crate::infotheory::InfoError;
use crate::scenarios::ScenarioError;
use crate::sieve::SieveError;
use crate::synth::SynthError;
use crate::transforms::TransformError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error. Each variant maps onto a stable process exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_EMPTY_COHORT: i32 = 5;
pub const EXIT_COVERAGE: i32 = 6;

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code for this error: 2 config, 3 I/O, 4 degenerate data,
    /// 5 empty cohort, 6 prediction coverage.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => EXIT_IO,
            Error::Config(_) => EXIT_CONFIG,
            Error::Degenerate(_) => EXIT_DEGENERATE,
            Error::Data(e) if e.is_io() => EXIT_IO,
            Error::Data(_) => EXIT_CONFIG,
            Error::Info(_) => EXIT_DEGENERATE,
            Error::Sieve(SieveError::Io { .. }) => EXIT_IO,
            Error::Sieve(_) => EXIT_DEGENERATE,
            Error::Scenario(e) => e.exit_code(),
            Error::Transform(e) => e.exit_code(),
            Error::Eval(e) => e.exit_code(),
            Error::Synth(_) => EXIT_CONFIG,
        }
    }
}
