use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error(transparent)]
    Sim(#[from] tplcnn_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for bad configuration or inputs, 2 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Format { .. } => 1,
            CliError::Sim(tplcnn_core::Error::InvalidParameter(_))
            | CliError::Sim(tplcnn_core::Error::DimensionMismatch(_)) => 1,
            CliError::Io { .. } | CliError::Sim(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        use tplcnn_core::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Format { .. } => "format",
            CliError::Io { .. } => "io",
            CliError::Sim(E::CascadeOverflow { .. }) => "cascade-overflow",
            CliError::Sim(E::NumericalBlowup { .. }) => "numerical-blowup",
            CliError::Sim(E::InvalidParameter(_)) | CliError::Sim(E::DimensionMismatch(_)) => {
                "config"
            }
            CliError::Sim(_) => "runtime",
        }
    }

    /// One-line `error kind=<kind> code=<n> msg="<escaped>"` report.
    pub fn report(&self) -> Report<'_> {
        Report(self)
    }
}

pub struct Report<'a>(&'a CliError);

impl fmt::Display for Report<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = self.0.to_string();
        write!(
            f,
            "error kind={} code={} msg={:?}",
            self.0.kind(),
            self.0.exit_code(),
            msg
        )
    }
}
