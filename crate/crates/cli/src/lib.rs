//! Front end for the `ewl` laboratory.
//!
//! A run is a flat [`RunConfig`] plus a command. Each command resolves its
//! parameters (recording defaults), calls into `ewl`, and writes report files
//! under an output directory. Every file starts with a metadata header
//! carrying the schema version, the tool version and the resolved
//! parameters, so two runs with the same configuration and seed produce
//! byte-identical files.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod params;

use std::io;
use std::path::PathBuf;

pub use config::RunConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid parameter `{param}`: {message}")]
    Invalid { param: String, message: String },

    #[error(transparent)]
    Lab(#[from] ewl::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("acceptance criterion {id} failed: {detail}")]
    Acceptance { id: u8, detail: String },
}

impl CliError {
    pub fn invalid(param: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Invalid {
            param: param.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> CliError {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 2 validation, 3 I/O, 4 acceptance failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::Lab(ewl::Error::Io(_)) | CliError::Io { .. } => 3,
            CliError::Lab(_) => 2,
            CliError::Acceptance { .. } => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
