//! Error type shared across the crate.
//!
//! Variants are grouped by how the command-line tool reports them: input
//! problems (exit code 2), configuration problems (exit code 3), and numeric
//! failures during optimization (exit code 4).

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A data file could not be parsed. `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input data violated a documented requirement (bad label range,
    /// missing class, dimension mismatch, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A configuration value violated a documented requirement.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Optimization produced a non-finite quantity.
    #[error("numeric failure at iteration {iteration}: {msg}")]
    Numeric { iteration: usize, msg: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Model file does not start with the expected magic bytes.
    #[error("not a model file: bad magic")]
    BadMagic,

    /// Model file was written by an unsupported format version.
    #[error("unsupported model format version {found} (this build reads {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    /// Model file ends before the declared payload.
    #[error("model file truncated")]
    Truncated,

    /// Model file checksum does not match its contents.
    #[error("model file checksum mismatch")]
    ChecksumMismatch,
}

impl Error {
    /// Process exit code the command-line tool reports for this error:
    /// 2 for input problems, 3 for configuration, 4 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::InvalidData(_)
            | Error::Io(_)
            | Error::BadMagic
            | Error::UnsupportedVersion { .. }
            | Error::Truncated
            | Error::ChecksumMismatch => 2,
            Error::InvalidConfig(_) => 3,
            Error::Numeric { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
