use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("input too short: {len} samples, need at least {needed}")]
    InputTooShort { len: usize, needed: usize },
    #[error("invalid microphone pair ({0}, {1})")]
    InvalidPair(usize, usize),
    #[error("invalid angle {0} deg, expected [0, 180]")]
    InvalidAngle(f64),
    #[error("empty angle grid")]
    EmptyGrid,
    #[error("no microphone pairs available for spatial features")]
    NoPairs,
    #[error("mask energy underflow at frequency bin {bin}")]
    DegenerateMask { bin: usize },
    #[error("interference PSD not invertible at frequency bin {bin}")]
    SingularPsd { bin: usize },
    #[error("trace of the MVDR numerator vanishes at frequency bin {bin}")]
    DegenerateTrace { bin: usize },
    #[error("length mismatch: {0} vs {1} samples")]
    LengthMismatch(usize, usize),
    #[error("reference signal is all zero")]
    ZeroReference,
    #[error("{0} source has zero energy on the reference channel")]
    SilentSource(&'static str),
    #[error("missing input for {method}: {what}")]
    MissingInput { method: String, what: String },

    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt file at byte {offset}: {reason}")]
    CorruptFile { offset: u64, reason: String },
    #[error("bad BTF magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported BTF dtype {0}")]
    UnsupportedDtype(u8),
    #[error("BTF dims mismatch: {0}")]
    DimsMismatch(String),
    #[error("truncated BTF payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::MissingInput { .. } | Error::InvalidConfig(_) => ErrorClass::Usage,
            Error::DegenerateMask { .. }
            | Error::SingularPsd { .. }
            | Error::DegenerateTrace { .. } => ErrorClass::Numerical,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
