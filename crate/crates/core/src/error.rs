use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Reading or writing a file failed at the OS level.
    Io,
    /// An input file was malformed.
    Format,
    /// Inputs parsed fine but violate a numeric or statistical precondition.
    Validation,
    /// A configuration value or flag is out of its domain.
    Usage,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("bad magic at byte 0: expected \"MAE1\", found {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported MAE format version {found:?} at byte 3 (only \"1\" is supported)")]
    VersionMismatch { found: char },

    #[error("truncated file while reading {what} at byte {offset}: expected {expected} bytes, found {actual}")]
    Truncated {
        what: &'static str,
        offset: u64,
        expected: u64,
        actual: u64,
    },

    #[error("{extra} unexpected trailing bytes after payload ending at byte {offset}")]
    TrailingBytes { offset: u64, extra: u64 },

    #[error("id of row {row} at byte {offset} is not valid UTF-8")]
    InvalidUtf8Id { row: usize, offset: u64 },

    #[error("id of row {row} is empty")]
    EmptyId { row: usize },

    #[error("id of row {row} is {len} bytes long, the limit is 65535")]
    IdTooLong { row: usize, len: usize },

    #[error("duplicate id {id:?} at row {row} (first seen at row {first_row})")]
    DuplicateId {
        id: String,
        row: usize,
        first_row: usize,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("embedding dimension must be positive")]
    ZeroDimension,

    #[error("matrix shape mismatch: {rows} ids, dim {dim}, but {len} values")]
    ShapeMismatch { rows: usize, dim: usize, len: usize },

    #[error("dimension mismatch: {context} has dim {found}, expected {expected}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("prompt file must hold exactly two rows with ids \"pos\" and \"neg\": {reason}")]
    BadPromptFile { reason: String },

    #[error("{path}: missing or wrong header, expected `{expected}`")]
    MissingHeader { path: String, expected: &'static str },

    #[error("{path}: row {row}: duplicate id {id:?}")]
    DuplicateRowId { path: String, row: u64, id: String },

    #[error("{path}: row {row}, column {column}: cannot parse {value:?}")]
    ParseField {
        path: String,
        row: u64,
        column: &'static str,
        value: String,
    },

    #[error("{path}: row {row}: {message}")]
    BadRow {
        path: String,
        row: u64,
        message: String,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: String, message: String },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("vector is empty")]
    EmptyVector,

    #[error("vector norm {norm:e} is below the minimum {min:e}")]
    ZeroNorm { norm: f64, min: f64 },

    #[error("non-finite input {what}")]
    NonFiniteInput { what: &'static str },

    #[error("Box-Cox input must be non-negative, got {0}")]
    NegativeInput(f64),

    #[error("fixed weights ({w_sim}, {w_mag}) are not on the unit simplex")]
    NotOnSimplex { w_sim: f64, w_mag: f64 },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("zero variance in {what}")]
    ZeroVariance { what: &'static str },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("prompt embeddings are required for mode {mode}")]
    PromptsRequired { mode: &'static str },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            Io { .. } => ErrorCategory::Io,
            BadMagic { .. }
            | VersionMismatch { .. }
            | Truncated { .. }
            | TrailingBytes { .. }
            | InvalidUtf8Id { .. }
            | EmptyId { .. }
            | DuplicateId { .. }
            | NonFinite { .. }
            | ZeroDimension
            | BadPromptFile { .. }
            | MissingHeader { .. }
            | DuplicateRowId { .. }
            | ParseField { .. }
            | BadRow { .. }
            | Csv { .. } => ErrorCategory::Format,
            InvalidConfig(_) | NotOnSimplex { .. } | PromptsRequired { .. } => ErrorCategory::Usage,
            IdTooLong { .. }
            | ShapeMismatch { .. }
            | DimensionMismatch { .. }
            | LengthMismatch { .. }
            | EmptyVector
            | ZeroNorm { .. }
            | NonFiniteInput { .. }
            | NegativeInput(_)
            | InsufficientSamples { .. }
            | ZeroVariance { .. } => ErrorCategory::Validation,
        }
    }
}
