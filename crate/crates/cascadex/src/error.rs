use thiserror::Error;

/// Errors surfaced by validation, solvers, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A pmf failed its invariants (negative entry, bad normalization, empty).
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    /// Alphabet sizes of two objects do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A scalar argument lies outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The instance is outside what an exhaustive method can handle.
    #[error("unsupported instance: {0}")]
    Unsupported(String),

    /// A configuration failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A file had the right syntax but the wrong shape or fields.
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
