use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Image or kernel dimensions do not fit the operation.
    #[error("shape error: {0}")]
    Shape(String),
    /// Filter construction failed.
    #[error("design error: {0}")]
    Design(String),
    /// The padding scheme cannot cover the requested kernel footprint.
    #[error("unsupported geometry: {0}")]
    Geometry(String),
    /// Malformed input bytes or text.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite, got {x}")))
    }
}
