//! Error type shared across the crate.

use std::fmt;

/// Convenience alias used by all fallible operations.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by configuration validation, I/O, and metrics.
#[derive(Debug)]
pub enum Error {
    /// Underlying file-system failure.
    Io(std::io::Error),
    /// Image decoding or encoding failure.
    Image(image::ImageError),
    /// A configuration value or argument violates its documented range.
    InvalidParameter(String),
    /// Two rasters that must share a shape do not.
    DimensionMismatch {
        expected: (usize, usize, usize),
        actual: (usize, usize, usize),
    },
    /// The image is smaller than the operation's minimum supported size.
    TooSmall {
        required: usize,
        width: usize,
        height: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Image(e) => write!(f, "image codec error: {e}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DimensionMismatch { expected, actual } => write!(
                f,
                "dimension mismatch: expected {}x{}x{}, got {}x{}x{}",
                expected.0, expected.1, expected.2, actual.0, actual.1, actual.2
            ),
            Error::TooSmall {
                required,
                width,
                height,
            } => write!(
                f,
                "image {width}x{height} is smaller than the required minimum side {required}"
            ),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Image(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<image::ImageError> for Error {
    fn from(e: image::ImageError) -> Self {
        Error::Image(e)
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::InvalidParameter(format!("csv serialization failed: {other:?}")),
        }
    }
}
