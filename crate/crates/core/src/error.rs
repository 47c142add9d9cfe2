use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator and the verification layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input violates a domain invariant.
    #[error("{field}: {reason}")]
    Domain { field: String, reason: String },

    /// The particle came too close to a wall (or left the open interval).
    #[error("geometry error: particle at h = {h} is within {guard} of a wall")]
    Geometry { h: f64, guard: f64 },

    /// The linear solve or a state update produced a non-finite or singular result.
    #[error("numerical failure at t = {t}, h = {h}: {reason}")]
    Numerical { t: f64, h: f64, reason: String },

    /// Explicit reference solver step exceeded its diffusion stability limit.
    #[error("stability violation at step {step} (t = {t}): dt = {dt} exceeds limit {limit}")]
    Stability {
        step: usize,
        t: f64,
        dt: f64,
        limit: f64,
    },

    /// A hypothesis needed for a bound is not satisfied by the inputs.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("config parse error at `{path}`: {reason}")]
    Parse { path: String, reason: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
