//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature did not reach the requested tolerance. Carries the
    /// best estimate and the residual error bound so callers can decide
    /// whether the partial answer is still usable.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound} > tolerance {tolerance}")]
    QuadratureNonConvergence {
        estimate: f64,
        error_bound: f64,
        tolerance: f64,
    },

    /// Invalid model/experiment configuration (bad parameter combinations,
    /// truncation level with zero tail mass, memory caps, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was requested on a model kind that does not support it.
    #[error("unsupported for this model kind: {0}")]
    UnsupportedKind(String),

    /// An `InversePath` does not cover the requested integration window.
    #[error("path coverage error: {0}")]
    PathCoverage(String),

    /// Malformed manifest / CSV input.
    #[error("parse error: {0}")]
    Parse(String),

    /// Persisted file declares a schema we do not speak.
    #[error("schema version mismatch: file has {found}, this build expects {expected}")]
    SchemaVersion { found: u64, expected: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
