use std::path::PathBuf;

use crate::numerics::ComplexVector;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input violates a documented precondition (shape, Hermitian symmetry,
    /// unit modulus, config ranges).
    #[error("validation error: {0}")]
    Validation(String),

    /// Input is well-formed but outside the mathematical domain of the
    /// operation (non-positive-definite matrix, zero RIS-BS channel, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method ran out of iterations. The best iterate is kept so
    /// callers can decide whether it is good enough.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        eigenvalue: f64,
        eigenvector: ComplexVector,
    },

    /// A per-drop bound check failed during an experiment.
    #[error("bound violation at drop {drop} (seed {seed}): {method} rate {rate} exceeds upper bound {bound}")]
    BoundViolation {
        drop: usize,
        seed: u64,
        method: String,
        rate: f64,
        bound: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
