//! Error types shared across the solver crates.

use thiserror::Error;

/// Errors produced by solvers and steppers.
#[derive(Debug, Error)]
pub enum SolverError {
    /// A field was passed to an operator built for a different grid.
    #[error("grid mismatch: operator grid {expected}, field grid {found}")]
    GridMismatch { expected: String, found: String },

    /// An iterative linear solve stopped before reaching its tolerance.
    #[error(
        "linear solve failed to converge: achieved relative residual {achieved:.3e} \
         (target {target:.3e}) after {iterations} iterations"
    )]
    SolveFailure {
        achieved: f64,
        target: f64,
        iterations: usize,
    },

    /// The scalar equation for the auxiliary variable is (numerically) singular.
    #[error("degenerate auxiliary-variable update: denominator {denominator:.3e}")]
    DegenerateAuxiliary { denominator: f64 },

    /// The Neumann pressure Poisson problem received an incompatible right-hand side.
    #[error("pressure Poisson compatibility violated: mean fraction {fraction:.3e}")]
    PoissonIncompatible { fraction: f64 },

    /// A field or checkpoint file could not be read or written.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A field or checkpoint file had unexpected contents.
    #[error("parse error: {0}")]
    Parse(String),

    /// Invalid configuration (non-positive step size, bad grid, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
