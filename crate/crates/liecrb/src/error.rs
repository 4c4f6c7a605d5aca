//! Error types shared across the toolkit.

use nalgebra::DMatrix;
use thiserror::Error;

/// Errors raised by group primitives, curvature/Fisher computations, bound
/// evaluation and the Monte Carlo harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: String, right: String },

    #[error(
        "matrix is not in the Lie algebra subspace (residual {residual:.3e} > {tolerance:.1e})"
    )]
    NotInAlgebra { residual: f64, tolerance: f64 },

    #[error("matrix violates the group constraint (residual {residual:.3e} > {tolerance:.1e})")]
    NotInGroup { residual: f64, tolerance: f64 },

    #[error("logarithm outside principal domain: rotation angle {angle:.9} >= {limit:.9}")]
    LogBranchCut { angle: f64, limit: f64 },

    #[error("operation `{operation}` is not supported on group {group}")]
    UnsupportedGroup {
        group: String,
        operation: &'static str,
    },

    #[error("unknown group `{name}` (expected so3, se3, se2 or abelian<n>)")]
    UnknownGroup { name: String },

    #[error("empty sample list")]
    EmptySamples,

    #[error("matrix is not symmetric (residual {residual:.3e} > {tolerance:.1e})")]
    AsymmetricMatrix { residual: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error(
        "information matrix is singular (min eigenvalue {min_eigenvalue:.3e}); \
         {} unobservable direction(s)", null_directions.len()
    )]
    SingularInformation {
        /// Orthonormal basis of the (numerical) null space, one coordinate
        /// vector per unobservable direction.
        null_directions: Vec<Vec<f64>>,
        min_eigenvalue: f64,
    },

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    ConvergenceFailure {
        iterations: usize,
        residual: f64,
        last_iterate: DMatrix<f64>,
    },

    #[error("degenerate problem: {reason}")]
    DegenerateProblem { reason: String },

    #[error("invalid parameter: {what}")]
    InvalidParameter { what: String },

    #[error("trial {index} failed: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
