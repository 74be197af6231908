//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix that must be symmetric has `entries[i][j] != entries[j][i]`.
    #[error("asymmetric input in {context}: entry ({i},{j}) = {a} but ({j},{i}) = {b}")]
    AsymmetricInput {
        context: &'static str,
        i: usize,
        j: usize,
        a: f64,
        b: f64,
    },

    /// A matrix entry is NaN or infinite.
    #[error("non-finite entry at ({i},{j}) in {context}")]
    NonFiniteEntry {
        context: &'static str,
        i: usize,
        j: usize,
    },

    /// Two matrices that must share an order do not.
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    /// Cholesky factorization hit a pivot at or below the positive-definiteness
    /// threshold. `which` names the offending matrix.
    #[error("matrix {which} is not positive definite (pivot {pivot:.3e} at row {row})")]
    NotPositiveDefinite {
        which: &'static str,
        row: usize,
        pivot: f64,
    },

    /// The Jacobi iteration did not reach its off-diagonal tolerance within the
    /// sweep cap. Never silent: callers must treat this as a hard failure.
    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal {offdiag:.3e})")]
    NoConvergence { sweeps: usize, offdiag: f64 },

    /// A restriction basis is linearly dependent (its Gram matrix has no
    /// Cholesky factor).
    #[error("restriction basis is linearly dependent")]
    DependentBasis,

    /// A problem generator received an invalid coefficient.
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    /// A grid or spec parameter is out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No eigenvalue of the slice pencil lies within the clustering tolerance
    /// of the requested point, or a supplied vector fails its residual check.
    #[error("({lambda}, {mu}) is not an eigenpoint within tolerance {tol:.3e}")]
    NotAnEigenpoint { lambda: f64, mu: f64, tol: f64 },

    /// Two points that must have distinct abscissae coincide.
    #[error("duplicate lambda value {0} (distinct values required)")]
    DuplicateLambda(f64),

    /// A superlevel threshold sits too close to the base spectrum for
    /// component counting to be well posed.
    #[error("level {level} lies within {tol:.3e} of base eigenvalue {nearest}")]
    LevelTooCloseToSpectrum { level: f64, nearest: f64, tol: f64 },

    /// The grid cannot certify the behaviour of an unbounded curve tail, so a
    /// component endpoint would lie beyond the traced window.
    #[error("grid too narrow: curve {curve} at the {side} edge has an undetermined tail (eta = {eta:.3e})")]
    GridTooNarrow {
        curve: usize,
        side: &'static str,
        eta: f64,
    },
}
