//! Two-parameter spectral analysis for symmetric form triples.
//!
//! A triple of symmetric bilinear forms `(a, b, m)` on a finite-dimensional
//! space — `a` coercive, `m` an inner product, `b` free to change sign or
//! degenerate — induces the eigenpoint equation
//!
//! ```text
//! a(u, v) = λ b(u, v) + μ m(u, v)   for all v
//! ```
//!
//! For each fixed `λ` the admissible `μ` values are the ascending eigenvalues
//! of the matrix pencil `(A − λB, M)`; sweeping `λ` traces the eigencurves
//! `μ_n(λ)`. This crate builds such triples (matrix, finite-difference,
//! finite-element, and synthetic generators), traces the curves, and analyzes
//! their structure: orthogonality of eigenvectors, Lipschitz bounds, one-sided
//! derivatives at crossings, asymptotic slopes, straight lines arising from a
//! degenerate `b`, and counts of superlevel-set components.

pub mod analysis;
pub mod curves;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod matrix;
pub mod pencil;
pub mod problems;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{CholeskyFactor, SymMatrix};
pub use pencil::EigenDecomposition;
