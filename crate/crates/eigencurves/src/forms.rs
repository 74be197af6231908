//! Validated form triples `(a, b, m)` and the coercivity shift.
//!
//! A triple is admissible when `A` and `M` are symmetric positive definite
//! (coercivity and inner-product assumptions) while `B` is merely symmetric:
//! it may be indefinite, zero, or rank-deficient.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::pencil;

/// Sign classification of the `b` form, read off the eigenvalues of `(B, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BDefiniteness {
    /// All eigenvalues strictly positive.
    Positive,
    /// All eigenvalues strictly negative.
    Negative,
    /// Both signs present, none negligible.
    Indefinite,
    /// All eigenvalues negligible (`b = 0`).
    Zero,
    /// Some eigenvalues negligible alongside nonzero ones.
    DegenerateMixed,
}

impl BDefiniteness {
    pub fn as_str(self) -> &'static str {
        match self {
            BDefiniteness::Positive => "positive",
            BDefiniteness::Negative => "negative",
            BDefiniteness::Indefinite => "indefinite",
            BDefiniteness::Zero => "zero",
            BDefiniteness::DegenerateMixed => "degenerate-mixed",
        }
    }
}

/// Validation summary produced alongside a [`FormTriple`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Smallest eigenvalue of `(A, I)`: the coercivity constant against the
    /// Euclidean inner product of the ambient space.
    pub coercivity_lower: f64,
    /// Largest eigenvalue of `(A, I)`.
    pub coercivity_upper: f64,
    pub b_definiteness: BDefiniteness,
    /// Count of `(B, M)` eigenvalues above `1e-10 · max|β|` in magnitude.
    pub b_rank: usize,
}

/// The validated triple. Construction goes through [`validate`], so holders
/// can rely on symmetry, matching orders, and the definiteness of `A` and `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormTriple {
    a: SymMatrix,
    b: SymMatrix,
    m: SymMatrix,
}

impl FormTriple {
    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn b(&self) -> &SymMatrix {
        &self.b
    }

    pub fn m(&self) -> &SymMatrix {
        &self.m
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    /// `max(‖A‖_max, ‖B‖_max, ‖M‖_max, 1)`: the reference scale for every
    /// tolerance in the crate.
    pub fn scale(&self) -> f64 {
        self.a
            .max_abs()
            .max(self.b.max_abs())
            .max(self.m.max_abs())
            .max(1.0)
    }

    /// The slice pencil matrix `A − λB`.
    pub fn pencil_at(&self, lambda: f64) -> SymMatrix {
        self.a
            .add_scaled(-lambda, &self.b)
            .expect("validated triple has matching orders")
    }

    /// Quadratic form of `a`.
    pub fn quad_a(&self, u: &[f64]) -> f64 {
        self.a.quadratic(u)
    }

    /// Quadratic form of `b`.
    pub fn quad_b(&self, u: &[f64]) -> f64 {
        self.b.quadratic(u)
    }

    /// Quadratic form of `m`.
    pub fn quad_m(&self, u: &[f64]) -> f64 {
        self.m.quadratic(u)
    }
}

/// Validate `(A, B, M)` and classify `b`.
///
/// `A` must be positive definite (coercivity), `M` positive definite (inner
/// product); `B` is unconstrained in sign and may be degenerate. The report
/// carries the Euclidean coercivity window of `A` and the `(B, M)` sign
/// classification.
pub fn validate(a: SymMatrix, b: SymMatrix, m: SymMatrix) -> Result<(FormTriple, ValidationReport)> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::OrderMismatch {
            left: n,
            right: b.order(),
        });
    }
    if m.order() != n {
        return Err(Error::OrderMismatch {
            left: n,
            right: m.order(),
        });
    }
    pencil::cholesky_named(&a, "A")?;
    pencil::cholesky_named(&m, "M")?;

    let ident = SymMatrix::identity(n);
    let kappa = pencil::solve_pencil_values(&a, &ident)?;
    let coercivity_lower = kappa[0];
    let coercivity_upper = kappa[n - 1];

    let betas = pencil::solve_pencil_values(&b, &m)?;
    let beta_max = betas.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let tol = 1e-10 * beta_max;
    let pos = betas.iter().filter(|&&v| v > tol).count();
    let neg = betas.iter().filter(|&&v| v < -tol).count();
    let null = n - pos - neg;
    let b_definiteness = if beta_max == 0.0 || (pos == 0 && neg == 0) {
        BDefiniteness::Zero
    } else if null > 0 {
        BDefiniteness::DegenerateMixed
    } else if pos > 0 && neg > 0 {
        BDefiniteness::Indefinite
    } else if pos > 0 {
        BDefiniteness::Positive
    } else {
        BDefiniteness::Negative
    };

    Ok((
        FormTriple { a, b, m },
        ValidationReport {
            coercivity_lower,
            coercivity_upper,
            b_definiteness,
            b_rank: pos + neg,
        },
    ))
}

/// The shift `τ` making `a − λb + τm` dominate `½a` on a symmetric λ-window.
#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityShift {
    /// Half-width of the λ-window `[-r0, r0]`.
    pub r0: f64,
    /// Smallest `τ ≥ 0` (within `1e-8`) with
    /// `A − λB + τM ⪰ ½A` for `|λ| ≤ r0`.
    pub tau: f64,
}

/// Find the minimal shift by bisection.
///
/// Because `uᵀ(½A − λB + τM)u` is affine in `λ`, it suffices to enforce the
/// two window endpoints `λ = ±r0`. The bisection runs on
/// `f(τ) = min over endpoints of λ_min(½A − λB + τM, M)` up to a τ-tolerance
/// of `1e-8`.
pub fn coercivity_shift(triple: &FormTriple, r0: f64) -> Result<CoercivityShift> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "window half-width must be positive and finite, got {r0}"
        )));
    }
    let half_a = triple.a().scaled(0.5);
    let endpoint_min = |tau: f64| -> Result<f64> {
        let mut worst = f64::INFINITY;
        for lambda in [-r0, r0] {
            let p = half_a
                .add_scaled(-lambda, triple.b())?
                .add_scaled(tau, triple.m())?;
            let vals = pencil::solve_pencil_values(&p, triple.m())?;
            worst = worst.min(vals[0]);
        }
        Ok(worst)
    };

    let f0 = endpoint_min(0.0)?;
    if f0 >= 0.0 {
        return Ok(CoercivityShift { r0, tau: 0.0 });
    }
    let mut lo = 0.0;
    let mut hi = -f0 + 1.0;
    // Invariant: f(lo) < 0 <= f(hi). Shifting by τ moves every pencil
    // eigenvalue up by τ, so f(hi) >= f0 + hi = 1 > 0 up to roundoff.
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if endpoint_min(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CoercivityShift { r0, tau: hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_like_matrices() -> (SymMatrix, SymMatrix, SymMatrix) {
        let a = SymMatrix::from_rows(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ])
        .unwrap();
        let b = SymMatrix::from_rows(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 0.0],
        ])
        .unwrap();
        (a, b, SymMatrix::identity(3))
    }

    #[test]
    fn validate_matrix_example() {
        let (a, b, m) = paper_like_matrices();
        let (_, report) = validate(a, b, m).unwrap();
        assert_eq!(report.b_definiteness, BDefiniteness::Indefinite);
        assert_eq!(report.b_rank, 3);
        assert!(report.coercivity_lower > 0.0);
        assert!(report.coercivity_lower <= report.coercivity_upper);
    }

    #[test]
    fn validate_zero_b() {
        let (_, report) = validate(
            SymMatrix::identity(2),
            SymMatrix::zeros(2),
            SymMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(report.b_definiteness, BDefiniteness::Zero);
        assert_eq!(report.b_rank, 0);
    }

    #[test]
    fn validate_rejects_indefinite_a() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let err = validate(a, SymMatrix::zeros(2), SymMatrix::identity(2)).unwrap_err();
        match err {
            Error::NotPositiveDefinite { which: "A", .. } => {}
            other => panic!("expected NotPositiveDefinite(A), got {other:?}"),
        }
    }

    #[test]
    fn validate_is_idempotent() {
        let (a, b, m) = paper_like_matrices();
        let (t1, r1) = validate(a, b, m).unwrap();
        let (_, r2) = validate(t1.a().clone(), t1.b().clone(), t1.m().clone()).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn coercivity_window_bounds_quadratic_form() {
        let (a, b, m) = paper_like_matrices();
        let (triple, report) = validate(a, b, m).unwrap();
        // κ₁‖u‖² ≤ u'Au ≤ κ₂‖u‖² on a deterministic sample of directions.
        let mut x = 0.123_f64;
        for _ in 0..100 {
            let u: Vec<f64> = (0..3)
                .map(|_| {
                    x = (x * 16807.0).fract() * 2.0 - 1.0;
                    x
                })
                .collect();
            let nn: f64 = u.iter().map(|v| v * v).sum();
            if nn == 0.0 {
                continue;
            }
            let q = triple.quad_a(&u);
            assert!(q >= report.coercivity_lower * nn - 1e-10);
            assert!(q <= report.coercivity_upper * nn + 1e-10);
        }
    }

    #[test]
    fn shift_zero_when_b_vanishes() {
        let (triple, _) = validate(
            SymMatrix::identity(3),
            SymMatrix::zeros(3),
            SymMatrix::identity(3),
        )
        .unwrap();
        let shift = coercivity_shift(&triple, 5.0).unwrap();
        assert_eq!(shift.tau, 0.0);
    }

    #[test]
    fn shift_zero_inside_coercive_window() {
        // b = m scaled by 1; A diagonal so the smallest (A, M) eigenvalue is
        // explicit. With r0 = μ₀₁/4 the unshifted window already dominates.
        let a = SymMatrix::from_diag(&[4.0, 6.0, 10.0]);
        let m = SymMatrix::identity(3);
        let b = m.clone();
        let (triple, _) = validate(a, b, m).unwrap();
        let shift = coercivity_shift(&triple, 1.0).unwrap();
        assert_eq!(shift.tau, 0.0);
    }

    #[test]
    fn shift_is_minimal_on_matrix_example() {
        let (a, b, m) = paper_like_matrices();
        let (triple, _) = validate(a, b, m).unwrap();
        let r0 = 10.0;
        let shift = coercivity_shift(&triple, r0).unwrap();
        assert!(shift.tau > 0.0);

        let endpoint_min = |tau: f64| {
            let half_a = triple.a().scaled(0.5);
            [-r0, r0]
                .iter()
                .map(|&l| {
                    let p = half_a
                        .add_scaled(-l, triple.b())
                        .unwrap()
                        .add_scaled(tau, triple.m())
                        .unwrap();
                    pencil::solve_pencil_values(&p, triple.m()).unwrap()[0]
                })
                .fold(f64::INFINITY, f64::min)
        };
        let at_tau = endpoint_min(shift.tau);
        assert!(at_tau >= -1e-10, "shifted pencil min {at_tau}");
        assert!(at_tau <= 1e-6, "shift not tight: min {at_tau}");
        assert!(endpoint_min(shift.tau - 1e-6) < -1e-10);
    }
}
