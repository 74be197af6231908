//! Dense symmetric-definite generalized eigensolver.
//!
//! Solves `S v = μ M v` for symmetric `S` and symmetric positive definite `M`
//! by reducing to standard form through the Cholesky factor of `M` and running
//! cyclic Jacobi rotations. Everything else in the crate reduces to this
//! solver.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, CholeskyFactor, SymMatrix};

/// Relative off-diagonal Frobenius tolerance for the Jacobi sweep.
const JACOBI_TOL: f64 = 1e-13;
/// Hard cap on Jacobi sweeps; quadratic convergence makes this generous, and a
/// breach is reported as an error, never silently accepted.
const JACOBI_MAX_SWEEPS: usize = 64;
/// Scale factor for the positive-definiteness pivot threshold:
/// a pivot `<= order * PIVOT_REL * max_abs` fails the factorization.
const PIVOT_REL: f64 = 1e-14;

/// Full eigendecomposition of a symmetric-definite pencil.
///
/// `values` ascend; `vectors[j]` is the eigenvector for `values[j]`,
/// M-orthonormal (`v_iᵀ M v_j = δ_ij`). For restricted solves the vectors are
/// mapped back to full-space coordinates and there are as many pairs as basis
/// vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cholesky factorization `M = L·Lᵀ` with a scale-invariant pivot threshold.
///
/// A pivot at or below `order · 1e-14 · max|M|` reports `NotPositiveDefinite`,
/// which downstream code reads as a violated definiteness assumption.
pub fn cholesky(m: &SymMatrix) -> Result<CholeskyFactor> {
    cholesky_named(m, "M")
}

pub(crate) fn cholesky_named(m: &SymMatrix, which: &'static str) -> Result<CholeskyFactor> {
    let n = m.order();
    let threshold = n as f64 * PIVOT_REL * m.max_abs();
    let mut lower = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= lower[j * n + k] * lower[j * n + k];
        }
        if d <= threshold {
            return Err(Error::NotPositiveDefinite {
                which,
                row: j,
                pivot: d,
            });
        }
        let ljj = d.sqrt();
        lower[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= lower[i * n + k] * lower[j * n + k];
            }
            lower[i * n + j] = s / ljj;
        }
    }
    Ok(CholeskyFactor::new(n, lower))
}

/// Solve the full pencil `S v = μ M v`.
///
/// Values come back ascending with a stable tie-break on the pre-sort Jacobi
/// column index, so identical inputs give bit-identical outputs.
pub fn solve_pencil(s: &SymMatrix, m: &SymMatrix) -> Result<EigenDecomposition> {
    solve_impl(s, m, true)
}

/// Eigenvalues of the pencil only. Same rotation sequence as
/// [`solve_pencil`], skipping vector accumulation and back-substitution.
pub fn solve_pencil_values(s: &SymMatrix, m: &SymMatrix) -> Result<Vec<f64>> {
    Ok(solve_impl(s, m, false)?.values)
}

fn solve_impl(s: &SymMatrix, m: &SymMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    let n = s.order();
    if n != m.order() {
        return Err(Error::OrderMismatch {
            left: n,
            right: m.order(),
        });
    }
    let l = cholesky(m)?;

    // Ŝ = L⁻¹ S L⁻ᵀ: forward-solve the columns, then the rows.
    let mut work = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        for i in 0..n {
            col[i] = s.get(i, j);
        }
        l.forward_solve(&mut col);
        for i in 0..n {
            work[i * n + j] = col[i];
        }
    }
    for i in 0..n {
        col.copy_from_slice(&work[i * n..(i + 1) * n]);
        l.forward_solve(&mut col);
        work[i * n..(i + 1) * n].copy_from_slice(&col);
    }
    // Symmetrize to remove rounding drift before the rotations.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (work[i * n + j] + work[j * n + i]);
        }
    }

    let (mut values, q) = jacobi(&mut a, n, want_vectors)?;

    let mut vectors = Vec::new();
    if want_vectors {
        let q = q.expect("vectors requested");
        vectors = (0..n)
            .map(|j| {
                let mut v: Vec<f64> = (0..n).map(|i| q[i * n + j]).collect();
                l.back_solve_transpose(&mut v);
                v
            })
            .collect();
    }

    // Ascending stable sort keyed on (value, original column index).
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite eigenvalues"));
    values = idx.iter().map(|&i| values[i]).collect();
    if want_vectors {
        vectors = idx.iter().map(|&i| vectors[i].clone()).collect();
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Cyclic Jacobi on a dense symmetric matrix in full storage. Returns the
/// diagonal and, when requested, the accumulated rotation matrix whose columns
/// are eigenvectors of the input.
fn jacobi(a: &mut [f64], n: usize, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let norm_ref = a.iter().map(|&v| v * v).sum::<f64>().sqrt();
    let tol = JACOBI_TOL * norm_ref;
    let mut q = if want_vectors {
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        Some(q)
    } else {
        None
    };

    let mut offdiag = off_frobenius(a, n);
    if n <= 1 {
        return Ok(((0..n).map(|i| a[i * n + i]).collect(), q));
    }
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if offdiag <= tol {
            return Ok(((0..n).map(|i| a[i * n + i]).collect(), q));
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apr = a[p * n + r];
                if apr == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let arr = a[r * n + r];
                let theta = (arr - app) / (2.0 * apr);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;

                a[p * n + p] = app - t * apr;
                a[r * n + r] = arr + t * apr;
                a[p * n + r] = 0.0;
                a[r * n + p] = 0.0;
                for i in 0..n {
                    if i == p || i == r {
                        continue;
                    }
                    let aip = a[i * n + p];
                    let air = a[i * n + r];
                    let new_p = c * aip - sn * air;
                    let new_r = sn * aip + c * air;
                    a[i * n + p] = new_p;
                    a[p * n + i] = new_p;
                    a[i * n + r] = new_r;
                    a[r * n + i] = new_r;
                }
                if let Some(q) = q.as_mut() {
                    for i in 0..n {
                        let qip = q[i * n + p];
                        let qir = q[i * n + r];
                        q[i * n + p] = c * qip - sn * qir;
                        q[i * n + r] = sn * qip + c * qir;
                    }
                }
            }
        }
        offdiag = off_frobenius(a, n);
    }
    if offdiag <= tol {
        return Ok(((0..n).map(|i| a[i * n + i]).collect(), q));
    }
    Err(Error::NoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
        offdiag,
    })
}

fn off_frobenius(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    s.sqrt()
}

/// Eigendecomposition of the pencil restricted to `span(basis)`.
///
/// Solves `(ZᵀSZ) c = β (ZᵀMZ) c` where `Z` stacks the basis vectors, then
/// maps the coefficient vectors back to full-space vectors (M-orthonormal).
/// A basis whose M-Gram matrix has no Cholesky factor is rejected as
/// `DependentBasis`.
pub fn restricted_pencil(
    s: &SymMatrix,
    m: &SymMatrix,
    basis: &[Vec<f64>],
) -> Result<EigenDecomposition> {
    let n = s.order();
    if n != m.order() {
        return Err(Error::OrderMismatch {
            left: n,
            right: m.order(),
        });
    }
    let k = basis.len();
    if k == 0 {
        return Err(Error::InvalidParameter("empty restriction basis".into()));
    }
    for z in basis {
        if z.len() != n {
            return Err(Error::OrderMismatch {
                left: n,
                right: z.len(),
            });
        }
    }

    let s_cols: Vec<Vec<f64>> = basis.iter().map(|z| s.mat_vec(z)).collect();
    let m_cols: Vec<Vec<f64>> = basis.iter().map(|z| m.mat_vec(z)).collect();
    let s_r = SymMatrix::from_fn_sym(k, |i, j| dot(&basis[i], &s_cols[j]));
    let m_r = SymMatrix::from_fn_sym(k, |i, j| dot(&basis[i], &m_cols[j]));

    // Probe the restricted Gram matrix first so dependence is reported as
    // such rather than as a generic definiteness failure.
    if cholesky(&m_r).is_err() {
        return Err(Error::DependentBasis);
    }

    let dec = solve_impl(&s_r, &m_r, true)?;
    let vectors = dec
        .vectors
        .iter()
        .map(|c| {
            let mut v = vec![0.0; n];
            for (coef, z) in c.iter().zip(basis) {
                for (vi, zi) in v.iter_mut().zip(z) {
                    *vi += coef * zi;
                }
            }
            v
        })
        .collect();
    Ok(EigenDecomposition {
        values: dec.values,
        vectors,
    })
}

/// Max-norm of `VᵀMV − I`; the orthonormality defect of a decomposition.
pub fn orthonormality_defect(dec: &EigenDecomposition, m: &SymMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    let m_cols: Vec<Vec<f64>> = dec.vectors.iter().map(|v| m.mat_vec(v)).collect();
    for (i, vi) in dec.vectors.iter().enumerate() {
        for (j, mc) in m_cols.iter().enumerate() {
            let g = dot(vi, mc);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Worst per-column residual `‖S v − μ M v‖₂` normalized by
/// `(‖S‖_max + |μ|·‖M‖_max)·‖v‖₂`.
pub fn residual_defect(dec: &EigenDecomposition, s: &SymMatrix, m: &SymMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for (v, &mu) in dec.vectors.iter().zip(&dec.values) {
        let sv = s.mat_vec(v);
        let mv = m.mat_vec(v);
        let r: Vec<f64> = sv.iter().zip(&mv).map(|(&a, &b)| a - mu * b).collect();
        let denom = (s.max_abs() + mu.abs() * m.max_abs()).max(f64::MIN_POSITIVE) * norm2(v);
        worst = worst.max(norm2(&r) / denom);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, off: f64, diag: f64) -> SymMatrix {
        SymMatrix::from_fn_sym(n, |i, j| {
            if i == j {
                diag
            } else if j == i + 1 {
                off
            } else {
                0.0
            }
        })
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky(&SymMatrix::identity(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(l.get(i, j), expect);
            }
        }
    }

    #[test]
    fn cholesky_two_by_two() {
        // [[4,2],[2,5]] factors as [[2,0],[1,2]]; verified by L·Lᵀ below.
        let m = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let l = cholesky(&m).unwrap();
        assert!((l.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((l.get(1, 0) - 1.0).abs() < 1e-15);
        assert!((l.get(1, 1) - 2.0).abs() < 1e-15);
        let r = l.reconstruct();
        let tol = 1e-12 * m.max_abs();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r.get(i, j) - m.get(i, j)).abs() <= tol);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        // determinant 1 - 4 = -3 < 0
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        match cholesky(&m).unwrap_err() {
            Error::NotPositiveDefinite { .. } => {}
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn identity_pencil() {
        let dec = solve_pencil(&SymMatrix::identity(3), &SymMatrix::identity(3)).unwrap();
        assert_eq!(dec.values, vec![1.0, 1.0, 1.0]);
        for (j, v) in dec.vectors.iter().enumerate() {
            for (i, &x) in v.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((x - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tridiagonal_closed_form() {
        // Eigenvalues of tridiag(-1, 2, -1) of order 3 are 2 - 2cos(kπ/4).
        let a = tridiag(3, -1.0, 2.0);
        let dec = solve_pencil(&a, &SymMatrix::identity(3)).unwrap();
        let sqrt2 = std::f64::consts::SQRT_2;
        let expect = [2.0 - sqrt2, 2.0, 2.0 + sqrt2];
        for (got, want) in dec.values.iter().zip(expect) {
            assert!((got - want).abs() < 1e-13, "got {got}, want {want}");
        }
        assert!(residual_defect(&dec, &a, &SymMatrix::identity(3)) <= 1e-9);
        assert!(orthonormality_defect(&dec, &SymMatrix::identity(3)) <= 1e-10);
    }

    /// Bisection on a cubic with sign changes bracketed by a coarse scan.
    /// Used as an independent eigenvalue oracle for 3x3 problems.
    pub(crate) fn cubic_roots_bisect(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
        let f = |t: f64| ((c3 * t + c2) * t + c1) * t + c0;
        let (lo, hi) = (-100.0, 100.0);
        let steps = 200_000;
        let h = (hi - lo) / steps as f64;
        let mut roots = Vec::new();
        let mut prev = f(lo);
        for k in 1..=steps {
            let x = lo + k as f64 * h;
            let cur = f(x);
            if prev == 0.0 {
                roots.push(lo + (k - 1) as f64 * h);
            } else if prev * cur < 0.0 {
                let (mut a, mut b) = (lo + (k - 1) as f64 * h, x);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if f(a) * f(m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            prev = cur;
        }
        roots
    }

    #[test]
    fn cubic_oracle_matches_jacobi() {
        // B = [[2,-1,0],[-1,2,-1],[0,-1,0]]: characteristic cubic t³-4t²+2t+2.
        let b = SymMatrix::from_rows(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 0.0],
        ])
        .unwrap();
        let oracle = cubic_roots_bisect(1.0, -4.0, 2.0, 2.0);
        assert_eq!(oracle.len(), 3);
        let dec = solve_pencil(&b, &SymMatrix::identity(3)).unwrap();
        for (got, want) in dec.values.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-9, "got {got}, oracle {want}");
        }
        // Spot values quoted to three decimals.
        assert!((dec.values[0] - -0.481).abs() < 1e-3);
        assert!((dec.values[1] - 1.311).abs() < 1e-3);
        assert!((dec.values[2] - 3.170).abs() < 1e-3);
    }

    #[test]
    fn restricted_full_basis_matches_solve() {
        let s = tridiag(4, -1.0, 2.0);
        let m = SymMatrix::identity(4);
        let basis: Vec<Vec<f64>> = (0..4)
            .map(|j| (0..4).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let full = solve_pencil(&s, &m).unwrap();
        let restr = restricted_pencil(&s, &m, &basis).unwrap();
        for (a, b) in full.values.iter().zip(&restr.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn restricted_diagonal_subset() {
        let s = SymMatrix::from_diag(&[5.0, 7.0, 9.0]);
        let m = SymMatrix::identity(3);
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        let dec = restricted_pencil(&s, &m, &basis).unwrap();
        assert!((dec.values[0] - 5.0).abs() < 1e-13);
        assert!((dec.values[1] - 9.0).abs() < 1e-13);
    }

    #[test]
    fn restricted_dependent_basis() {
        let s = SymMatrix::identity(3);
        let m = SymMatrix::identity(3);
        let basis = vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]];
        assert_eq!(
            restricted_pencil(&s, &m, &basis).unwrap_err(),
            Error::DependentBasis
        );
    }

    #[test]
    fn deterministic_bitwise() {
        let s = tridiag(5, -1.3, 2.7);
        let m = SymMatrix::from_fn_sym(5, |i, j| if i == j { 2.0 } else { 0.25 });
        let d1 = solve_pencil(&s, &m).unwrap();
        let d2 = solve_pencil(&s, &m).unwrap();
        assert_eq!(d1, d2);
        for (a, b) in d1.values.iter().zip(&d2.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn values_only_matches_full() {
        let s = tridiag(6, -0.7, 1.9);
        let m = SymMatrix::identity(6);
        let vals = solve_pencil_values(&s, &m).unwrap();
        let full = solve_pencil(&s, &m).unwrap();
        for (a, b) in vals.iter().zip(&full.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
