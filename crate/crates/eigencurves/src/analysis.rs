//! Pointwise and asymptotic spectral analysis: eigenspace clustering,
//! orthogonality residuals, one-sided derivatives at crossings, asymptotic
//! slopes, straight-line detection, and linear-independence checks.

use crate::curves;
use crate::error::{Error, Result};
use crate::forms::FormTriple;
use crate::matrix::{dot, norm2};
use crate::pencil;

/// Default clustering tolerance for grouping slice eigenvalues into one
/// eigenspace: `1e-7 · scale`. Below genuine curve gaps at the default grid
/// spacing, far above solver accuracy.
pub fn default_cluster_tol(triple: &FormTriple) -> f64 {
    1e-7 * triple.scale()
}

fn null_tol(triple: &FormTriple) -> f64 {
    1e-10 * triple.b().max_abs()
}

/// Euclidean residual `‖(A − λB)e − μ M e‖₂` of a candidate eigenpair.
pub fn eigen_residual(triple: &FormTriple, lambda: f64, mu: f64, e: &[f64]) -> f64 {
    let pv = triple.pencil_at(lambda).mat_vec(e);
    let mv = triple.m().mat_vec(e);
    let r: Vec<f64> = pv.iter().zip(&mv).map(|(&p, &m)| p - mu * m).collect();
    norm2(&r)
}

fn require_eigenpair(triple: &FormTriple, lambda: f64, mu: f64, e: &[f64]) -> Result<()> {
    let tol = 1e-8 * triple.scale() * norm2(e).max(f64::MIN_POSITIVE);
    if eigen_residual(triple, lambda, mu, e) > tol {
        return Err(Error::NotAnEigenpoint {
            lambda,
            mu,
            tol,
        });
    }
    Ok(())
}

/// Local structure of the spectrum at an eigenpoint `(λ*, μ*)`.
///
/// The eigenspace is the span of all slice eigenvectors whose eigenvalue lies
/// within `cluster_tol` of `μ*`. Diagonalizing `−b` against `m` on it yields
/// `b_values = b_1 ≤ … ≤ b_{k0}`; the curve through the point with local index
/// `k` has right derivative `b_k` and left derivative `b_{k0−k+1}`, so
/// `right_derivatives` is `b_values` and `left_derivatives` its reverse.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenpointAnalysis {
    pub lambda_star: f64,
    pub mu_star: f64,
    pub multiplicity: usize,
    /// Clustering tolerance actually used; near-degenerate clusters make the
    /// split tolerance-dependent, so it is reported rather than implied.
    pub cluster_tol: f64,
    /// M-orthonormal basis diagonalizing `−b` on the eigenspace.
    pub eigenspace_basis: Vec<Vec<f64>>,
    pub b_values: Vec<f64>,
    pub left_derivatives: Vec<f64>,
    pub right_derivatives: Vec<f64>,
}

/// Analyze an eigenpoint with the default clustering tolerance.
pub fn eigenpoint(triple: &FormTriple, lambda_star: f64, mu_star: f64) -> Result<EigenpointAnalysis> {
    eigenpoint_with_tol(triple, lambda_star, mu_star, default_cluster_tol(triple))
}

/// Analyze an eigenpoint, clustering slice eigenvalues within `cluster_tol`
/// of `mu_star`.
pub fn eigenpoint_with_tol(
    triple: &FormTriple,
    lambda_star: f64,
    mu_star: f64,
    cluster_tol: f64,
) -> Result<EigenpointAnalysis> {
    let s = curves::slice(triple, lambda_star)?;
    let members: Vec<usize> = (0..s.mu.len())
        .filter(|&j| (s.mu[j] - mu_star).abs() <= cluster_tol)
        .collect();
    if members.is_empty() {
        return Err(Error::NotAnEigenpoint {
            lambda: lambda_star,
            mu: mu_star,
            tol: cluster_tol,
        });
    }
    let cluster_basis: Vec<Vec<f64>> = members.iter().map(|&j| s.vectors[j].clone()).collect();
    let neg_b = triple.b().scaled(-1.0);
    let dec = pencil::restricted_pencil(&neg_b, triple.m(), &cluster_basis)?;
    let b_values = dec.values;
    let left_derivatives: Vec<f64> = b_values.iter().rev().copied().collect();
    Ok(EigenpointAnalysis {
        lambda_star,
        mu_star,
        multiplicity: members.len(),
        cluster_tol,
        eigenspace_basis: dec.vectors,
        b_values: b_values.clone(),
        left_derivatives,
        right_derivatives: b_values,
    })
}

/// Residual of the two-eigenpoint orthogonality identity
/// `(λ₂−λ₁)·b(e₁,e₂) + (μ₂−μ₁)·m(e₁,e₂)`, normalized by
/// `scale · ‖e₁‖ · ‖e₂‖`. Both points must pass the eigen-residual check.
pub fn orthogonality_residual(
    triple: &FormTriple,
    point1: (f64, f64, &[f64]),
    point2: (f64, f64, &[f64]),
) -> Result<f64> {
    let (l1, m1, e1) = point1;
    let (l2, m2, e2) = point2;
    require_eigenpair(triple, l1, m1, e1)?;
    require_eigenpair(triple, l2, m2, e2)?;
    let b12 = triple.b().bilinear(e1, e2);
    let m12 = triple.m().bilinear(e1, e2);
    let raw = ((l2 - l1) * b12 + (m2 - m1) * m12).abs();
    let denom = triple.scale() * norm2(e1).max(f64::MIN_POSITIVE) * norm2(e2).max(f64::MIN_POSITIVE);
    Ok(raw / denom)
}

/// Asymptotic slopes of the eigencurves.
///
/// `eta` holds the ascending eigenvalues of `(−B, M)`: curve `k` satisfies
/// `μ_k(λ)/λ → η_k` as `λ → +∞`. In finite dimension the subspace infimum
/// defining these slopes is attained by eigenvector spans, so the pencil
/// eigenvalues are exact and the `−∞` case cannot occur.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub eta: Vec<f64>,
    /// Curves that descend to `−∞` as `λ → +∞`: count of `η_k < −1e-10·scale`.
    pub num_down_plus: usize,
}

pub fn asymptotics(triple: &FormTriple) -> Result<AsymptoticReport> {
    let neg_b = triple.b().scaled(-1.0);
    let eta = pencil::solve_pencil_values(&neg_b, triple.m())?;
    let tol = 1e-10 * triple.scale();
    let num_down_plus = eta.iter().filter(|&&v| v < -tol).count();
    Ok(AsymptoticReport { eta, num_down_plus })
}

/// Ascending eigenvalues of `(B, M)`: the mirrored slopes governing
/// `λ → −∞`, where `μ_k(λ)/|λ|` tends to the k-th of these.
pub fn asymptotics_left(triple: &FormTriple) -> Result<Vec<f64>> {
    pencil::solve_pencil_values(triple.b(), triple.m())
}

/// A horizontal straight line contained in the spectrum, witnessed by a
/// vector in the intersection of a base eigenspace with the null space of `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalLine {
    pub mu_star: f64,
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineReport {
    pub horizontal_lines: Vec<HorizontalLine>,
    /// Dimension of the null space of `b`, counted against `m`.
    pub b_nullity: usize,
}

/// Detect horizontal straight lines in the spectrum.
///
/// For each distinct eigenvalue `μ*` of `(A, M)` with eigenspace basis `Z₀`,
/// the intersection with the null space of `b` is the null space of the
/// stacked matrix `B·Z₀`, computed through its Gram matrix. Every reported
/// witness is re-verified against `‖Be‖ ≤ 1e-8·scale` and
/// `‖Ae − μ*Me‖ ≤ 1e-8·scale`.
pub fn detect_lines(triple: &FormTriple) -> Result<LineReport> {
    let scale = triple.scale();
    let cluster_tol = default_cluster_tol(triple);
    let ntol = null_tol(triple);

    let betas = pencil::solve_pencil_values(triple.b(), triple.m())?;
    let b_nullity = betas.iter().filter(|&&v| v.abs() <= ntol).count();

    let base = pencil::solve_pencil(triple.a(), triple.m())?;
    let n = base.values.len();
    let mut horizontal_lines = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && base.values[end] - base.values[start] <= cluster_tol {
            end += 1;
        }
        let mu_star = base.values[start];
        let z0 = &base.vectors[start..end];

        // Null directions of B·Z₀ from the k×k Gram of the stacked columns.
        let w: Vec<Vec<f64>> = z0.iter().map(|z| triple.b().mat_vec(z)).collect();
        let k = w.len();
        let gram = crate::matrix::SymMatrix::from_fn_sym(k, |i, j| dot(&w[i], &w[j]));
        let ident = crate::matrix::SymMatrix::identity(k);
        let gdec = pencil::solve_pencil(&gram, &ident)?;
        for (c, &g) in gdec.vectors.iter().zip(&gdec.values) {
            let sigma = g.max(0.0).sqrt();
            if sigma > ntol {
                continue;
            }
            let mut e = vec![0.0; triple.order()];
            for (coef, z) in c.iter().zip(z0) {
                for (ei, zi) in e.iter_mut().zip(z) {
                    *ei += coef * zi;
                }
            }
            let be = norm2(&triple.b().mat_vec(&e));
            let res = eigen_residual(triple, 0.0, mu_star, &e);
            if be <= 1e-8 * scale && res <= 1e-8 * scale {
                horizontal_lines.push(HorizontalLine { mu_star, witness: e });
                break; // one witness per distinct level
            }
        }
        start = end;
    }
    Ok(LineReport {
        horizontal_lines,
        b_nullity,
    })
}

/// Outcome of a same-level independence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Independence {
    Independent,
    Dependent,
    /// `μ*` sits within the clustering tolerance of the base spectrum, where
    /// the independence statement does not apply.
    Excluded,
}

/// Check linear independence of eigenvectors collected along one horizontal
/// level `μ*` at distinct abscissae.
///
/// Rank is decided by attempting a Cholesky factorization of the M-Gram
/// matrix of the stacked vectors.
pub fn independence_check(
    triple: &FormTriple,
    mu_star: f64,
    points: &[(f64, Vec<f64>)],
) -> Result<Independence> {
    for (i, (li, ei)) in points.iter().enumerate() {
        for (lj, _) in points.iter().skip(i + 1) {
            if li == lj {
                return Err(Error::DuplicateLambda(*li));
            }
        }
        require_eigenpair(triple, *li, mu_star, ei)?;
    }
    let base = pencil::solve_pencil_values(triple.a(), triple.m())?;
    let tol = default_cluster_tol(triple);
    if base.iter().any(|&v| (v - mu_star).abs() <= tol) {
        return Ok(Independence::Excluded);
    }
    let vectors: Vec<&Vec<f64>> = points.iter().map(|(_, e)| e).collect();
    let m_cols: Vec<Vec<f64>> = vectors.iter().map(|v| triple.m().mat_vec(v)).collect();
    let gram = crate::matrix::SymMatrix::from_fn_sym(points.len(), |i, j| {
        dot(vectors[i], &m_cols[j])
    });
    Ok(match pencil::cholesky(&gram) {
        Ok(_) => Independence::Independent,
        Err(_) => Independence::Dependent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{self, Perturbation, SyntheticSpec};

    #[test]
    fn two_line_crossing_has_slope_pair() {
        let t = problems::two_line_crossing();
        let a = eigenpoint(&t, 0.5, 1.5).unwrap();
        assert_eq!(a.multiplicity, 2);
        assert!((a.b_values[0] + 1.0).abs() < 1e-9);
        assert!((a.b_values[1] - 1.0).abs() < 1e-9);
        // Lower curve leaves with slope -1 and arrives with slope +1.
        assert!((a.right_derivatives[0] + 1.0).abs() < 1e-9);
        assert!((a.left_derivatives[0] - 1.0).abs() < 1e-9);
        assert!((a.right_derivatives[1] - 1.0).abs() < 1e-9);
        assert!((a.left_derivatives[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn triple_crossing_orders_slopes() {
        // Lines 1+λ, 2 (horizontal), 3−λ all meet at (1, 2).
        let t = problems::synthetic(&SyntheticSpec {
            base_values: vec![1.0, 2.0, 3.0],
            perturbation: Perturbation::Sparse(vec![(1, -1.0), (3, 1.0)]),
        })
        .unwrap();
        let a = eigenpoint(&t, 1.0, 2.0).unwrap();
        assert_eq!(a.multiplicity, 3);
        let expect = [-1.0, 0.0, 1.0];
        for (got, want) in a.b_values.iter().zip(expect) {
            assert!((got - want).abs() < 1e-9);
        }
        assert_eq!(a.left_derivatives, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn simple_point_derivative_is_minus_eps() {
        let t = problems::synthetic(&SyntheticSpec {
            base_values: vec![1.0, 2.0, 3.0],
            perturbation: Perturbation::Scalar(0.75),
        })
        .unwrap();
        // Curve 2 at λ = 0.4 has value 2 − 0.75·0.4.
        let a = eigenpoint(&t, 0.4, 2.0 - 0.75 * 0.4).unwrap();
        assert_eq!(a.multiplicity, 1);
        assert!((a.b_values[0] + 0.75).abs() < 1e-10);
        assert_eq!(a.left_derivatives, a.right_derivatives);
    }

    #[test]
    fn horizontal_point_has_zero_derivatives() {
        let t = problems::synthetic(&SyntheticSpec {
            base_values: vec![1.0, 2.0],
            perturbation: Perturbation::Scalar(0.0),
        })
        .unwrap();
        let a = eigenpoint(&t, 0.0, 1.0).unwrap();
        assert_eq!(a.multiplicity, 1);
        assert!(a.b_values[0].abs() < 1e-12);
    }

    #[test]
    fn not_an_eigenpoint_is_rejected() {
        let t = problems::two_line_crossing();
        match eigenpoint(&t, 0.0, 10.0).unwrap_err() {
            Error::NotAnEigenpoint { .. } => {}
            other => panic!("expected NotAnEigenpoint, got {other:?}"),
        }
    }

    #[test]
    fn one_sided_derivatives_match_finite_differences() {
        let t = problems::two_line_crossing();
        let a = eigenpoint(&t, 0.5, 1.5).unwrap();
        for h in [1e-2, 1e-3, 1e-4] {
            let right = curves::slice_values(&t, 0.5 + h).unwrap();
            let left = curves::slice_values(&t, 0.5 - h).unwrap();
            for k in 0..2 {
                let fd_right = (right[k] - 1.5) / h;
                let fd_left = (left[k] - 1.5) / (-h);
                assert!(
                    (fd_right - a.right_derivatives[k]).abs() < 1e-9,
                    "right fd {fd_right} vs {}",
                    a.right_derivatives[k]
                );
                assert!(
                    (fd_left - a.left_derivatives[k]).abs() < 1e-9,
                    "left fd {fd_left} vs {}",
                    a.left_derivatives[k]
                );
            }
        }
    }

    #[test]
    fn same_slice_pairs_are_m_orthogonal() {
        let t = problems::paper_matrix_example();
        let s = curves::slice(&t, 1.3).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let r = orthogonality_residual(
                    &t,
                    (1.3, s.mu[i], &s.vectors[i]),
                    (1.3, s.mu[j], &s.vectors[j]),
                )
                .unwrap();
                assert!(r <= 1e-10, "residual {r}");
                // Distinct values on the same vertical force m-orthogonality.
                let m12 = t.m().bilinear(&s.vectors[i], &s.vectors[j]);
                assert!(m12.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn horizontal_pair_is_b_orthogonal() {
        // Lines 1+λ and 2−λ both pass through level μ = 1.75 at λ = 0.75 and
        // λ = 0.25 respectively.
        let t = problems::two_line_crossing();
        let s1 = curves::slice(&t, 0.75).unwrap();
        let s2 = curves::slice(&t, 0.25).unwrap();
        // At λ=0.75: values are (1.25, 1.75) so curve 2 sits on the level;
        // at λ=0.25: values are (1.25, 1.75) as well.
        let e1 = &s1.vectors[1];
        let e2 = &s2.vectors[1];
        let r = orthogonality_residual(&t, (0.75, 1.75, e1), (0.25, 1.75, e2)).unwrap();
        assert!(r <= 1e-10);
        assert!(t.b().bilinear(e1, e2).abs() <= 1e-10);
    }

    #[test]
    fn identical_points_have_zero_residual() {
        let t = problems::paper_matrix_example();
        let s = curves::slice(&t, -2.0).unwrap();
        let r = orthogonality_residual(
            &t,
            (-2.0, s.mu[0], &s.vectors[0]),
            (-2.0, s.mu[0], &s.vectors[0]),
        )
        .unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn matrix_example_eta_matches_cubic_roots() {
        let t = problems::paper_matrix_example();
        let rep = asymptotics(&t).unwrap();
        let expect = [-3.170, -1.311, 0.481];
        for (got, want) in rep.eta.iter().zip(expect) {
            assert!((got - want).abs() < 1e-3, "eta {got} vs {want}");
        }
        assert_eq!(rep.num_down_plus, 2);
    }

    #[test]
    fn scalar_family_eta_constant() {
        let t = problems::synthetic(&SyntheticSpec {
            base_values: vec![1.0, 2.0, 3.0],
            perturbation: Perturbation::Scalar(0.6),
        })
        .unwrap();
        let rep = asymptotics(&t).unwrap();
        for &e in &rep.eta {
            assert!((e + 0.6).abs() < 1e-12);
        }
        assert_eq!(rep.num_down_plus, 3);
    }

    #[test]
    fn opposite_boundary_signs_split_eta() {
        let spec = problems::RobinSteklovSpec1D::from_fns(1.0, 1.0, 1.0, 1.0, -1.0, 12, |_| 1.0);
        let t = problems::robin_steklov_1d(&spec).unwrap();
        let rep = asymptotics(&t).unwrap();
        let tol = 1e-10 * t.scale();
        let neg = rep.eta.iter().filter(|&&v| v < -tol).count();
        let pos = rep.eta.iter().filter(|&&v| v > tol).count();
        assert_eq!((neg, pos), (1, 1));
        assert_eq!(rep.num_down_plus, 1);
    }

    #[test]
    fn sparse_family_reports_untouched_lines() {
        let t = problems::synthetic(&SyntheticSpec {
            base_values: vec![1.0, 2.0, 3.0],
            perturbation: Perturbation::Sparse(vec![(1, 1.0)]),
        })
        .unwrap();
        let rep = detect_lines(&t).unwrap();
        let levels: Vec<f64> = rep.horizontal_lines.iter().map(|l| l.mu_star).collect();
        assert_eq!(levels.len(), 2);
        assert!((levels[0] - 2.0).abs() < 1e-12);
        assert!((levels[1] - 3.0).abs() < 1e-12);
        assert_eq!(rep.b_nullity, 2);
    }

    #[test]
    fn nondegenerate_b_has_no_lines() {
        let t = problems::synthetic(&SyntheticSpec {
            base_values: vec![1.0, 2.0],
            perturbation: Perturbation::Scalar(0.5),
        })
        .unwrap();
        let rep = detect_lines(&t).unwrap();
        assert!(rep.horizontal_lines.is_empty());
        assert_eq!(rep.b_nullity, 0);
    }

    #[test]
    fn zero_b_yields_every_line() {
        let t = problems::synthetic(&SyntheticSpec {
            base_values: vec![1.0, 2.0, 3.0],
            perturbation: Perturbation::Scalar(0.0),
        })
        .unwrap();
        let rep = detect_lines(&t).unwrap();
        assert_eq!(rep.horizontal_lines.len(), 3);
        assert_eq!(rep.b_nullity, 3);
    }

    #[test]
    fn independence_on_crossing_lines() {
        // Level 1.75 meets the two lines at distinct λ.
        let t = problems::two_line_crossing();
        let s1 = curves::slice(&t, 0.75).unwrap();
        let s2 = curves::slice(&t, 0.25).unwrap();
        let points = vec![(0.75, s1.vectors[1].clone()), (0.25, s2.vectors[1].clone())];
        assert_eq!(
            independence_check(&t, 1.75, &points).unwrap(),
            Independence::Independent
        );
    }

    #[test]
    fn duplicate_lambda_rejected() {
        let t = problems::two_line_crossing();
        let s = curves::slice(&t, 0.75).unwrap();
        let points = vec![(0.75, s.vectors[1].clone()), (0.75, s.vectors[1].clone())];
        match independence_check(&t, 1.75, &points).unwrap_err() {
            Error::DuplicateLambda(_) => {}
            other => panic!("expected DuplicateLambda, got {other:?}"),
        }
    }

    #[test]
    fn base_level_is_excluded() {
        let t = problems::two_line_crossing();
        // μ* = 2 is a base eigenvalue; the level hits line 2 at λ = 0.
        let s = curves::slice(&t, 0.0).unwrap();
        let points = vec![(0.0, s.vectors[1].clone())];
        assert_eq!(
            independence_check(&t, 2.0, &points).unwrap(),
            Independence::Excluded
        );
    }
}
