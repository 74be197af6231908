//! Problem generators: the reference matrix example, 1-D discretizations, the
//! synthetic straight-line families, and seeded random triples for fuzzing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forms::{self, FormTriple, ValidationReport};
use crate::matrix::{dot, norm2, SymMatrix};

/// The 3×3 reference problem `A x = λ B x + μ x`.
///
/// `A` is the second-difference matrix, `B` matches it except for a zero in
/// the lower-right corner, `M` is the identity.
pub fn paper_matrix_example() -> FormTriple {
    let a = SymMatrix::from_rows(&[
        vec![2.0, -1.0, 0.0],
        vec![-1.0, 2.0, -1.0],
        vec![0.0, -1.0, 2.0],
    ])
    .expect("constant matrix");
    let b = SymMatrix::from_rows(&[
        vec![2.0, -1.0, 0.0],
        vec![-1.0, 2.0, -1.0],
        vec![0.0, -1.0, 0.0],
    ])
    .expect("constant matrix");
    let m = SymMatrix::identity(3);
    forms::validate(a, b, m).expect("reference triple is valid").0
}

/// Second-order eigenproblem `-(p y')' + q y = (λ r + μ) y` on `[t0, t1]` with
/// Dirichlet ends, sampled for a central finite-difference discretization.
///
/// `p_mid` holds `p` at the `n_interior + 1` interval midpoints (conservative
/// stiffness assembly); `q` and `r` are sampled at the interior nodes.
#[derive(Debug, Clone)]
pub struct SturmLiouvilleSpec {
    pub t0: f64,
    pub t1: f64,
    pub n_interior: usize,
    pub p_mid: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

impl SturmLiouvilleSpec {
    /// Sample coefficient functions on the grid induced by `n_interior`.
    pub fn from_fns(
        t0: f64,
        t1: f64,
        n_interior: usize,
        p: impl Fn(f64) -> f64,
        q: impl Fn(f64) -> f64,
        r: impl Fn(f64) -> f64,
    ) -> Self {
        let h = (t1 - t0) / (n_interior as f64 + 1.0);
        let p_mid = (0..=n_interior)
            .map(|i| p(t0 + (i as f64 + 0.5) * h))
            .collect();
        let node = |i: usize| t0 + (i as f64 + 1.0) * h;
        let q = (0..n_interior).map(|i| q(node(i))).collect();
        let r = (0..n_interior).map(|i| r(node(i))).collect();
        SturmLiouvilleSpec {
            t0,
            t1,
            n_interior,
            p_mid,
            q,
            r,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.t0 < self.t1) {
            return Err(Error::InvalidParameter(format!(
                "interval endpoints must satisfy t0 < t1, got [{}, {}]",
                self.t0, self.t1
            )));
        }
        if self.n_interior < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 interior nodes, got {}",
                self.n_interior
            )));
        }
        if self.p_mid.len() != self.n_interior + 1
            || self.q.len() != self.n_interior
            || self.r.len() != self.n_interior
        {
            return Err(Error::InvalidParameter(
                "coefficient sample lengths do not match the grid".into(),
            ));
        }
        for (i, &p) in self.p_mid.iter().enumerate() {
            if !(p > 0.0) {
                return Err(Error::InvalidCoefficient(format!(
                    "p must be strictly positive, got {p} at midpoint {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Assemble the Dirichlet finite-difference triple for a Sturm-Liouville spec.
///
/// With spacing `h`: `A` is the p-weighted second difference plus `q` times
/// the h-mass, `B` is `r` times the h-mass, and `M = h·I`. Boundary rows are
/// eliminated.
pub fn sturm_liouville(spec: &SturmLiouvilleSpec) -> Result<FormTriple> {
    spec.check()?;
    let n = spec.n_interior;
    let h = (spec.t1 - spec.t0) / (n as f64 + 1.0);
    let a = SymMatrix::from_fn_sym(n, |i, j| {
        if i == j {
            (spec.p_mid[i] + spec.p_mid[i + 1]) / h + spec.q[i] * h
        } else if j == i + 1 {
            -spec.p_mid[i + 1] / h
        } else {
            0.0
        }
    });
    let b = SymMatrix::from_diag(&spec.r.iter().map(|&r| r * h).collect::<Vec<_>>());
    let m = SymMatrix::from_diag(&vec![h; n]);
    Ok(forms::validate(a, b, m)?.0)
}

/// The sign-weight problem on `[-1, 1]`: `p ≡ 1`, `q ≡ 0`, `r = sgn(t)` with
/// `sgn(0) = 0` when a node lands on the midpoint.
pub fn richardson(n_interior: usize) -> Result<FormTriple> {
    let spec = SturmLiouvilleSpec::from_fns(
        -1.0,
        1.0,
        n_interior,
        |_| 1.0,
        |_| 0.0,
        |t| {
            if t.abs() < 1e-12 {
                0.0
            } else {
                t.signum()
            }
        },
    );
    sturm_liouville(&spec)
}

/// 1-D boundary-weighted eigenproblem on `[0, length]` discretized with
/// linear hat functions and no essential boundary conditions.
///
/// `c0, c1 ≥ 0` (not both zero) weight the endpoint terms of `a`; `b00, b01`
/// are the sign-free endpoint weights of `b`; `m0` is the interior weight of
/// `m`, sampled at the two Gauss points of each element.
#[derive(Debug, Clone)]
pub struct RobinSteklovSpec1D {
    pub length: f64,
    pub c0: f64,
    pub c1: f64,
    pub b00: f64,
    pub b01: f64,
    pub n_elements: usize,
    pub m0: Vec<f64>,
}

impl RobinSteklovSpec1D {
    pub fn from_fns(
        length: f64,
        c0: f64,
        c1: f64,
        b00: f64,
        b01: f64,
        n_elements: usize,
        m0: impl Fn(f64) -> f64,
    ) -> Self {
        let h = length / n_elements as f64;
        let g = 0.5 / 3.0_f64.sqrt();
        let mut samples = Vec::with_capacity(2 * n_elements);
        for e in 0..n_elements {
            let mid = (e as f64 + 0.5) * h;
            samples.push(m0(mid - g * h));
            samples.push(m0(mid + g * h));
        }
        RobinSteklovSpec1D {
            length,
            c0,
            c1,
            b00,
            b01,
            n_elements,
            m0: samples,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "length must be positive, got {}",
                self.length
            )));
        }
        if self.n_elements < 1 {
            return Err(Error::InvalidParameter("need at least one element".into()));
        }
        if self.c0 < 0.0 || self.c1 < 0.0 || self.c0 + self.c1 <= 0.0 {
            return Err(Error::InvalidCoefficient(format!(
                "boundary coefficients must be nonnegative with c0 + c1 > 0, got ({}, {})",
                self.c0, self.c1
            )));
        }
        if self.m0.len() != 2 * self.n_elements {
            return Err(Error::InvalidParameter(
                "m0 needs two quadrature samples per element".into(),
            ));
        }
        for (i, &w) in self.m0.iter().enumerate() {
            if !(w > 0.0) {
                return Err(Error::InvalidCoefficient(format!(
                    "m0 must be strictly positive, got {w} at quadrature point {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Assemble the hat-function triple: stiffness plus endpoint terms for `a`,
/// two endpoint rank-1 terms for `b` (so `rank(B) ≤ 2`), and the consistent
/// `m0`-weighted mass matrix for `m`.
pub fn robin_steklov_1d(spec: &RobinSteklovSpec1D) -> Result<FormTriple> {
    spec.check()?;
    let ne = spec.n_elements;
    let n = ne + 1;
    let h = spec.length / ne as f64;

    let mut a = SymMatrix::zeros(n);
    for e in 0..ne {
        a.set_sym(e, e, a.get(e, e) + 1.0 / h);
        a.set_sym(e + 1, e + 1, a.get(e + 1, e + 1) + 1.0 / h);
        a.set_sym(e, e + 1, a.get(e, e + 1) - 1.0 / h);
    }
    a.set_sym(0, 0, a.get(0, 0) + spec.c0);
    a.set_sym(n - 1, n - 1, a.get(n - 1, n - 1) + spec.c1);

    let mut b = SymMatrix::zeros(n);
    b.set_sym(0, 0, spec.b00);
    b.set_sym(n - 1, n - 1, spec.b01);

    // 2-point Gauss per element on the reference coordinate ξ ∈ [0, 1]:
    // shape functions 1-ξ and ξ, weights h/2.
    let g = 0.5 / 3.0_f64.sqrt();
    let xis = [0.5 - g, 0.5 + g];
    let mut m = SymMatrix::zeros(n);
    for e in 0..ne {
        let mut elem = [[0.0; 2]; 2];
        for (gp, &xi) in xis.iter().enumerate() {
            let w = spec.m0[2 * e + gp] * h / 2.0;
            let shape = [1.0 - xi, xi];
            for (i, &si) in shape.iter().enumerate() {
                for (j, &sj) in shape.iter().enumerate() {
                    elem[i][j] += w * si * sj;
                }
            }
        }
        m.set_sym(e, e, m.get(e, e) + elem[0][0]);
        m.set_sym(e + 1, e + 1, m.get(e + 1, e + 1) + elem[1][1]);
        m.set_sym(e, e + 1, m.get(e, e + 1) + elem[0][1]);
    }

    Ok(forms::validate(a, b, m)?.0)
}

/// Perturbation of the base spectrum defining a synthetic family.
#[derive(Debug, Clone)]
pub enum Perturbation {
    /// `b = ε m`: every eigencurve is the line `μ₀ₙ − ελ`.
    Scalar(f64),
    /// `b = Σ_k ε_k e_k e_kᵀ` over 1-based indices `k`; curves are the sorted
    /// envelope of the lines `μ₀ₙ − ε_n λ` (for listed `n`) and the horizontal
    /// lines `μ₀ₙ` (for the rest).
    Sparse(Vec<(usize, f64)>),
}

/// Diagonal synthetic triple with a known, piecewise-linear spectrum.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub base_values: Vec<f64>,
    pub perturbation: Perturbation,
}

impl SyntheticSpec {
    fn check(&self) -> Result<()> {
        if self.base_values.is_empty() {
            return Err(Error::InvalidParameter("base spectrum is empty".into()));
        }
        let mut prev = 0.0;
        for (i, &v) in self.base_values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "base values must be strictly positive, got {v} at index {i}"
                )));
            }
            if v < prev {
                return Err(Error::InvalidParameter(
                    "base values must be ascending".into(),
                ));
            }
            prev = v;
        }
        if let Perturbation::Sparse(entries) = &self.perturbation {
            let n = self.base_values.len();
            let mut seen = vec![false; n];
            for &(k, eps) in entries {
                if k == 0 || k > n {
                    return Err(Error::InvalidParameter(format!(
                        "index {k} outside 1..={n}"
                    )));
                }
                if seen[k - 1] {
                    return Err(Error::InvalidParameter(format!("duplicate index {k}")));
                }
                seen[k - 1] = true;
                if eps == 0.0 || !eps.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "perturbation at index {k} must be nonzero and finite"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Build the synthetic triple `A = diag(base), M = I` with `B` per the
/// perturbation.
pub fn synthetic(spec: &SyntheticSpec) -> Result<FormTriple> {
    spec.check()?;
    let n = spec.base_values.len();
    let a = SymMatrix::from_diag(&spec.base_values);
    let m = SymMatrix::identity(n);
    let b = match &spec.perturbation {
        Perturbation::Scalar(eps) => m.scaled(*eps),
        Perturbation::Sparse(entries) => {
            let mut diag = vec![0.0; n];
            for &(k, eps) in entries {
                diag[k - 1] = eps;
            }
            SymMatrix::from_diag(&diag)
        }
    };
    Ok(forms::validate(a, b, m)?.0)
}

/// Convenience: the two crossing lines `1 + λ` and `2 − λ` meeting at
/// `(0.5, 1.5)`. The canonical multiple-eigenpoint fixture.
pub fn two_line_crossing() -> FormTriple {
    synthetic(&SyntheticSpec {
        base_values: vec![1.0, 2.0],
        perturbation: Perturbation::Sparse(vec![(1, -1.0), (2, 1.0)]),
    })
    .expect("constant fixture")
}

/// Shape of the random `b` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BProfile {
    /// Dense random symmetric matrix; generically full-rank indefinite.
    Indefinite,
    /// Gram matrix `GᵀG`; positive semidefinite, generically definite.
    Psd,
    /// Mixed-sign form of the given rank, planted via orthonormal directions.
    Degenerate { rank: usize },
}

/// Deterministic random triple: `A = RᵀR + I` and `M = QᵀQ + I` guarantee the
/// definiteness assumptions; `B` follows the profile. Identical seeds produce
/// identical triples.
pub fn random_triple(order: usize, seed: u64, profile: BProfile) -> Result<FormTriple> {
    random_triple_with_report(order, seed, profile).map(|(t, _)| t)
}

/// Same as [`random_triple`], also returning the validation report.
pub fn random_triple_with_report(
    order: usize,
    seed: u64,
    profile: BProfile,
) -> Result<(FormTriple, ValidationReport)> {
    if !(2..=64).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "order must lie in 2..=64, got {order}"
        )));
    }
    if let BProfile::Degenerate { rank } = profile {
        if rank >= order {
            return Err(Error::InvalidParameter(format!(
                "degenerate rank {rank} must be below the order {order}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_square = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..order)
            .map(|_| (0..order).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    };

    let gram_plus_identity = |g: &[Vec<f64>]| {
        SymMatrix::from_fn_sym(order, |i, j| {
            let col_i: Vec<f64> = g.iter().map(|row| row[i]).collect();
            let col_j: Vec<f64> = g.iter().map(|row| row[j]).collect();
            dot(&col_i, &col_j) + if i == j { 1.0 } else { 0.0 }
        })
    };

    let r = random_square(&mut rng);
    let a = gram_plus_identity(&r);
    let q = random_square(&mut rng);
    let m = gram_plus_identity(&q);

    let b = match profile {
        BProfile::Indefinite => {
            let g = random_square(&mut rng);
            SymMatrix::from_fn_sym(order, |i, j| 0.5 * (g[i][j] + g[j][i]))
        }
        BProfile::Psd => {
            let g = random_square(&mut rng);
            SymMatrix::from_fn_sym(order, |i, j| {
                let col_i: Vec<f64> = g.iter().map(|row| row[i]).collect();
                let col_j: Vec<f64> = g.iter().map(|row| row[j]).collect();
                dot(&col_i, &col_j)
            })
        }
        BProfile::Degenerate { rank } => {
            // Orthonormal directions via modified Gram-Schmidt so the planted
            // rank is exact.
            let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(rank);
            while dirs.len() < rank {
                let mut v: Vec<f64> = (0..order).map(|_| rng.gen_range(-1.0..1.0)).collect();
                for u in &dirs {
                    let c = dot(&v, u);
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= c * ui;
                    }
                }
                let nrm = norm2(&v);
                if nrm < 1e-6 {
                    continue;
                }
                for vi in &mut v {
                    *vi /= nrm;
                }
                dirs.push(v);
            }
            SymMatrix::from_fn_sym(order, |i, j| {
                dirs.iter()
                    .enumerate()
                    .map(|(k, u)| {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        sign * (1.0 + 0.5 * k as f64) * u[i] * u[j]
                    })
                    .sum()
            })
        }
    };

    forms::validate(a, b, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil;

    #[test]
    fn matrix_example_rows() {
        let t = paper_matrix_example();
        assert_eq!(
            (t.a().get(0, 0), t.a().get(0, 1), t.a().get(0, 2)),
            (2.0, -1.0, 0.0)
        );
        assert_eq!(
            (t.b().get(2, 0), t.b().get(2, 1), t.b().get(2, 2)),
            (0.0, -1.0, 0.0)
        );
        assert_eq!(t.m(), &SymMatrix::identity(3));
    }

    #[test]
    fn coarse_dirichlet_laplacian_spectrum() {
        // p=1, q=0, r=1 on [0, π] with 3 interior nodes: the discrete values
        // are (2 - 2cos(kπ/4)) / h².
        let spec = SturmLiouvilleSpec::from_fns(
            0.0,
            std::f64::consts::PI,
            3,
            |_| 1.0,
            |_| 0.0,
            |_| 1.0,
        );
        let t = sturm_liouville(&spec).unwrap();
        let h = std::f64::consts::PI / 4.0;
        let vals = pencil::solve_pencil_values(t.a(), t.m()).unwrap();
        for (k, &v) in vals.iter().enumerate() {
            let exact = (2.0 - 2.0 * ((k as f64 + 1.0) * std::f64::consts::PI / 4.0).cos())
                / (h * h);
            assert!((v - exact).abs() < 1e-10 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn second_order_convergence_to_dirichlet_spectrum() {
        // Error against k² shrinks by a factor >= 3 per resolution doubling.
        let eigs_at = |n: usize| {
            let spec = SturmLiouvilleSpec::from_fns(
                0.0,
                std::f64::consts::PI,
                n,
                |_| 1.0,
                |_| 0.0,
                |_| 1.0,
            );
            let t = sturm_liouville(&spec).unwrap();
            pencil::solve_pencil_values(t.a(), t.m()).unwrap()
        };
        let resolutions = [15usize, 31, 63];
        let errs: Vec<Vec<f64>> = resolutions
            .iter()
            .map(|&n| {
                eigs_at(n)
                    .iter()
                    .take(3)
                    .enumerate()
                    .map(|(k, &v)| (v - ((k + 1) * (k + 1)) as f64).abs())
                    .collect()
            })
            .collect();
        for k in 0..3 {
            assert!(
                errs[0][k] / errs[1][k] >= 3.0,
                "first doubling ratio {}",
                errs[0][k] / errs[1][k]
            );
            assert!(
                errs[1][k] / errs[2][k] >= 3.0,
                "second doubling ratio {}",
                errs[1][k] / errs[2][k]
            );
        }
    }

    #[test]
    fn richardson_sign_split() {
        let t = richardson(31).unwrap();
        let betas = pencil::solve_pencil_values(t.b(), t.m()).unwrap();
        let pos = betas.iter().filter(|&&v| v > 1e-12).count();
        let neg = betas.iter().filter(|&&v| v < -1e-12).count();
        let zero = betas.iter().filter(|&&v| v.abs() <= 1e-12).count();
        assert_eq!((neg, zero, pos), (15, 1, 15));
    }

    #[test]
    fn zero_weight_gives_zero_b() {
        let spec =
            SturmLiouvilleSpec::from_fns(0.0, 1.0, 4, |_| 1.0, |_| 0.0, |_| 0.0);
        let t = sturm_liouville(&spec).unwrap();
        assert_eq!(t.b().max_abs(), 0.0);
    }

    #[test]
    fn nonpositive_p_rejected() {
        let spec = SturmLiouvilleSpec::from_fns(0.0, 1.0, 4, |x| 0.5 - x, |_| 0.0, |_| 1.0);
        match sturm_liouville(&spec).unwrap_err() {
            Error::InvalidCoefficient(_) => {}
            other => panic!("expected InvalidCoefficient, got {other:?}"),
        }
    }

    #[test]
    fn boundary_form_rank_at_most_two() {
        let spec = RobinSteklovSpec1D::from_fns(1.0, 1.0, 1.0, 1.0, -0.5, 8, |_| 1.0);
        let t = robin_steklov_1d(&spec).unwrap();
        let betas = pencil::solve_pencil_values(t.b(), t.m()).unwrap();
        let max = betas.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let nonzero = betas.iter().filter(|&&v| v.abs() > 1e-10 * max).count();
        assert!(nonzero <= 2);
    }

    #[test]
    fn zero_boundary_weight_gives_zero_b() {
        let spec = RobinSteklovSpec1D::from_fns(1.0, 1.0, 1.0, 0.0, 0.0, 6, |_| 1.0);
        let t = robin_steklov_1d(&spec).unwrap();
        assert_eq!(t.b().max_abs(), 0.0);
    }

    #[test]
    fn both_boundary_coefficients_zero_rejected() {
        let spec = RobinSteklovSpec1D::from_fns(1.0, 0.0, 0.0, 1.0, 0.0, 6, |_| 1.0);
        match robin_steklov_1d(&spec).unwrap_err() {
            Error::InvalidCoefficient(_) => {}
            other => panic!("expected InvalidCoefficient, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_scalar_zero_is_horizontal() {
        let t = synthetic(&SyntheticSpec {
            base_values: vec![1.0, 2.0, 3.0],
            perturbation: Perturbation::Scalar(0.0),
        })
        .unwrap();
        assert_eq!(t.b().max_abs(), 0.0);
        let vals = pencil::solve_pencil_values(t.a(), t.m()).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_line_fixture_crosses_midway() {
        let t = two_line_crossing();
        // At λ = 0.5 the slice pencil is 1.5·I: a double eigenvalue.
        let p = t.pencil_at(0.5);
        let vals = pencil::solve_pencil_values(&p, t.m()).unwrap();
        assert!((vals[0] - 1.5).abs() < 1e-14);
        assert!((vals[1] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn random_triples_are_seed_deterministic() {
        for profile in [
            BProfile::Indefinite,
            BProfile::Psd,
            BProfile::Degenerate { rank: 3 },
        ] {
            let t1 = random_triple(6, 42, profile).unwrap();
            let t2 = random_triple(6, 42, profile).unwrap();
            assert_eq!(t1, t2);
        }
    }

    #[test]
    fn degenerate_profile_plants_rank() {
        let (_, report) =
            random_triple_with_report(7, 11, BProfile::Degenerate { rank: 5 }).unwrap();
        assert_eq!(report.b_rank, 5);
    }

    #[test]
    fn generators_pass_validation() {
        // Every generator output revalidates cleanly.
        let fixtures: Vec<FormTriple> = vec![
            paper_matrix_example(),
            richardson(9).unwrap(),
            robin_steklov_1d(&RobinSteklovSpec1D::from_fns(
                1.0,
                1.0,
                0.5,
                1.0,
                -1.0,
                8,
                |x| 1.0 + 0.25 * x,
            ))
            .unwrap(),
            synthetic(&SyntheticSpec {
                base_values: vec![1.0, 2.0, 3.0],
                perturbation: Perturbation::Sparse(vec![(1, 0.5)]),
            })
            .unwrap(),
            random_triple(5, 3, BProfile::Psd).unwrap(),
        ];
        for t in fixtures {
            forms::validate(t.a().clone(), t.b().clone(), t.m().clone()).unwrap();
        }
    }
}
