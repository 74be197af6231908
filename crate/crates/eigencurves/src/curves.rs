//! Eigencurve tracing over λ-grids.
//!
//! A slice at fixed λ is the ascending spectrum of the pencil `(A − λB, M)`;
//! by the minimax characterization these are exactly the variational
//! eigencurve values `μ_1(λ) ≤ … ≤ μ_n(λ)`. Tracing solves slices on a base
//! grid, inserts refinement points near suspected crossings, and carries the
//! global Lipschitz bound `max |eig(B, M)|`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::FormTriple;
use crate::pencil::{self, EigenDecomposition};

/// Refinement stops once a bracket is this narrow. Kept well above eigenvalue
/// noise so slope-based table invariants stay meaningful on tiny intervals.
const REFINE_MIN_WIDTH: f64 = 1e-6;
/// Maximum bisection depth per suspected crossing.
const REFINE_MAX_DEPTH: usize = 20;
/// Relative threshold (times scale) below which slope irregularities are
/// ignored by the crossing detector.
const KINK_TOL: f64 = 1e-6;

/// A λ-grid: uniform base points plus any refinement insertions.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    pub lo: f64,
    pub hi: f64,
    pub base_points: usize,
    /// Strictly ascending; contains `lo` and `hi`.
    pub refined_points: Vec<f64>,
}

impl LambdaGrid {
    /// Uniform grid with `base_points >= 2` nodes from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, base_points: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if base_points < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 points, got {base_points}"
            )));
        }
        let step = (hi - lo) / (base_points as f64 - 1.0);
        let mut pts: Vec<f64> = (0..base_points).map(|i| lo + i as f64 * step).collect();
        pts[base_points - 1] = hi;
        Ok(LambdaGrid {
            lo,
            hi,
            base_points,
            refined_points: pts,
        })
    }
}

/// Full spectrum of the slice pencil at one λ, with M-orthonormal vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSlice {
    pub lambda: f64,
    /// Ascending eigencurve values `μ_1(λ) … μ_n(λ)`.
    pub mu: Vec<f64>,
    /// `vectors[j]` belongs to `mu[j]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Sampled eigencurves over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigencurveTable {
    pub grid: LambdaGrid,
    /// One slice per refined grid point, in grid order.
    pub slices: Vec<SpectrumSlice>,
    /// Global slope bound: `max |eig(B, M)|`.
    pub lipschitz_bound: f64,
}

impl EigencurveTable {
    /// Values of curve `n` (1-based) across the grid.
    pub fn curve(&self, n: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.slices.iter().map(move |s| (s.lambda, s.mu[n - 1]))
    }

    pub fn order(&self) -> usize {
        self.slices.first().map_or(0, |s| s.mu.len())
    }

    /// Index of an exact grid point, if present.
    pub fn find_lambda(&self, lambda: f64) -> Option<usize> {
        self.grid
            .refined_points
            .binary_search_by(|p| p.partial_cmp(&lambda).expect("finite grid"))
            .ok()
    }
}

/// Solve one slice: the ascending spectrum of `(A − λB, M)`.
pub fn slice(triple: &FormTriple, lambda: f64) -> Result<SpectrumSlice> {
    let dec = pencil::solve_pencil(&triple.pencil_at(lambda), triple.m())?;
    Ok(SpectrumSlice {
        lambda,
        mu: dec.values,
        vectors: dec.vectors,
    })
}

/// Eigencurve values only, skipping vector accumulation.
pub fn slice_values(triple: &FormTriple, lambda: f64) -> Result<Vec<f64>> {
    pencil::solve_pencil_values(&triple.pencil_at(lambda), triple.m())
}

/// Global Lipschitz bound for every eigencurve of the triple:
/// the largest `|β|` over eigenvalues `β` of `(B, M)`.
pub fn lipschitz_bound(triple: &FormTriple) -> Result<f64> {
    let betas = pencil::solve_pencil_values(triple.b(), triple.m())?;
    Ok(betas.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())))
}

/// Trace all eigencurves over the grid, refining near suspected crossings.
///
/// Slices at distinct λ are independent pure computations and are evaluated in
/// parallel; the assembled table is identical to sequential evaluation.
pub fn trace(triple: &FormTriple, grid: &LambdaGrid) -> Result<EigencurveTable> {
    let base = &grid.refined_points;
    let mut slices = par_slices(triple, base)?;
    let scale = triple.scale();

    let marked = mark_crossing_intervals(&slices, scale);
    if !marked.is_empty() {
        let extra: Vec<Vec<SpectrumSlice>> = marked
            .par_iter()
            .map(|&i| refine_interval(triple, &slices[i], &slices[i + 1], scale))
            .collect::<Result<_>>()?;
        for batch in extra {
            slices.extend(batch);
        }
        slices.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite lambda"));
        slices.dedup_by(|a, b| a.lambda == b.lambda);
    }

    let refined_points = slices.iter().map(|s| s.lambda).collect();
    Ok(EigencurveTable {
        grid: LambdaGrid {
            lo: grid.lo,
            hi: grid.hi,
            base_points: grid.base_points,
            refined_points,
        },
        slices,
        lipschitz_bound: lipschitz_bound(triple)?,
    })
}

fn par_slices(triple: &FormTriple, lambdas: &[f64]) -> Result<Vec<SpectrumSlice>> {
    lambdas
        .par_iter()
        .map(|&l| slice(triple, l))
        .collect::<Result<Vec<_>>>()
}

/// Crossing detector on the base grid.
///
/// A kink of a sorted curve shows up as a spike of the discrete second
/// difference localized to the two secants adjacent to the crossing interval,
/// while smooth curvature varies slowly from node to node. An interval is
/// marked when the paired slope irregularity at its two end nodes dominates
/// the flanking irregularities, or when two curves already touch at one of
/// its endpoints.
fn mark_crossing_intervals(slices: &[SpectrumSlice], scale: f64) -> Vec<usize> {
    let m = slices.len();
    if m < 2 {
        return Vec::new();
    }
    let n = slices[0].mu.len();
    let tol = KINK_TOL * scale;
    let mut marked = vec![false; m - 1];

    // Touching curves at a grid point.
    for (i, s) in slices.iter().enumerate() {
        for k in 0..n.saturating_sub(1) {
            if s.mu[k + 1] - s.mu[k] < tol {
                if i > 0 {
                    marked[i - 1] = true;
                }
                if i < m - 1 {
                    marked[i] = true;
                }
            }
        }
    }

    // Slope-irregularity pairs. delta[i] is the slope change at interior node
    // i+1; a crossing inside interval j spikes delta at both of its end nodes.
    for curve in 0..n {
        let secant = |i: usize| {
            (slices[i + 1].mu[curve] - slices[i].mu[curve])
                / (slices[i + 1].lambda - slices[i].lambda)
        };
        let delta: Vec<f64> = (0..m - 2).map(|i| secant(i + 1) - secant(i)).collect();
        for j in 1..m - 2 {
            // Interval j has end nodes with slope changes delta[j-1], delta[j].
            let pair = delta[j - 1].abs() + delta[j].abs();
            let flank_left = if j >= 2 { delta[j - 2].abs() } else { 0.0 };
            let flank_right = if j + 1 < delta.len() {
                delta[j + 1].abs()
            } else {
                0.0
            };
            if pair > tol && pair > 4.0 * flank_left.max(flank_right) {
                marked[j] = true;
            }
        }
        // Boundary intervals only have one interior end node each.
        if !delta.is_empty() {
            let inner = if delta.len() > 1 { delta[1].abs() } else { 0.0 };
            if delta[0].abs() > tol && delta[0].abs() > 4.0 * inner {
                marked[0] = true;
            }
            let last = delta.len() - 1;
            let inner = if last >= 1 { delta[last - 1].abs() } else { 0.0 };
            if delta[last].abs() > tol && delta[last].abs() > 4.0 * inner {
                marked[m - 2] = true;
            }
        }
    }

    (0..m - 1).filter(|&i| marked[i]).collect()
}

/// Guarded bisection inside a marked interval: keep a bracket `(a, c, b)`,
/// probe the two half midpoints, and descend into the neighborhood of the
/// strongest slope irregularity. All probed slices are returned for insertion
/// into the table.
fn refine_interval(
    triple: &FormTriple,
    left: &SpectrumSlice,
    right: &SpectrumSlice,
    scale: f64,
) -> Result<Vec<SpectrumSlice>> {
    let tol = KINK_TOL * scale;
    let mut collected = Vec::new();
    let mut a = left.clone();
    let mut b = right.clone();
    let mid_lambda = 0.5 * (a.lambda + b.lambda);
    let mut c = slice(triple, mid_lambda)?;
    collected.push(c.clone());

    for _ in 0..REFINE_MAX_DEPTH {
        if b.lambda - a.lambda <= REFINE_MIN_WIDTH {
            break;
        }
        let pl = slice(triple, 0.5 * (a.lambda + c.lambda))?;
        let pr = slice(triple, 0.5 * (c.lambda + b.lambda))?;
        collected.push(pl.clone());
        collected.push(pr.clone());

        let kink = |lo: &SpectrumSlice, mid: &SpectrumSlice, hi: &SpectrumSlice| {
            let n = lo.mu.len();
            (0..n)
                .map(|k| {
                    let s1 = (mid.mu[k] - lo.mu[k]) / (mid.lambda - lo.lambda);
                    let s2 = (hi.mu[k] - mid.mu[k]) / (hi.lambda - mid.lambda);
                    (s2 - s1).abs()
                })
                .fold(0.0f64, f64::max)
        };
        let k_pl = kink(&a, &pl, &c);
        let k_c = kink(&pl, &c, &pr);
        let k_pr = kink(&c, &pr, &b);
        let best = k_pl.max(k_c).max(k_pr);
        if best <= tol {
            break;
        }
        if best == k_pl {
            b = c;
            c = pl;
        } else if best == k_c {
            a = pl;
            b = pr;
        } else {
            a = c;
            c = pr;
        }
    }
    Ok(collected)
}

/// Worst violation of the table's Lipschitz invariant
/// `|Δμ_n| ≤ (L + 1e-8·scale)·|Δλ|`; nonpositive when it holds.
pub fn lipschitz_defect(table: &EigencurveTable, scale: f64) -> f64 {
    let bound = table.lipschitz_bound + 1e-8 * scale;
    let mut worst = f64::NEG_INFINITY;
    for w in table.slices.windows(2) {
        let dl = w[1].lambda - w[0].lambda;
        for k in 0..w[0].mu.len() {
            let dm = (w[1].mu[k] - w[0].mu[k]).abs();
            worst = worst.max(dm - bound * dl);
        }
    }
    worst
}

/// Largest uniform-grid second difference of the first eigencurve over base
/// points; concavity means this stays at or below roundoff.
pub fn mu1_concavity_defect(table: &EigencurveTable) -> f64 {
    // Restrict to the base grid so spacing is uniform and noise on tiny
    // refined intervals cannot masquerade as curvature.
    let base: Vec<(f64, f64)> = {
        let step =
            (table.grid.hi - table.grid.lo) / (table.grid.base_points as f64 - 1.0);
        (0..table.grid.base_points)
            .filter_map(|i| {
                let lambda = table.grid.lo + i as f64 * step;
                table
                    .find_lambda(if i == table.grid.base_points - 1 {
                        table.grid.hi
                    } else {
                        lambda
                    })
                    .map(|idx| (table.slices[idx].lambda, table.slices[idx].mu[0]))
            })
            .collect()
    };
    let mut worst = f64::NEG_INFINITY;
    for w in base.windows(3) {
        worst = worst.max(w[2].1 - 2.0 * w[1].1 + w[0].1);
    }
    worst
}

/// Eigenvalue decomposition restricted to a subspace, exposed here for the
/// minimax cross-checks: the largest restricted eigenvalue upper-bounds the
/// matching eigencurve value.
pub fn restricted_slice(
    triple: &FormTriple,
    lambda: f64,
    basis: &[Vec<f64>],
) -> Result<EigenDecomposition> {
    pencil::restricted_pencil(&triple.pencil_at(lambda), triple.m(), basis)
}
