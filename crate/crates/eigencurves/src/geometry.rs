//! Superlevel-set component counting and straight-line intersection geometry.
//!
//! For a level `μ*` away from the base spectrum, each eigencurve's superlevel
//! set `{λ : μ_n(λ) > μ*}` decomposes into components whose finite endpoints
//! sit on the level. The counts obey `K_1 ≤ 1`, `K_n ≤ n`, and
//! `Σ_{i≤n} K_i ≤ n`, finite components nest or stay disjoint across curves,
//! and endpoint eigenvectors satisfy a sign condition on the `b` form.
//! Non-horizontal lines reduce to horizontal ones through the change of
//! variables `b ← b + α·m`.

use rayon::prelude::*;

use crate::analysis;
use crate::curves::{self, EigencurveTable, LambdaGrid};
use crate::error::{Error, Result};
use crate::forms::{self, FormTriple};
use crate::pencil;

/// λ-tolerance to which finite component endpoints are located by bisection.
const ENDPOINT_TOL: f64 = 1e-10;
/// Slack used when comparing located endpoints across curves.
const NESTING_SLACK: f64 = 1e-8;

/// A straight line `μ = αλ + β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSpec {
    pub alpha: f64,
    pub beta: f64,
}

/// One maximal interval of `{μ_n > μ*}`.
///
/// Infinite endpoints are `f64::NEG_INFINITY` / `f64::INFINITY`. A curve that
/// stays above the level across the whole traced window without ever touching
/// it is reported as a single unbounded interval flagged `no_touch`; such
/// pseudo-components have no endpoint on the level and are excluded from the
/// counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentInterval {
    pub lo: f64,
    pub hi: f64,
    pub no_touch: bool,
}

/// Components of one curve above the level.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveComponents {
    /// 1-based curve index.
    pub curve: usize,
    pub intervals: Vec<ComponentInterval>,
    /// Number of genuine components (`no_touch` intervals excluded).
    pub count: usize,
}

/// Per-level component report.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub mu_star: f64,
    pub curves: Vec<CurveComponents>,
    /// `partial_sums[i] = Σ_{n ≤ i+1} K_n`.
    pub partial_sums: Vec<usize>,
}

/// A violated counting invariant, with the offending level and curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingViolation {
    pub mu_star: f64,
    pub curve: Option<usize>,
    pub description: String,
}

/// Outcome of [`verify_counting`].
#[derive(Debug, Clone, PartialEq)]
pub struct CountingOutcome {
    pub reports: Vec<ComponentReport>,
    pub violation: Option<CountingViolation>,
}

impl CountingOutcome {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Count superlevel components of every curve at one level, tracing the grid
/// internally. See [`components_on`] for the table-reusing variant.
pub fn components(triple: &FormTriple, grid: &LambdaGrid, mu_star: f64) -> Result<ComponentReport> {
    let table = curves::trace(triple, grid)?;
    components_on(triple, &table, mu_star)
}

/// Count superlevel components against an already-traced table.
///
/// Sign changes on the traced grid are refined by bisection (re-solving
/// slices) to a λ-tolerance of `1e-10`. Unbounded tails are certified by the
/// asymptotic slopes: an above-tail escaping the window needs a strictly
/// matching slope sign, otherwise the window cannot determine the component
/// and `GridTooNarrow` is reported.
pub fn components_on(
    triple: &FormTriple,
    table: &EigencurveTable,
    mu_star: f64,
) -> Result<ComponentReport> {
    let cluster_tol = analysis::default_cluster_tol(triple);
    let base = pencil::solve_pencil_values(triple.a(), triple.m())?;
    if let Some(&nearest) = base
        .iter()
        .find(|&&v| (v - mu_star).abs() <= cluster_tol)
    {
        return Err(Error::LevelTooCloseToSpectrum {
            level: mu_star,
            nearest,
            tol: cluster_tol,
        });
    }

    let eta_right = analysis::asymptotics(triple)?.eta;
    let eta_left = analysis::asymptotics_left(triple)?;
    let tol_eta = 1e-10 * triple.scale();
    let n = table.order();
    let npts = table.slices.len();

    let mut curves_out = Vec::with_capacity(n);
    for curve in 1..=n {
        let above: Vec<bool> = table
            .slices
            .iter()
            .map(|s| s.mu[curve - 1] > mu_star)
            .collect();

        // Tail sanity for below-at-edge curves: a strictly escaping slope
        // means the curve rises above the level beyond the window, hiding a
        // component endpoint out there.
        if !above[npts - 1] && eta_right[curve - 1] > tol_eta {
            return Err(Error::GridTooNarrow {
                curve,
                side: "right",
                eta: eta_right[curve - 1],
            });
        }
        if !above[0] && eta_left[curve - 1] > tol_eta {
            return Err(Error::GridTooNarrow {
                curve,
                side: "left",
                eta: eta_left[curve - 1],
            });
        }

        let mut intervals = Vec::new();
        let mut i = 0;
        while i < npts {
            if !above[i] {
                i += 1;
                continue;
            }
            let run_start = i;
            while i < npts && above[i] {
                i += 1;
            }
            let run_end = i - 1; // inclusive

            let touches_left = run_start == 0;
            let touches_right = run_end == npts - 1;

            if touches_left && touches_right {
                // Above across the whole window with no touch. Only plausible
                // when neither asymptote descends; otherwise the curve must
                // come back down beyond the window.
                if eta_right[curve - 1] < -tol_eta {
                    return Err(Error::GridTooNarrow {
                        curve,
                        side: "right",
                        eta: eta_right[curve - 1],
                    });
                }
                if eta_left[curve - 1] < -tol_eta {
                    return Err(Error::GridTooNarrow {
                        curve,
                        side: "left",
                        eta: eta_left[curve - 1],
                    });
                }
                intervals.push(ComponentInterval {
                    lo: f64::NEG_INFINITY,
                    hi: f64::INFINITY,
                    no_touch: true,
                });
                continue;
            }

            let lo = if touches_left {
                if eta_left[curve - 1] <= tol_eta {
                    return Err(Error::GridTooNarrow {
                        curve,
                        side: "left",
                        eta: eta_left[curve - 1],
                    });
                }
                f64::NEG_INFINITY
            } else {
                locate_crossing(triple, table, curve, run_start - 1, run_start, mu_star)?
            };
            let hi = if touches_right {
                if eta_right[curve - 1] <= tol_eta {
                    return Err(Error::GridTooNarrow {
                        curve,
                        side: "right",
                        eta: eta_right[curve - 1],
                    });
                }
                f64::INFINITY
            } else {
                locate_crossing(triple, table, curve, run_end + 1, run_end, mu_star)?
            };
            intervals.push(ComponentInterval {
                lo,
                hi,
                no_touch: false,
            });
        }

        let count = intervals.iter().filter(|c| !c.no_touch).count();
        curves_out.push(CurveComponents {
            curve,
            intervals,
            count,
        });
    }

    let mut partial_sums = Vec::with_capacity(n);
    let mut acc = 0;
    for c in &curves_out {
        acc += c.count;
        partial_sums.push(acc);
    }
    Ok(ComponentReport {
        mu_star,
        curves: curves_out,
        partial_sums,
    })
}

/// Bisect between a below-or-touching grid index and an above index until the
/// bracket is narrower than the endpoint tolerance. Indices are grid
/// positions; `below_idx` may sit on either side of `above_idx`.
fn locate_crossing(
    triple: &FormTriple,
    table: &EigencurveTable,
    curve: usize,
    below_idx: usize,
    above_idx: usize,
    mu_star: f64,
) -> Result<f64> {
    let f_below = table.slices[below_idx].mu[curve - 1] - mu_star;
    if f_below == 0.0 {
        return Ok(table.slices[below_idx].lambda);
    }
    let mut below = table.slices[below_idx].lambda;
    let mut above = table.slices[above_idx].lambda;
    while (below - above).abs() > ENDPOINT_TOL {
        let mid = 0.5 * (below + above);
        let f = curves::slice_values(triple, mid)?[curve - 1] - mu_star;
        if f > 0.0 {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(0.5 * (below + above))
}

/// Structural invariants of a single report: interval ordering and count
/// consistency per curve, `K_1 ≤ 1`, `K_n ≤ n`, partial sums `≤ n`, and the
/// cross-curve nesting property for finite components.
pub fn check_component_invariants(
    report: &ComponentReport,
    order: usize,
) -> std::result::Result<(), CountingViolation> {
    let violation = |curve: Option<usize>, description: String| CountingViolation {
        mu_star: report.mu_star,
        curve,
        description,
    };
    if report.curves.len() != order || report.partial_sums.len() != order {
        return Err(violation(None, "report size does not match order".into()));
    }

    let mut acc = 0;
    for (i, c) in report.curves.iter().enumerate() {
        let n = i + 1;
        if c.curve != n {
            return Err(violation(Some(n), "curve indices out of order".into()));
        }
        let real = c.intervals.iter().filter(|iv| !iv.no_touch).count();
        if real != c.count {
            return Err(violation(
                Some(n),
                format!("count {} does not match {} intervals", c.count, real),
            ));
        }
        for w in c.intervals.windows(2) {
            if w[0].hi > w[1].lo + NESTING_SLACK {
                return Err(violation(Some(n), "intervals overlap or unsorted".into()));
            }
        }
        for iv in &c.intervals {
            if !(iv.lo < iv.hi) {
                return Err(violation(Some(n), "empty or inverted interval".into()));
            }
            if iv.no_touch && (iv.lo.is_finite() || iv.hi.is_finite()) {
                return Err(violation(
                    Some(n),
                    "no_touch interval must be unbounded on both sides".into(),
                ));
            }
        }
        if n == 1 && c.count > 1 {
            return Err(violation(Some(1), format!("K_1 = {} exceeds 1", c.count)));
        }
        if c.count > n {
            return Err(violation(
                Some(n),
                format!("K_{n} = {} exceeds {n}", c.count),
            ));
        }
        acc += c.count;
        if report.partial_sums[i] != acc {
            return Err(violation(Some(n), "partial sums inconsistent".into()));
        }
        if acc > n {
            return Err(violation(
                Some(n),
                format!("partial sum {acc} exceeds {n}"),
            ));
        }
    }

    // Nesting: finite components across curves are nested or disjoint.
    let finite: Vec<(usize, ComponentInterval)> = report
        .curves
        .iter()
        .flat_map(|c| {
            c.intervals
                .iter()
                .filter(|iv| iv.lo.is_finite() && iv.hi.is_finite())
                .map(move |iv| (c.curve, *iv))
        })
        .collect();
    for (i, (ci, a)) in finite.iter().enumerate() {
        for (cj, b) in finite.iter().skip(i + 1) {
            let disjoint = a.hi <= b.lo + NESTING_SLACK || b.hi <= a.lo + NESTING_SLACK;
            let a_in_b = b.lo <= a.lo + NESTING_SLACK && a.hi <= b.hi + NESTING_SLACK;
            let b_in_a = a.lo <= b.lo + NESTING_SLACK && b.hi <= a.hi + NESTING_SLACK;
            if !(disjoint || a_in_b || b_in_a) {
                return Err(violation(
                    Some(*cj),
                    format!(
                        "components ({}, {}) of curve {} and ({}, {}) of curve {} neither nest nor stay disjoint",
                        a.lo, a.hi, ci, b.lo, b.hi, cj
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// Endpoint sign condition: at a located left endpoint the eigenspace admits
/// a vector with `b(e,e) ≤ 0`, at a right endpoint one with `b(e,e) ≥ 0`,
/// both up to `1e-8·scale`.
pub fn check_endpoint_signs(
    triple: &FormTriple,
    report: &ComponentReport,
) -> Result<std::result::Result<(), CountingViolation>> {
    let tol = 1e-8 * triple.scale();
    for c in &report.curves {
        for iv in &c.intervals {
            if iv.no_touch {
                continue;
            }
            if iv.lo.is_finite() {
                let a = analysis::eigenpoint(triple, iv.lo, report.mu_star)?;
                let b_max = *a.b_values.last().expect("nonempty cluster");
                if b_max < -tol {
                    return Ok(Err(CountingViolation {
                        mu_star: report.mu_star,
                        curve: Some(c.curve),
                        description: format!(
                            "left endpoint {} admits no vector with b(e,e) <= 0 (derivative range max {b_max})",
                            iv.lo
                        ),
                    }));
                }
            }
            if iv.hi.is_finite() {
                let a = analysis::eigenpoint(triple, iv.hi, report.mu_star)?;
                let b_min = a.b_values[0];
                if b_min > tol {
                    return Ok(Err(CountingViolation {
                        mu_star: report.mu_star,
                        curve: Some(c.curve),
                        description: format!(
                            "right endpoint {} admits no vector with b(e,e) >= 0 (derivative range min {b_min})",
                            iv.hi
                        ),
                    }));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// Run [`components_on`] at every level, asserting all counting invariants
/// plus the endpoint sign condition. Stops at the first violation.
pub fn verify_counting(
    triple: &FormTriple,
    grid: &LambdaGrid,
    levels: &[f64],
) -> Result<CountingOutcome> {
    let table = curves::trace(triple, grid)?;
    let reports: Vec<ComponentReport> = levels
        .par_iter()
        .map(|&mu| components_on(triple, &table, mu))
        .collect::<Result<_>>()?;
    let order = triple.order();
    for report in &reports {
        if let Err(v) = check_component_invariants(report, order) {
            return Ok(CountingOutcome {
                reports,
                violation: Some(v),
            });
        }
        if let Err(v) = check_endpoint_signs(triple, report)? {
            return Ok(CountingOutcome {
                reports,
                violation: Some(v),
            });
        }
    }
    Ok(CountingOutcome {
        reports,
        violation: None,
    })
}

/// Change of variables for intersecting the spectrum with the line
/// `μ = αλ + β`: the triple `(A, B + αM, M)` has eigencurves
/// `μ_n(λ) − αλ`, so intersections with the line become intersections with
/// the horizontal level `β`.
pub fn transform_line(triple: &FormTriple, line: &LineSpec) -> Result<FormTriple> {
    if !line.alpha.is_finite() || !line.beta.is_finite() {
        return Err(Error::InvalidParameter(
            "line coefficients must be finite".into(),
        ));
    }
    let b = triple.b().add_scaled(line.alpha, triple.m())?;
    Ok(forms::validate(triple.a().clone(), b, triple.m().clone())?.0)
}
