//! Dense symmetric matrices with exact-symmetry construction, plus the small
//! vector helpers the solvers need.

use crate::error::{Error, Result};

/// Dense symmetric matrix of order `n`, stored row-major in full.
///
/// Construction enforces bitwise symmetry (`entries[i][j] == entries[j][i]`)
/// and finiteness; every in-place mutation goes through [`SymMatrix::set_sym`]
/// so the invariant cannot drift.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Build from explicit rows, rejecting asymmetric or non-finite input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::OrderMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        Self::from_flat(n, data)
    }

    /// Build from a row-major slice of length `order * order`.
    pub fn from_flat(order: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::OrderMismatch {
                left: order * order,
                right: data.len(),
            });
        }
        let m = SymMatrix { order, data };
        m.check_valid("matrix")?;
        Ok(m)
    }

    fn check_valid(&self, context: &'static str) -> Result<()> {
        let n = self.order;
        for i in 0..n {
            for j in 0..n {
                let v = self.data[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { context, i, j });
                }
                if j > i {
                    let w = self.data[j * n + i];
                    if v != w {
                        return Err(Error::AsymmetricInput {
                            context,
                            i,
                            j,
                            a: v,
                            b: w,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Build by evaluating `f(i, j)` once per unordered pair `i <= j` and
    /// mirroring, so symmetry is exact by construction.
    pub fn from_fn_sym(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.set_sym(i, j, f(i, j));
            }
        }
        m
    }

    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    /// Set both mirrored entries.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
        self.data[j * self.order + i] = v;
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, &v| acc.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|&v| v * v).sum::<f64>().sqrt()
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order;
        debug_assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            y[i] = dot(row, x);
        }
        y
    }

    /// Bilinear evaluation `uᵀ S v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.mat_vec(v))
    }

    /// Quadratic form `uᵀ S u`.
    pub fn quadratic(&self, u: &[f64]) -> f64 {
        self.bilinear(u, u)
    }

    /// `self + c * other`; orders must match.
    pub fn add_scaled(&self, c: f64, other: &SymMatrix) -> Result<SymMatrix> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + c * b)
            .collect();
        Ok(SymMatrix {
            order: self.order,
            data,
        })
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix {
            order: self.order,
            data: self.data.iter().map(|&v| c * v).collect(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ` equal to the factored
/// matrix. Diagonal entries are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    order: usize,
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub(crate) fn new(order: usize, lower: Vec<f64>) -> Self {
        CholeskyFactor { order, lower }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.lower[i * self.order + j]
        }
    }

    /// Solve `L x = b` in place.
    pub fn forward_solve(&self, b: &mut [f64]) {
        let n = self.order;
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lower[i * n + j] * b[j];
            }
            b[i] = s / self.lower[i * n + i];
        }
    }

    /// Solve `Lᵀ x = b` in place.
    pub fn back_solve_transpose(&self, b: &mut [f64]) {
        let n = self.order;
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.lower[j * n + i] * b[j];
            }
            b[i] = s / self.lower[i * n + i];
        }
    }

    /// Reconstruct `L·Lᵀ`, used by validation checks.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.order;
        SymMatrix::from_fn_sym(n, |i, j| {
            let k = j.min(i);
            (0..=k)
                .map(|l| self.get(i, l) * self.get(j, l))
                .sum::<f64>()
        })
    }
}
