//! Dense linear-algebra kernels.
//!
//! Everything here works on a small row-major [`Matrix`]. The solver is LU
//! with partial pivoting; the Perron pair comes from power iteration on the
//! shifted matrix `A + I`, which keeps the dominant eigenvalue strictly
//! dominant in modulus even when the spectrum of `A` contains `-λ₁`.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;

/// Pivots smaller than this fraction of the row scale are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-13;

/// Shift applied before power iteration.
pub const PERRON_SHIFT: f64 = 1.0;
pub const PERRON_MAX_ITERATIONS: usize = 100_000;
/// Successive Rayleigh quotients must differ by less than this.
pub const PERRON_RAYLEIGH_TOLERANCE: f64 = 1e-13;
/// Relative eigen-residual `‖Aν − λν‖∞ / λ` accepted at exit.
pub const PERRON_RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Relative eigen-residual targeted before stopping early.
const PERRON_TARGET_RESIDUAL: f64 = 1e-12;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, a) in sums.iter_mut().zip(self.row(i)) {
                *s += a;
            }
        }
        sums
    }

    /// The principal submatrix with row and column `x` removed.
    pub fn without(&self, x: usize) -> Matrix {
        assert!(x < self.rows && x < self.cols);
        Matrix::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let i = if i < x { i } else { i + 1 };
            let j = if j < x { j } else { j + 1 };
            self[(i, j)]
        })
    }

    /// `max |self - other|` over all entries.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().copied()
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(&rows)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// LU factorization `PA = LU` with partial pivoting, stored packed.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &Matrix) -> Result<Lu> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let scale: Vec<f64> = (0..n).map(|i| norm_inf(m.row(i))).collect();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= PIVOT_TOLERANCE * scale[perm[p]] || pivot == 0.0 {
                return Err(Error::SingularMatrix {
                    column: k,
                    pivot: lu[(p, k)],
                });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / d;
                lu[(i, k)] = factor;
                if factor == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    lu[(i, j)] -= factor * lu[(k, j)];
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "Lu::solve: dimension mismatch");
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }
}

/// Solution of a linear system together with its residual `‖Mx − b‖∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub residual: f64,
}

pub fn residual(m: &Matrix, x: &[f64], b: &[f64]) -> f64 {
    let mx = m.mul_vec(x);
    mx.iter().zip(b).fold(0.0, |r, (a, b)| r.max((a - b).abs()))
}

/// Solves `Mx = b`.
pub fn solve(m: &Matrix, b: &[f64]) -> Result<Solution> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: b.len(),
        });
    }
    let lu = Lu::factor(m)?;
    let x = lu.solve(b);
    let residual = residual(m, &x, b);
    Ok(Solution { x, residual })
}

/// Dominant eigenvalue of a non-negative irreducible matrix and its positive
/// unit eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub lambda1: f64,
    pub nu: Vec<f64>,
}

impl PerronData {
    /// `‖Aν − λ₁ν‖∞`.
    pub fn residual(&self, adj: &Matrix) -> f64 {
        eigen_residual(adj, &self.nu, self.lambda1)
    }
}

fn eigen_residual(adj: &Matrix, x: &[f64], lambda: f64) -> f64 {
    let ax = adj.mul_vec(x);
    ax.iter()
        .zip(x)
        .fold(0.0, |r, (a, v)| r.max((a - lambda * v).abs()))
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in x.iter_mut() {
        *v /= norm;
    }
}

/// Perron pair of a connected graph.
pub fn perron(g: &Graph) -> Result<PerronData> {
    perron_of(g.adjacency())
}

/// Perron pair of a non-negative square matrix (normally a connected graph's
/// adjacency matrix).
pub fn perron_of(adj: &Matrix) -> Result<PerronData> {
    if !adj.is_square() {
        return Err(Error::DimensionMismatch {
            expected: adj.rows(),
            found: adj.cols(),
        });
    }
    let n = adj.rows();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut rayleigh = f64::NAN;
    let mut res = f64::INFINITY;

    for _ in 0..PERRON_MAX_ITERATIONS {
        let ax = adj.mul_vec(&x);
        let mut next: Vec<f64> = ax.iter().zip(&x).map(|(a, v)| a + PERRON_SHIFT * v).collect();
        normalize(&mut next);

        let an = adj.mul_vec(&next);
        let r: f64 = an.iter().zip(&next).map(|(a, v)| a * v).sum();
        res = an
            .iter()
            .zip(&next)
            .fold(0.0, |m, (a, v)| m.max((a - r * v).abs()));
        let settled = (r - rayleigh).abs() < PERRON_RAYLEIGH_TOLERANCE;
        rayleigh = r;
        x = next;

        // The Rayleigh quotient converges quadratically in the vector error,
        // so it settles long before ν does; require the residual as well.
        if settled && res <= PERRON_TARGET_RESIDUAL * r.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    if !(rayleigh > 0.0) || res > PERRON_RESIDUAL_TOLERANCE * rayleigh || x.iter().any(|&v| v <= 0.0)
    {
        return Err(Error::NoConvergence {
            iterations: PERRON_MAX_ITERATIONS,
            residual: res,
        });
    }
    Ok(PerronData {
        lambda1: rayleigh,
        nu: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![3.0, -1.5, 7.25];
        let s = solve(&Matrix::identity(3), &b).unwrap();
        assert_eq!(s.x, b);
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn diagonal_solve() {
        let m = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let s = solve(&m, &[2.0, 8.0]).unwrap();
        assert_eq!(s.x, vec![1.0, 2.0]);
    }

    #[test]
    fn geometric_series_solve() {
        // I - Q for the 1x1 substochastic Q = [[1/2]]
        let m = Matrix::from_rows(&[vec![0.5]]).unwrap();
        let s = solve(&m, &[1.0]).unwrap();
        assert_eq!(s.x, vec![2.0]);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(solve(&m, &[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
        let zero = Matrix::zeros(2, 2);
        assert!(matches!(solve(&zero, &[0.0, 0.0]), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = solve(&m, &[3.0, 5.0]).unwrap();
        assert_eq!(s.x, vec![5.0, 3.0]);
    }

    #[test]
    fn rhs_length_is_checked() {
        assert!(matches!(
            solve(&Matrix::identity(2), &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn perron_of_bipartite_k2() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = perron_of(&a).unwrap();
        assert!((p.lambda1 - 1.0).abs() < 1e-12);
        assert!(p.nu.iter().all(|v| (v - 0.5f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn without_removes_row_and_column() {
        let m = Matrix::from_fn(3, 3, |i, j| (3 * i + j) as f64);
        let w = m.without(1);
        assert_eq!(w.to_rows(), vec![vec![0.0, 2.0], vec![6.0, 8.0]]);
    }
}
