//! Dense square matrices over pluggable scalar domains.

mod build;
mod io;
mod linalg;
mod scalar;

pub use build::{build_all_ones, build_cycle, build_schur, identity};
pub use io::{parse_matrix, read_matrix_file, render_matrix, write_matrix_file, MatrixDocument, MatrixFile, MATRIX_SCHEMA};
pub use linalg::{adjoint, lu_log_abs_det, matmul, max_abs_diff, qr_decompose, unitarity_defect, LogDet};
pub use scalar::{ComplexScalar, Scalar};

use crate::error::{Error, Result};

/// Square dense matrix, row-major. Always `n >= 1` with exactly `n * n` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    entries: Vec<S>,
}

pub type CMatrix = Matrix<ComplexScalar>;

impl<S> Matrix<S> {
    pub fn from_vec(n: usize, entries: Vec<S>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != n * n {
            return Err(Error::NotSquare { expected: n * n, found: entries.len() });
        }
        Ok(Matrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare { expected: n, found: row.len() });
            }
            entries.extend(row);
        }
        Ok(Matrix { n, entries })
    }

    /// Builds an `n x n` matrix from an index function.
    ///
    /// Panics if `n == 0`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Matrix { n, entries }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut S {
        &mut self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    pub fn map<T>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }
}

impl<S: Clone> Matrix<S> {
    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Returns `P * self` where row `i` of the result is row `perm[i]` of self.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Matrix::from_fn(self.n, |i, j| self.get(perm[i], j).clone())
    }
}
