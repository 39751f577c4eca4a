use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{CMatrix, Matrix};

pub fn identity<S: Zero + One + Clone>(n: usize) -> Matrix<S> {
    Matrix::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
}

pub fn build_all_ones<S: One + Clone>(n: usize) -> Matrix<S> {
    Matrix::from_fn(n, |_, _| S::one())
}

/// Schur matrix `S_n = (e^{2 pi i jk / n})`, or the unitary DFT `S_n / sqrt(n)`.
///
/// The exponent is reduced modulo `n` before evaluating, so equal residues give
/// bit-identical entries and the matrix is exactly symmetric.
pub fn build_schur(n: usize, normalized: bool) -> CMatrix {
    let scale = if normalized { 1.0 / (n as f64).sqrt() } else { 1.0 };
    Matrix::from_fn(n, |j, k| {
        let r = (j * k) % n;
        root_of_unity(r, n) * scale
    })
}

/// `e^{2 pi i r / n}` with exact values on the axes.
pub(crate) fn root_of_unity(r: usize, n: usize) -> Complex64 {
    let r = r % n;
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 4 * r == n {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * r == n {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r == 3 * n {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// Cyclic permutation matrix with `(C_n)_{ij} = 1` iff `i = j + 1 (mod n)`.
pub fn build_cycle(n: usize) -> CMatrix {
    Matrix::from_fn(n, |i, j| {
        if i == (j + 1) % n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
