use num_complex::Complex64;

use super::{identity, CMatrix, Matrix};

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.n();
    assert_eq!(n, b.n(), "dimension mismatch");
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = *a.get(i, k);
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, bkj) in b.row(k).iter().enumerate() {
                out[i * n + j] += aik * bkj;
            }
        }
    }
    Matrix::from_vec(n, out).expect("square product")
}

/// Conjugate transpose.
pub fn adjoint(a: &CMatrix) -> CMatrix {
    Matrix::from_fn(a.n(), |i, j| a.get(j, i).conj())
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Max entrywise `|M* M - I|`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let g = matmul(&adjoint(m), m);
    max_abs_diff(&g, &identity(m.n()))
}

/// Householder QR: returns `(Q, R)` with `Q R = G`, `Q` unitary and `R` upper
/// triangular. Rank deficiency is not an error; `R` may carry (near-)zero
/// diagonal entries. No phase normalization is applied here.
pub fn qr_decompose(g: &CMatrix) -> (CMatrix, CMatrix) {
    let n = g.n();
    let zero = Complex64::new(0.0, 0.0);
    let mut r: Vec<Complex64> = g.entries().to_vec();
    let mut q: Vec<Complex64> = identity::<Complex64>(n).into_entries();
    let mut v = vec![zero; n];

    for k in 0..n {
        let norm_x = (k..n).map(|i| r[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = r[k * n + k];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm_x;
        for i in 0..n {
            v[i] = if i < k { zero } else { r[i * n + k] };
        }
        v[k] = x0 - alpha;
        let vnorm2: f64 = (k..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // R <- H R on the trailing block.
        for j in k..n {
            let s: Complex64 = (k..n).map(|i| v[i].conj() * r[i * n + j]).sum();
            let s = s * beta;
            for i in k..n {
                r[i * n + j] -= s * v[i];
            }
        }
        // Q <- Q H.
        for i in 0..n {
            let s: Complex64 = (k..n).map(|l| q[i * n + l] * v[l]).sum();
            let s = s * beta;
            for l in k..n {
                q[i * n + l] -= s * v[l].conj();
            }
        }
        r[k * n + k] = alpha;
        for i in k + 1..n {
            r[i * n + k] = zero;
        }
    }
    (Matrix::from_vec(n, q).unwrap(), Matrix::from_vec(n, r).unwrap())
}

/// `det(M) = exp(log_abs) * phase`. A singular matrix yields
/// `log_abs = -inf` with `phase = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub phase: Complex64,
}

impl LogDet {
    pub fn is_singular(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    pub fn value(&self) -> Complex64 {
        self.phase * self.log_abs.exp()
    }
}

/// LU factorization with partial pivoting, accumulated in log space.
pub fn lu_log_abs_det(m: &CMatrix) -> LogDet {
    let n = m.n();
    let mut a: Vec<Complex64> = m.entries().to_vec();
    let mut log_abs = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let (p, pivot_abs) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return LogDet { log_abs: f64::NEG_INFINITY, phase: Complex64::new(0.0, 0.0) };
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            phase = -phase;
        }
        let pivot = a[k * n + k];
        log_abs += pivot_abs.ln();
        phase *= pivot / pivot_abs;
        let inv = 1.0 / pivot;
        for i in k + 1..n {
            let factor = a[i * n + k] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let u = a[k * n + j];
                a[i * n + j] -= factor * u;
            }
        }
        phase /= phase.norm();
    }
    LogDet { log_abs, phase }
}
