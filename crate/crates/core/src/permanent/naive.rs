use super::KahanAccumulator;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, Scalar};

/// Largest dimension accepted by [`perm_naive`] (11! ~ 4e7 products).
pub const NAIVE_MAX_DIMENSION: usize = 11;

/// The defining sum over all `n!` permutations, enumerated with Heap's
/// algorithm. Meant as an oracle for the fast engines.
pub fn perm_naive<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    let n = m.n();
    if n > NAIVE_MAX_DIMENSION {
        return Err(Error::OracleDimensionExceeded { n, max: NAIVE_MAX_DIMENSION });
    }
    let product = |sigma: &[usize]| {
        let mut p = m.get(0, sigma[0]).clone();
        for (i, &j) in sigma.iter().enumerate().skip(1) {
            p = p * m.get(i, j).clone();
        }
        p
    };
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut acc = KahanAccumulator::new(m.get(0, 0).zero_like());
    acc.add(product(&sigma));
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                sigma.swap(0, i);
            } else {
                sigma.swap(counters[i], i);
            }
            acc.add(product(&sigma));
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(acc.total())
}
