use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{crt_reconstruct, find_primes, schur_bound_bits, CrtBasis, Fp, PrimeSearch};
use crate::exec;
use crate::matrix::Matrix;
use crate::permanent::{default_block_count, make_block_plan, perm_with_plan, Algorithm};
use crate::{Error, Result};

/// Default prime width in bits.
pub const DEFAULT_PRIME_BITS: u32 = 59;

/// Largest `n` accepted by [`schur_permanent_exact`].
pub const SCHUR_MAX_DIMENSION: usize = 24;

/// One prime of the pipeline: the root used and `perm(S_n) mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueWitness {
    pub prime: u64,
    pub root: u64,
    pub residue: u64,
}

/// Outcome of [`solve_schur`]. `check` is a residue for a prime outside the
/// basis that the reconstructed value was tested against.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurRun {
    pub basis: CrtBasis,
    pub witnesses: Vec<ResidueWitness>,
    pub check: ResidueWitness,
    pub value: BigInt,
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_primitive(g: Fp, n: usize, factors: &[usize]) -> bool {
    let one = Fp::one(g.modulus());
    g.pow(n as u64) == one && factors.iter().all(|&q| g.pow((n / q) as u64) != one)
}

/// Primitive `n`th root of unity mod `p`, from `c^{(p-1)/n}` for `c = 2, 3, ...`.
pub fn primitive_nth_root(p: u64, n: usize) -> Result<Fp> {
    if n == 0 || p < 2 || (p - 1) % n as u64 != 0 {
        return Err(Error::NoNthRoot { p, n });
    }
    let factors = prime_factors(n);
    let e = (p - 1) / n as u64;
    (1..p)
        .map(|c| Fp::new(c, p).pow(e))
        .find(|&g| is_primitive(g, n, &factors))
        .ok_or(Error::NoNthRoot { p, n })
}

/// The matrix `(g^{jk} mod p)`.
pub fn schur_matrix_mod(n: usize, g: Fp) -> Matrix<Fp> {
    let powers: Vec<Fp> = (0..n as u64).map(|e| g.pow(e)).collect();
    Matrix::from_fn(n, |j, k| powers[(j * k) % n])
}

/// `perm(S_n) mod p` using the given root, which must be a primitive `n`th root.
pub fn schur_residue_with_root(n: usize, g: Fp) -> Result<ResidueWitness> {
    let p = g.modulus();
    if !is_primitive(g, n, &prime_factors(n)) {
        return Err(Error::NoNthRoot { p, n });
    }
    let m = schur_matrix_mod(n, g);
    let blocks = default_block_count(n, Algorithm::Ryser, exec::current_workers());
    let plan = make_block_plan(n, Algorithm::Ryser, blocks)?;
    let residue = perm_with_plan(&m, &plan)?.value();
    Ok(ResidueWitness { prime: p, root: g.value(), residue })
}

/// `perm(S_n) mod p`.
pub fn schur_residue(n: usize, p: u64) -> Result<ResidueWitness> {
    let g = primitive_nth_root(p, n)?;
    schur_residue_with_root(n, g)
}

/// Full pipeline: basis, residues (in parallel across primes), reconstruction
/// and a consistency check against one extra prime.
pub fn solve_schur(n: usize, prime_bits: u32) -> Result<SchurRun> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if n > SCHUR_MAX_DIMENSION {
        return Err(Error::DimensionTooLarge { n, max: SCHUR_MAX_DIMENSION });
    }
    if !(8..=62).contains(&prime_bits) {
        return Err(Error::InvalidParameter(format!("prime width {prime_bits} outside 8..=62 bits")));
    }
    let basis = find_primes(n, schur_bound_bits(n), prime_bits)?;
    let last = *basis.primes.last().expect("basis is never empty");
    let extra = PrimeSearch::below_power_of_two(n, prime_bits)
        .find(|&p| p < last)
        .ok_or_else(|| Error::InvalidParameter(format!("no spare prime below {last}")))?;
    let mut all = basis.primes.clone();
    all.push(extra);
    let mut witnesses = exec::map_slice(&all, |&p| schur_residue(n, p)).into_iter().collect::<Result<Vec<_>>>()?;
    let check = witnesses.pop().expect("extra witness present");
    let value = crt_reconstruct(&witnesses, &basis)?;
    let expected = Fp::new(mod_u64(&value, check.prime), check.prime).value();
    if expected != check.residue {
        return Err(Error::InconsistentResidue { prime: check.prime });
    }
    Ok(SchurRun { basis, witnesses, check, value })
}

fn mod_u64(x: &BigInt, p: u64) -> u64 {
    let p = BigInt::from(p);
    let r = ((x % &p) + &p) % &p;
    r.to_u64_digits().1.first().copied().unwrap_or(0)
}

/// Exact `perm(S_n)` for `1 <= n <= 24`.
pub fn schur_permanent_exact(n: usize) -> Result<BigInt> {
    solve_schur(n, DEFAULT_PRIME_BITS).map(|run| run.value)
}
