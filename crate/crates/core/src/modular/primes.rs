use num_bigint::BigUint;
use num_traits::One;

use super::CrtBasis;
use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs (first twelve prime bases).
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `p = 1 (mod n)` in ascending or descending order.
#[derive(Debug, Clone)]
pub struct PrimeSearch {
    n: u64,
    next: Option<u64>,
    descending: bool,
}

impl PrimeSearch {
    /// Candidates `>= from`, ascending.
    pub fn ascending(n: usize, from: u64) -> Self {
        let n = n as u64;
        let first = if from <= 1 { 1 } else { (from - 1).div_ceil(n) * n + 1 };
        PrimeSearch { n, next: Some(first), descending: false }
    }

    /// Candidates `< 2^bits`, descending.
    pub fn below_power_of_two(n: usize, bits: u32) -> Self {
        let n = n as u64;
        let top = (1u64 << bits) - 1;
        let first = (top - 1) / n * n + 1;
        PrimeSearch { n, next: Some(first), descending: true }
    }
}

impl Iterator for PrimeSearch {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            let c = self.next?;
            self.next = if self.descending { c.checked_sub(self.n).filter(|&v| v >= 2) } else { c.checked_add(self.n) };
            if is_prime(c) {
                return Some(c);
            }
        }
    }
}

/// Bit count `b` with `2^b > 4 * n^{n/2}`, i.e. room for the signed range of
/// `perm(S_n)` plus one bit of slack.
pub fn schur_bound_bits(n: usize) -> u64 {
    // ceil(sqrt(n^n)) bounds n^{n/2} from above.
    let nn = BigUint::from(n as u64).pow(n as u32);
    let mut root = nn.sqrt();
    if &root * &root < nn {
        root += 1u32;
    }
    (root * 4u32).bits()
}

fn collect_basis(n: usize, needed_product_bits: u64, search: PrimeSearch, width: u32) -> Result<CrtBasis> {
    let mut product = BigUint::one();
    let mut primes = Vec::new();
    for p in search {
        primes.push(p);
        product *= p;
        if product.bits() > needed_product_bits {
            return Ok(CrtBasis { n, primes, product });
        }
    }
    Err(Error::InsufficientPrimes { n, width, needed_bits: needed_product_bits })
}

/// Fewest primes `p = 1 (mod n)`, taken downward from `2^max_bits`, whose
/// product exceeds `2^needed_product_bits`. Fails when the width holds too
/// few such primes.
pub fn find_primes(n: usize, needed_product_bits: u64, max_bits: u32) -> Result<CrtBasis> {
    assert!(n >= 1, "n must be positive");
    assert!((2..=62).contains(&max_bits), "prime width must be in 2..=62 bits");
    collect_basis(n, needed_product_bits, PrimeSearch::below_power_of_two(n, max_bits), max_bits)
}

/// Same as [`find_primes`] but scanning upward from 2.
pub fn find_primes_ascending(n: usize, needed_product_bits: u64) -> Result<CrtBasis> {
    collect_basis(n, needed_product_bits, PrimeSearch::ascending(n, 2), 64)
}
