use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::ResidueWitness;
use crate::{Error, Result};

/// Primes `p = 1 (mod n)` and their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtBasis {
    pub n: usize,
    pub primes: Vec<u64>,
    pub product: BigUint,
}

impl CrtBasis {
    pub fn new(n: usize, primes: Vec<u64>) -> Self {
        let product = primes.iter().fold(BigUint::one(), |acc, &p| acc * p);
        CrtBasis { n, primes, product }
    }
}

/// Unique `x` in `(-P/2, P/2]` with `x = r_i (mod p_i)`. Witnesses may come in
/// any order but must cover the basis primes exactly once.
pub fn crt_reconstruct(witnesses: &[ResidueWitness], basis: &CrtBasis) -> Result<BigInt> {
    if witnesses.len() != basis.primes.len() {
        return Err(Error::BasisMismatch);
    }
    let mut x = BigUint::zero();
    for &p in &basis.primes {
        let w = witnesses.iter().find(|w| w.prime == p).ok_or(Error::BasisMismatch)?;
        if w.residue >= p {
            return Err(Error::BasisMismatch);
        }
        let pb = BigUint::from(p);
        let cofactor = &basis.product / &pb;
        let c_mod = (&cofactor % &pb).to_u64_digits().first().copied().unwrap_or(0);
        let inv = super::Fp::new(c_mod, p).inverse().ok_or(Error::BasisMismatch)?;
        let coeff = (super::Fp::new(w.residue, p) * inv).value();
        x += cofactor * coeff;
    }
    x %= &basis.product;
    let half = &basis.product >> 1u32;
    // x <= floor(P/2) is exactly x <= P/2 for integer x, whatever the parity of P.
    let lifted = if x > half {
        BigInt::from(x) - BigInt::from(basis.product.clone())
    } else {
        BigInt::from(x)
    };
    Ok(lifted)
}
