//! Exact permanents of Schur matrices.
//!
//! For a prime `p = 1 (mod n)` the field `Z/pZ` holds a primitive `n`th root of
//! unity `g`, so `perm(S_n) mod p` is the permanent of the integer matrix
//! `(g^{jk} mod p)`. Residues for enough primes are combined by CRT into the
//! exact signed integer, using `|perm(S_n)| <= n^{n/2}`.

mod crt;
mod field;
mod primes;
mod schur;

pub use crt::{crt_reconstruct, CrtBasis};
pub use field::Fp;
pub use primes::{find_primes, find_primes_ascending, is_prime, schur_bound_bits, PrimeSearch};
pub use schur::{
    primitive_nth_root, schur_matrix_mod, schur_permanent_exact, schur_residue, schur_residue_with_root, solve_schur,
    ResidueWitness, SchurRun, DEFAULT_PRIME_BITS, SCHUR_MAX_DIMENSION,
};
