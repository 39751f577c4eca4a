use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::modular::Fp;

/// Complex entries and permanent values: a pair of IEEE-754 doubles.
pub type ComplexScalar = Complex64;

/// A commutative ring the permanent engines can run over.
///
/// Constants are produced from an existing element (`zero_like`, `one_like`)
/// because some domains carry runtime parameters, e.g. the modulus of a prime
/// field.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Exact domains never round; floating domains get Kahan compensation.
    const EXACT: bool;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;

    /// Multiplies by `2^-k`, or `None` when 2 is not invertible.
    fn scale_by_inv_pow2(&self, k: u32) -> Option<Self>;

    fn conj(&self) -> Self {
        self.clone()
    }

    fn magnitude(&self) -> Option<f64> {
        None
    }

    /// One step of compensated summation. Exact domains add plainly.
    #[inline]
    fn compensated_add(sum: &mut Self, compensation: &mut Self, term: Self) {
        let _ = compensation;
        *sum = sum.clone() + term;
    }
}

#[inline]
fn kahan_step(sum: &mut f64, c: &mut f64, term: f64) {
    let y = term - *c;
    let t = *sum + y;
    *c = (t - *sum) - y;
    *sum = t;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn scale_by_inv_pow2(&self, k: u32) -> Option<Self> {
        Some(self * 2f64.powi(-(k as i32)))
    }
    fn magnitude(&self) -> Option<f64> {
        Some(self.abs())
    }
    #[inline]
    fn compensated_add(sum: &mut Self, compensation: &mut Self, term: Self) {
        kahan_step(sum, compensation, term);
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn scale_by_inv_pow2(&self, k: u32) -> Option<Self> {
        Some(self * 2f64.powi(-(k as i32)))
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> Option<f64> {
        Some(self.norm())
    }
    #[inline]
    fn compensated_add(sum: &mut Self, compensation: &mut Self, term: Self) {
        kahan_step(&mut sum.re, &mut compensation.re, term.re);
        kahan_step(&mut sum.im, &mut compensation.im, term.im);
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn scale_by_inv_pow2(&self, k: u32) -> Option<Self> {
        Some(self / BigRational::from_integer(BigInt::one() << k))
    }
    fn magnitude(&self) -> Option<f64> {
        use num_traits::{Signed, ToPrimitive};
        self.abs().to_f64()
    }
}

impl Scalar for Fp {
    const EXACT: bool = true;

    fn zero_like(&self) -> Self {
        Fp::zero(self.modulus())
    }
    fn one_like(&self) -> Self {
        Fp::one(self.modulus())
    }
    fn scale_by_inv_pow2(&self, k: u32) -> Option<Self> {
        let half = Fp::new(2, self.modulus()).inverse()?;
        Some(*self * half.pow(k as u64))
    }
}
