use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Element of `Z/pZ` for a prime `p < 2^62`. Products go through a 128-bit
/// intermediate.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus >= 2 && modulus < 1 << 62, "modulus out of range: {modulus}");
        Fp { value: value % modulus, modulus }
    }

    /// Reduces a signed integer.
    pub fn from_i64(value: i64, modulus: u64) -> Self {
        let r = value.rem_euclid(modulus as i64) as u64;
        Fp::new(r, modulus)
    }

    pub fn zero(modulus: u64) -> Self {
        Fp::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        Fp::new(1, modulus)
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::one(self.modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus - 2))
        }
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn signed(self) -> i128 {
        let v = self.value as i128;
        if 2 * v > self.modulus as i128 {
            v - self.modulus as i128
        } else {
            v
        }
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = self.value + rhs.value;
        let value = if s >= self.modulus { s - self.modulus } else { s };
        Fp { value, modulus: self.modulus }
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.modulus - rhs.value
        };
        Fp { value, modulus: self.modulus }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let value = ((self.value as u128 * rhs.value as u128) % self.modulus as u128) as u64;
        Fp { value, modulus: self.modulus }
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        let value = if self.value == 0 { 0 } else { self.modulus - self.value };
        Fp { value, modulus: self.modulus }
    }
}
