use crate::matrix::Scalar;

/// Running sum with a compensation term. Floating domains use Kahan's update;
/// exact domains add plainly and the compensation stays zero.
#[derive(Debug, Clone, PartialEq)]
pub struct KahanAccumulator<S> {
    sum: S,
    compensation: S,
}

impl<S: Scalar> KahanAccumulator<S> {
    pub fn new(zero: S) -> Self {
        KahanAccumulator { compensation: zero.clone(), sum: zero }
    }

    /// Starts from `value` with no pending compensation.
    pub fn starting_at(value: S) -> Self {
        KahanAccumulator { compensation: value.zero_like(), sum: value }
    }

    #[inline]
    pub fn add(&mut self, term: S) {
        S::compensated_add(&mut self.sum, &mut self.compensation, term);
    }

    pub fn sum(&self) -> &S {
        &self.sum
    }

    /// The sum with the outstanding compensation folded back in.
    pub fn total(&self) -> S {
        self.sum.clone() - self.compensation.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Error of compensated summation is checked against exact rational
    // accumulation of the same (exactly representable) doubles.
    #[test]
    fn error_does_not_grow_with_term_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &count in &[1_000usize, 100_000, 1_000_000] {
            let terms: Vec<f64> = (0..count).map(|_| rng.random_range(0.5..1.5) * 0.1).collect();
            let mut acc = KahanAccumulator::new(0.0);
            let mut naive = 0.0;
            let mut exact = BigRational::from_integer(BigInt::from(0));
            for &t in &terms {
                acc.add(t);
                naive += t;
                exact += BigRational::from_float(t).unwrap();
            }
            let exact = exact.to_f64().unwrap();
            let err = (acc.total() - exact).abs() / exact;
            assert!(err <= 2.0 * f64::EPSILON, "count {count}: rel err {err}, naive {}", (naive - exact).abs() / exact);
        }
    }

    #[test]
    fn exact_domain_is_plain_addition() {
        let mut acc = KahanAccumulator::new(BigRational::from_integer(0.into()));
        for k in 1..=10 {
            acc.add(BigRational::new(1.into(), k.into()));
        }
        assert_eq!(acc.total(), *acc.sum());
        assert_eq!(acc.total(), BigRational::new(7381.into(), 2520.into()));
    }
}
