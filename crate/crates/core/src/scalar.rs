//! Scalar traits: exact rationals for geometry, floats for estimation.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact ordered field used by every set predicate.
///
/// Values that enter geometry are m-adic rationals, so the trait only
/// needs integer construction, scaled floor/ceil, and a lossy view for
/// reporting.
pub trait ExactScalar:
    Clone + Ord + Num + Signed + Debug + Display + Send + Sync + 'static
{
    fn from_i128(n: i128) -> Self;

    fn from_ratio(num: i128, den: i128) -> Self {
        Self::from_i128(num) / Self::from_i128(den)
    }

    /// `num / base^exp`.
    fn from_scaled(num: i128, base: u32, exp: u32) -> Self {
        Self::from_i128(num) / Self::from_i128(pow_i128(base, exp))
    }

    /// `base^-exp`.
    fn inv_pow(base: u32, exp: u32) -> Self {
        Self::from_scaled(1, base, exp)
    }

    /// `floor(self * base^exp)`.
    fn floor_scaled(&self, base: u32, exp: u32) -> i128;

    /// `ceil(self * base^exp)`.
    fn ceil_scaled(&self, base: u32, exp: u32) -> i128 {
        -(-self.clone()).floor_scaled(base, exp)
    }

    fn to_f64(&self) -> f64;
}

pub(crate) fn pow_i128(base: u32, exp: u32) -> i128 {
    (base as i128).checked_pow(exp).expect("m-adic denominator overflow")
}

macro_rules! impl_exact_ratio {
    ($int:ty) => {
        impl ExactScalar for Ratio<$int> {
            fn from_i128(n: i128) -> Self {
                Ratio::from_integer(<$int>::try_from(n).expect("integer out of range"))
            }

            fn floor_scaled(&self, base: u32, exp: u32) -> i128 {
                let scale = <$int>::try_from(pow_i128(base, exp)).expect("scale out of range");
                let scaled = Ratio::new(self.numer() * scale, self.denom().clone());
                scaled.floor().to_integer() as i128
            }

            fn to_f64(&self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    };
}

impl_exact_ratio!(i64);
impl_exact_ratio!(i128);

impl ExactScalar for BigRational {
    fn from_i128(n: i128) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn floor_scaled(&self, base: u32, exp: u32) -> i128 {
        let scaled = self * Ratio::from_integer(BigInt::from(base).pow(exp));
        scaled.floor().to_integer().to_i128().expect("index out of range")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Floating type used by regressions and rate estimates.
pub trait Real: num_traits::Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn floor_ceil_agree<Q: ExactScalar>() {
        let q = Q::from_ratio(7, 10);
        assert_eq!(q.floor_scaled(3, 2), 6);
        assert_eq!(q.ceil_scaled(3, 2), 7);
        let neg = Q::from_ratio(-1, 18);
        assert_eq!(neg.floor_scaled(3, 2), -1);
        assert_eq!(neg.ceil_scaled(3, 2), 0);
        let exact = Q::from_scaled(5, 3, 2);
        assert_eq!(exact.floor_scaled(3, 2), 5);
        assert_eq!(exact.ceil_scaled(3, 2), 5);
    }

    #[test]
    fn floor_and_ceil_for_every_scalar() {
        floor_ceil_agree::<Ratio<i64>>();
        floor_ceil_agree::<Ratio<i128>>();
        floor_ceil_agree::<BigRational>();
    }

    #[test]
    fn inverse_powers() {
        let q: Ratio<i128> = ExactScalar::inv_pow(3, 4);
        assert_eq!(q, Ratio::new(1, 81));
        assert!((ExactScalar::to_f64(&q) - 1.0 / 81.0).abs() < 1e-15);
    }
}
