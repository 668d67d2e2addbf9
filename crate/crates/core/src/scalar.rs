//! Scalar abstraction shared by the series and operator code.
//!
//! The algebraic kernels (Cauchy products, the power recurrence, the operator
//! and the eigen-coefficient solve) only need field arithmetic, so they are
//! written against [`Scalar`]. Real-valued guards additionally need an order,
//! which [`RealScalar`] adds. `f32`, `f64`, `Complex<f32>`, `Complex<f64>`
//! and `BigRational` are provided.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Field element usable as a series coefficient.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync + 'static {
    /// Conversion from a double. Exact for `BigRational` (binary value of the double).
    fn from_f64(x: f64) -> Self;

    fn from_i64(x: i64) -> Self;

    /// Absolute value (modulus for complex scalars) as a double.
    fn magnitude(&self) -> f64;

    /// False for NaN or infinite components.
    fn finite(&self) -> bool;

    fn from_usize(x: usize) -> Self {
        Self::from_i64(x as i64)
    }
}

/// Ordered scalar (real line).
pub trait RealScalar: Scalar + PartialOrd {
    fn to_f64(&self) -> f64;
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn from_i64(x: i64) -> Self {
                x as $t
            }
            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }
            fn finite(&self) -> bool {
                self.is_finite()
            }
        }

        impl RealScalar for $t {
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }

        impl Scalar for Complex<$t> {
            fn from_f64(x: f64) -> Self {
                Complex::new(x as $t, 0.0)
            }
            fn from_i64(x: i64) -> Self {
                Complex::new(x as $t, 0.0)
            }
            fn magnitude(&self) -> f64 {
                self.norm() as f64
            }
            fn finite(&self) -> bool {
                self.re.is_finite() && self.im.is_finite()
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(self).map(f64::abs).unwrap_or(f64::INFINITY)
    }
    fn finite(&self) -> bool {
        true
    }
}

impl RealScalar for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `x^n` by repeated squaring, using only field multiplication.
pub fn powi<T: Scalar>(x: &T, n: u32) -> T {
    num_traits::pow(x.clone(), n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_from_f64_is_exact() {
        let half = <BigRational as Scalar>::from_f64(0.5);
        assert_eq!(half, BigRational::new(1.into(), 2.into()));
        assert_eq!(half.magnitude(), 0.5);
    }

    #[test]
    fn complex_magnitude_is_modulus() {
        let z = Complex::new(3.0_f64, 4.0);
        assert_eq!(z.magnitude(), 5.0);
        assert!(!Complex::new(f64::NAN, 0.0).finite());
    }

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(&3.0_f64, 4), 81.0);
        assert_eq!(powi(&2.0_f64, 0), 1.0);
        let r = <BigRational as Scalar>::from_i64(-2);
        assert_eq!(powi(&r, 3), <BigRational as Scalar>::from_i64(-8));
    }
}
