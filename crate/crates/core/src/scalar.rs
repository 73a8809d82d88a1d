//! Scalar abstraction shared by the summation and asymptotics code.
//!
//! Floating scalars accumulate with a compensated (Neumaier) sum; the exact
//! rational scalar accumulates without rounding. Everything above this module
//! is written once against [`Scalar`] or [`Real`].

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// A running sum over a scalar type.
pub trait Accumulator<S>: Default + Clone {
    fn add(&mut self, value: S);
    fn value(&self) -> S;
}

/// A number type the summation routines can run over.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + PartialOrd + Send + Sync {
    type Sum: Accumulator<Self>;

    fn from_int(v: i128) -> Self;

    /// Exact for every finite `f64` when the scalar can represent it.
    fn from_real(v: f64) -> Self;

    fn as_f64(&self) -> f64;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Floating scalars usable for asymptotic model evaluation and fitting.
pub trait Real: Scalar + Float + FromPrimitive + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<F> {
    sum: F,
    compensation: F,
}

impl<F: Float> Default for KahanSum<F> {
    fn default() -> Self {
        Self {
            sum: F::zero(),
            compensation: F::zero(),
        }
    }
}

impl<F: Float> KahanSum<F> {
    pub fn new() -> Self {
        Self::default()
    }
}

impl<F: Float> Accumulator<F> for KahanSum<F> {
    #[inline]
    fn add(&mut self, value: F) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation = self.compensation + ((self.sum - t) + value);
        } else {
            self.compensation = self.compensation + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> F {
        self.sum + self.compensation
    }
}

/// Plain summation for scalars whose addition is exact.
#[derive(Debug, Clone)]
pub struct ExactSum<S>(S);

impl<S: Scalar> Default for ExactSum<S> {
    fn default() -> Self {
        ExactSum(S::zero())
    }
}

impl<S: Scalar> Accumulator<S> for ExactSum<S> {
    fn add(&mut self, value: S) {
        self.0 = self.0.clone() + value;
    }

    fn value(&self) -> S {
        self.0.clone()
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Sum = KahanSum<$t>;

            #[inline]
            fn from_int(v: i128) -> Self {
                v as $t
            }

            #[inline]
            fn from_real(v: f64) -> Self {
                v as $t
            }

            #[inline]
            fn as_f64(&self) -> f64 {
                *self as f64
            }

            #[inline]
            fn abs_val(&self) -> Self {
                self.abs()
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    type Sum = ExactSum<BigRational>;

    fn from_int(v: i128) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_real(v: f64) -> Self {
        BigRational::from_float(v).expect("table values are finite")
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_addends() {
        let mut k = KahanSum::<f64>::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-12)).abs() < 1e-27);

        let mut naive = 1.0f64;
        for _ in 0..10_000 {
            naive += 1e-16;
        }
        assert_eq!(naive, 1.0);
    }

    #[test]
    fn kahan_handles_large_late_addend() {
        let mut k = KahanSum::<f64>::new();
        for v in [1.0, 1e100, 1.0, -1e100] {
            k.add(v);
        }
        assert_eq!(k.value(), 2.0);
    }

    #[test]
    fn rational_from_real_is_exact() {
        let r = BigRational::from_real(0.1);
        assert_eq!(r.as_f64(), 0.1);
        assert_ne!(r, BigRational::new(1.into(), 10.into()));
    }
}
