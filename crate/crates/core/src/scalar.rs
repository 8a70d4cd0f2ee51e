//! Numeric traits shared by the generic engines.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed};

use crate::Rational;

/// Coefficient field of the average-Hamiltonian engine: exact rationals or floats.
pub trait Scalar: Num + Signed + Copy + Debug + PartialOrd + Send + Sync + 'static {
    fn from_rational(r: Rational) -> Self;

    fn from_int(i: i64) -> Self {
        Self::from_rational(Rational::from_integer(i))
    }

    /// Equality for this field: exact for rationals, relative tolerance for floats.
    fn approx_eq(self, other: Self) -> bool;
}

impl Scalar for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn approx_eq(self, other: Self) -> bool {
        self == other
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational(r: Rational) -> Self {
                *r.numer() as $t / *r.denom() as $t
            }

            fn approx_eq(self, other: Self) -> bool {
                (self - other).abs() <= 64.0 * <$t>::EPSILON * (1.0 + self.abs().max(other.abs()))
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

/// Real type of the state-vector simulator.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}
