//! Floating-point scalar abstraction shared by every module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the whole crate is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Converts an index or count.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    /// Tolerance calibrated in double precision, rescaled to this type's epsilon.
    ///
    /// Identity for `f64`. For coarser types the value grows with the epsilon
    /// ratio but is capped at `sqrt(eps)` unless the requested value is already
    /// larger.
    fn tol(v: f64) -> Self {
        let eps = Self::epsilon().to_f64().unwrap_or(f64::EPSILON);
        if eps <= f64::EPSILON {
            return Self::lit(v);
        }
        let scaled = (v * eps / f64::EPSILON).min(eps.sqrt());
        Self::lit(v.max(scaled))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Binomial coefficient as a scalar, for Leibniz-rule sums.
pub(crate) fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_usize_lossy(n - i) / T::from_usize_lossy(i + 1);
    }
    acc
}
