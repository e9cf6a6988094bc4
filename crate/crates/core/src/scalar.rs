//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used for probabilities, costs and divergences.
///
/// Implemented for `f32` and `f64`. Tolerances elsewhere in the crate are
/// stated for `f64`; the `f32` instantiation is usable but looser.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the literal is unrepresentable,
    /// which cannot happen for finite `f64` into `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_count(c: usize) -> Self {
        Self::from_usize(c).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Allowed deviation of a probability vector's sum from one.
    ///
    /// `1e-9` for `f64`; for narrower types the bound grows with the
    /// accumulated rounding of an `n`-term sum.
    fn simplex_tolerance(n: usize) -> Self {
        let rounding = Self::epsilon() * Self::lit(16.0) * Self::from_count(n.max(1));
        rounding.max(Self::lit(1e-9))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
