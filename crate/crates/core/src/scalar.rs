//! Scalar abstractions shared by the whole crate.
//!
//! Measures are unsigned integers of any width; derived statistics are
//! floating point of either precision.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast, PrimInt, Unsigned};

/// Integer type able to hold a single consumption measure.
pub trait Measure:
    PrimInt + Unsigned + Hash + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless conversion to `u64`.
    #[inline]
    fn widen(self) -> u64 {
        self.to_u64().expect("unsigned measure fits in u64")
    }

    /// Conversion from `u64`, `None` when the value does not fit.
    #[inline]
    fn narrow(value: u64) -> Option<Self> {
        <Self as NumCast>::from(value)
    }
}

impl Measure for u8 {}
impl Measure for u16 {}
impl Measure for u32 {}
impl Measure for u64 {}

/// Floating point type used for fractions, entropies and correlations.
pub trait Real: Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    #[inline]
    fn of_f64(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("finite f64 converts")
    }

    #[inline]
    fn of_u128(value: u128) -> Self {
        <Self as FromPrimitive>::from_u128(value).expect("u128 converts to float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
