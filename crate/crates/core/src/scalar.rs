//! Numeric abstraction shared by every analytic in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Real scalar the analytics are written against.
///
/// Implemented for `f32` and `f64`. Constants are written as `f64`
/// literals and converted with [`Scalar::lit`].
pub trait Scalar:
    Float
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, which every implementor can represent.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    // Shifting by the first value keeps constant inputs exact.
    let base = values[0];
    let sum: T = values.iter().map(|&v| v - base).sum();
    Some(base + sum / T::from_count(values.len()))
}

/// Population variance (divisor `n`); `None` for an empty slice.
pub fn population_variance<T: Scalar>(values: &[T]) -> Option<T> {
    let m = mean(values)?;
    let ss: T = values.iter().map(|&v| (v - m) * (v - m)).sum();
    Some(ss / T::from_count(values.len()))
}

/// True when the spread of `values` around their mean is at rounding level
/// (or exactly zero), i.e. the series is constant for numerical purposes.
pub fn negligible_spread<T: Scalar>(values: &[T]) -> bool {
    let Some(m) = mean(values) else { return true };
    let ss: T = values.iter().map(|&v| (v - m) * (v - m)).sum();
    let std = (ss / T::from_count(values.len())).sqrt();
    let scale = values.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    // A NaN spread counts as negligible: nothing downstream can use it.
    std.partial_cmp(&(T::lit(16.0) * T::epsilon() * scale)) != Some(std::cmp::Ordering::Greater)
}
