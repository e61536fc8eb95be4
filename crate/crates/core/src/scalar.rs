//! Scalar abstraction for the numeric parts of the toolkit.
//!
//! Everything that produces a real number (impurities, rates, entropies,
//! summary statistics) is written against [`Scalar`], so the same code runs
//! in `f32` or `f64`. Counts stay `usize`.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Converts a count. Counts in this crate are always representable.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in scalar")
    }

    /// Converts an `f64` literal or measurement.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits in scalar")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::one() / Self::two()
    }

    /// `count / total`, the plug-in probability estimate.
    #[inline]
    fn ratio(count: usize, total: usize) -> Self {
        Self::from_count(count) / Self::from_count(total)
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {}
