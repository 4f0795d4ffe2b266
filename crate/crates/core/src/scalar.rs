//! Numeric abstraction for money-valued quantities.
//!
//! Costs and weights are generic over [`Scalar`] so the same model and solver
//! run on exact integers (the default), exact rationals, or floats.
//! Bandwidths and module counts stay `u64` everywhere.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::Num;

/// A money-like quantity: additive, multiplicable by a count, ordered.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// Converts a module or unit count into this scalar.
    fn from_count(n: u64) -> Self;

    /// Lossy conversion for reporting ratios.
    fn to_f64(&self) -> f64;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    /// Total order used for deterministic tie-breaking. Incomparable values
    /// (NaN) compare equal.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

macro_rules! int_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_count(n: u64) -> Self {
                <$t>::try_from(n).expect("count does not fit the scalar type")
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    )*};
}

int_scalar!(u32, u64, i32, i64, u128, i128);

impl Scalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for Ratio<i64> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count does not fit i64"))
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Sums an iterator of scalars (starting from zero).
pub fn sum<C: Scalar>(iter: impl IntoIterator<Item = C>) -> C {
    iter.into_iter().fold(C::zero(), |acc, x| acc + x)
}

/// Wrapper giving a [`Scalar`] a total order, for heaps and sorting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ordered<C>(pub C);

impl<C: Scalar> Eq for Ordered<C> {}

impl<C: Scalar> PartialOrd for Ordered<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Scalar> Ord for Ordered<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}
