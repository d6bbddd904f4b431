//! Numeric abstraction for costs and coordinates.
//!
//! Every cost, coordinate and distance in the crate is carried as a
//! [`Scalar`]. Freight quantities (demands, capacities) are integral and
//! stay `u64` so capacity checks are exact.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + AddAssign
    + SubAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn of_u64(v: u64) -> Self {
        Self::from_u64(v).expect("u64 is representable in every float type")
    }

    fn of_f64(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every float type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + AddAssign
        + SubAssign
        + Sum
        + Default
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Relative comparison used by the delta-vs-recompute checks.
pub fn approx_eq<T: Scalar>(a: T, b: T, rel: f64) -> bool {
    let (a, b) = (a.as_f64(), b.as_f64());
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= rel * scale
}
