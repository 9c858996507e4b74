//! Scalar abstraction shared by the scoring, optimisation and embedding code.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the numeric modules are generic over.
///
/// Implemented for `f32` and `f64`. Text-derived quantities (lexicon weights,
/// triple confidences) stay `f64` and are converted on entry with
/// [`Real::from_f64_lossy`].
pub trait Real:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Sum + Send + Sync + 'static
{
    fn from_f64_lossy(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).unwrap_or_else(Self::nan)
    }

    fn from_count(count: usize) -> Self {
        <Self as FromPrimitive>::from_usize(count).unwrap_or_else(Self::infinity)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_error<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).abs() / scale
    }
}
