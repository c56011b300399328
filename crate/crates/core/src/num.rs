use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Exact ratio of two counts.
pub type Fraction = Ratio<u64>;

/// Floating-point scalar used by the real-valued parts of the crate.
pub trait Real: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Lossy conversion from a count.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("every u64 is representable as a float")
    }

    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `num / den` as an exact fraction. `den` must be non-zero.
pub(crate) fn fraction(num: u64, den: u64) -> Fraction {
    Ratio::new(num, den)
}

/// Evaluates an exact fraction in the chosen scalar.
pub fn to_real<T: Real>(f: Fraction) -> T {
    T::from_count(*f.numer()) / T::from_count(*f.denom())
}
