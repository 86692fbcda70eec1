use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Coefficient type for linear parameter constraints.
///
/// Parameters and valuations are always natural numbers; only the
/// coefficients and right-hand sides of constraints use `S`. The crate root
/// fixes the default to an exact rational, but `f64` works for quick
/// experiments.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn from_natural(v: u32) -> Self {
        Self::from_u32(v).expect("every scalar represents u32")
    }
}

impl<T> Scalar for T where
    T: Num + Signed + Clone + PartialOrd + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}
