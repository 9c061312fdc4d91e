//! Floating-point abstraction used by every numeric kernel in this crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Scalar type all geometry, regression and routing code is generic over.
///
/// `f32` and `f64` both implement it; the concrete aliases at the crate root
/// fix `f64`, which is what the CLI and the shipped benchmark files use.
/// `Display`/`FromStr` are required because the on-disk formats render reals
/// as the shortest decimal that round-trips the binary value, which is
/// exactly what the standard formatter produces.
pub trait Scalar:
    Float + FromPrimitive + Display + Debug + FromStr + Sum + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 constant converts to any Scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
