//! Floating-point scalar abstraction for the analytic monotone and LP code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type accepted by the generic routines (implemented for `f32` and `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance a few orders of magnitude above machine epsilon.
    fn loose_eps() -> Self {
        Self::epsilon().sqrt() * Self::lit(1e-2)
    }
}

impl Real for f32 {}
impl Real for f64 {}
