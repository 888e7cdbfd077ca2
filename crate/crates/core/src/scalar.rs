//! Scalar abstraction for the numeric core.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
///
/// The trainer, Gram estimators, and certificates all run in `f64` (see the
/// aliases at the crate root); the generic bound exists so the vector,
/// matrix, and network kernels stay independent of that choice.
pub trait Real: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static {
    /// Lossless embedding of `f64` constants; panics only for types that
    /// cannot represent ordinary finite constants, which f32/f64 can.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant must convert")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize must convert to scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}
