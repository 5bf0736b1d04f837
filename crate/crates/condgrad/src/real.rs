//! Scalar abstraction: everything numeric is generic over a floating-point
//! type implementing [`Real`] (in practice `f32` or `f64`).

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable throughout the crate.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal; panics only for types that
    /// cannot represent any `f64` (none of the provided impls).
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal not representable in scalar type")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}
