use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

/// Coefficient ring for [`crate::Polynomial`].
///
/// Satisfied by the machine integers, `f32`/`f64`, [`crate::Integer`] and
/// [`crate::Rational`].
pub trait Scalar: Num + Clone + Neg<Output = Self> + FromPrimitive + Debug {
    /// `i · self`, used by differentiation.
    fn scale_by_index(&self, i: usize) -> Self {
        Self::from_usize(i).expect("index representable in scalar") * self.clone()
    }
}

impl<T> Scalar for T where T: Num + Clone + Neg<Output = T> + FromPrimitive + Debug {}
