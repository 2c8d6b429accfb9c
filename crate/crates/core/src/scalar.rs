//! Arithmetic shared by the floating-point and exact amplitude paths.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

/// A commutative ring with conjugation, enough to propagate single-particle
/// amplitudes through a network and to extract polynomial coefficients.
pub trait Scalar:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + std::fmt::Debug
{
    fn conj(&self) -> Self;

    fn from_integer(n: i64) -> Self;

    /// Floating-point view, used for reporting and tolerance checks.
    fn to_complex(&self) -> Complex64;
}

impl Scalar for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn from_integer(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}
