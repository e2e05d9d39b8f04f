//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// Tolerances are carried by the type so that the same algorithm can be
/// checked at a precision the type can actually deliver.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Structural tolerance (orthonormality, determinant, skew symmetry,
    /// representation domain).
    const STRUCTURAL_TOL: f64;
    /// Distance from the half-turn below which the logarithm is treated as
    /// sitting on the representation boundary.
    const BOUNDARY_TOL: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    #[inline]
    fn structural_tol() -> Self {
        Self::lit(Self::STRUCTURAL_TOL)
    }

    #[inline]
    fn boundary_tol() -> Self {
        Self::lit(Self::BOUNDARY_TOL)
    }
}

impl Real for f64 {
    const STRUCTURAL_TOL: f64 = 1e-9;
    const BOUNDARY_TOL: f64 = 1e-6;
}

impl Real for f32 {
    const STRUCTURAL_TOL: f64 = 1e-4;
    const BOUNDARY_TOL: f64 = 1e-3;
}
