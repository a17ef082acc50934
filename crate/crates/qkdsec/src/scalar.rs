//! Scalar abstractions: floating-point scalars for the dense linear algebra
//! and probability scalars for the classical side.
//!
//! All matrix routines are generic over [`Scalar`] (`f32` or `f64`). The
//! classical-probability routines (couplings, one-time-pad enumeration, exact
//! protocol bookkeeping) are generic over [`Prob`], which `f64` and
//! [`BigRational`] both satisfy, so identities that are exact statements can
//! be checked in exact arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar for dense complex linear algebra.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Signed
    + Prob
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` constant (tolerances, weights).
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant not representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Probability scalar: ordered signed field elements with exact or floating
/// semantics. `f64` gives the floating path, [`BigRational`] the exact one.
pub trait Prob: Num + Signed + PartialOrd + Clone + Debug {
    /// Exact value of a small nonnegative integer.
    fn from_count(n: u64) -> Self;

    /// Value of the dyadic rational represented by an `f64`.
    ///
    /// Every finite `f64` is a dyadic rational, so this is exact for the
    /// rational instantiation and the identity for `f64`; `f32` narrows.
    fn from_dyadic(v: f64) -> Self;

    /// Nearest `f64` (used only for reporting).
    fn to_f64_lossy(&self) -> f64;

    /// Strictly greater than zero. (The `Signed::is_positive` of the float
    /// types counts `+0.0` as positive, which is wrong for probabilities.)
    fn is_pos(&self) -> bool
    where
        Self: Sized,
    {
        *self > Self::zero()
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl Prob for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn from_dyadic(v: f64) -> Self {
        v
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Prob for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }

    fn from_dyadic(v: f64) -> Self {
        v as f32
    }

    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Prob for BigRational {
    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_dyadic(v: f64) -> Self {
        BigRational::from_float(v).expect("finite f64 required for exact conversion")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}
