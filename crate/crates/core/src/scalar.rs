//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable throughout the crate (`f32` and `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Relative threshold below which a computed quantity counts as zero.
    fn zero_tol() -> Self;

    /// Base finite-difference step, multiplied by the local feature scale.
    fn fd_step() -> Self;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn zero_tol() -> Self {
        1e-7
    }

    fn fd_step() -> Self {
        1e-3
    }
}

impl Real for f32 {
    fn zero_tol() -> Self {
        2e-3
    }

    fn fd_step() -> Self {
        3e-2
    }
}

/// `|x| < tau * max(1, scale)`.
pub fn negligible<T: Real>(x: T, scale: T) -> bool {
    x.abs() < T::zero_tol() * scale.abs().max(T::one())
}

/// A numerically estimated quantity together with a bound on its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(bound = "T: Real")]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub scale: T,
}

impl<T: Real> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Self { value, error: T::zero(), scale: value.abs() }
    }

    /// Zero test combining the relative tolerance with the error bound.
    pub fn is_zero(&self) -> bool {
        self.value.abs() <= T::zero_tol() * self.scale.max(T::one()) + self.error
    }

    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.value > T::zero() {
            1
        } else {
            -1
        }
    }
}

impl<T: Real> std::ops::Neg for Estimate<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: -self.value, ..self }
    }
}

pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

pub(crate) fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * lit::<T>(k as f64))
}
