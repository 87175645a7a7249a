//! Scalar abstraction: the whole numerical core is generic over the real
//! field, with `num_complex::Complex<T>` on top.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar the workbench is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for tolerances and literals.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal must convert into the scalar type")
    }

    /// Lossy conversion to `f64`, for reporting.
    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// Complex scalar over the generic real field.
pub type C<T> = Complex<T>;

/// `0 + 0i`.
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// `1 + 0i`.
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// Real number promoted to the complex field.
pub fn cre<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `i t` for real `t`.
pub fn cim<T: Real>(im: T) -> C<T> {
    Complex::new(T::zero(), im)
}
