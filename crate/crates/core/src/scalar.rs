//! Scalar abstraction shared by the model and thermodynamic modules.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point scalar (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub(crate) fn cre<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// `coth` on the complex plane.
pub fn coth<T: Real>(z: Cx<T>) -> Cx<T> {
    z.cosh() / z.sinh()
}

/// Reduces an angle-like imaginary part into `[-pi/2, pi/2)`.
pub fn reduce_half_strip<T: Real>(im: T) -> T {
    let pi = T::PI();
    let half = pi / T::two();
    let mut r = (im + half) % pi;
    if r < T::zero() {
        r = r + pi;
    }
    let out = r - half;
    // `%` can land exactly on the excluded upper edge after rounding
    if out >= half {
        out - pi
    } else {
        out
    }
}

/// Shift of `im` into the strip, as an integer multiple of `pi`.
pub fn strip_shift<T: Real>(im: T) -> i64 {
    let reduced = reduce_half_strip(im);
    ((im - reduced) / T::PI()).round().to_i64().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_reduction_is_half_open() {
        let h = std::f64::consts::FRAC_PI_2;
        assert!((reduce_half_strip(h) + h).abs() < 1e-15);
        assert!((reduce_half_strip(-h) + h).abs() < 1e-15);
        assert!((reduce_half_strip(0.3 + 4.0 * std::f64::consts::PI) - 0.3).abs() < 1e-12);
        assert_eq!(strip_shift(0.3 + 2.0 * std::f64::consts::PI), 2);
        assert!((reduce_half_strip(0.25f32) - 0.25).abs() < 1e-6);
    }
}
