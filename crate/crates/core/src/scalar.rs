//! Scalar plumbing shared by every module.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the library is generic over. Implemented for `f32` and `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive {}

pub type Cplx<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;
pub type M2<T> = Matrix2<Complex<T>>;
pub type M4<T> = Matrix4<Complex<T>>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal fits the scalar type")
}

/// Converts `T` back to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar converts to f64")
}

#[inline]
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn ci<T: Real>(im: T) -> Complex<T> {
    Complex::new(T::zero(), im)
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{i phase}`.
#[inline]
pub fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn carg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

#[inline]
pub fn is_zero<T: Real>(z: &Complex<T>) -> bool {
    z.re == T::zero() && z.im == T::zero()
}

/// A tolerance that scales with the precision of `T`: `tol64` for `f64`,
/// and the same multiple of machine epsilon for narrower types, floored at `tol64`.
pub fn scaled_tol<T: Real>(tol64: f64) -> T {
    let eps = to_f64(T::default_epsilon());
    lit(tol64.max(tol64 * eps / f64::EPSILON))
}

/// Principal square root.
#[inline]
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    <Complex<T> as nalgebra::ComplexField>::sqrt(z)
}
