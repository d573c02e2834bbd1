//! Scalar abstraction: the crate is generic over the underlying real type.
//!
//! Every module computes over dense matrices of `Complex<R>` where `R` is
//! any type satisfying [`RealScalar`] (in practice `f32` or `f64`; all
//! default tolerances are chosen for `f64`).

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the whole crate is parametrized over.
pub trait RealScalar: RealField + FromPrimitive + ToPrimitive + Copy + Send + Sync {}

impl<T: RealField + FromPrimitive + ToPrimitive + Copy + Send + Sync> RealScalar for T {}

/// Complex scalar over the crate's real type parameter.
pub type Cx<R> = Complex<R>;

/// Convert an `f64` constant into the generic real type.
#[inline]
pub fn rf<R: RealScalar>(x: f64) -> R {
    R::from_f64(x).expect("f64 constant must be representable in the scalar type")
}

/// Convert a generic real back to `f64` (for diagnostics and reports).
#[inline]
pub fn fl<R: RealScalar>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Complex value from `f64` parts.
#[inline]
pub fn cx<R: RealScalar>(re: f64, im: f64) -> Cx<R> {
    Complex::new(rf(re), rf(im))
}

/// Purely real complex value from an `f64`.
#[inline]
pub fn cxr<R: RealScalar>(re: f64) -> Cx<R> {
    cx(re, 0.0)
}

/// Distance from a point to the branch cut `(-inf, 0]` of the principal
/// logarithm. The nearest point of the cut is `(re, 0)` when `re <= 0`
/// and the cut endpoint `0` otherwise.
pub fn branch_cut_distance<R: RealScalar>(z: Cx<R>) -> R {
    if z.re <= R::zero() {
        z.im.abs()
    } else {
        (z.re * z.re + z.im * z.im).sqrt()
    }
}
