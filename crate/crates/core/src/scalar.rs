//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All linear algebra runs over `Complex<T>` with `T: Real`. Both `f32` and
//! `f64` implement [`Real`]; the crate-root aliases fix `T = f64`, which is
//! what the tolerances quoted throughout the docs assume.

use nalgebra::{Complex, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar usable as the base field of the complex tensors.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Serialize + DeserializeOwned
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// A tolerance of `x`, widened to a few hundred ulps when the scalar type
    /// cannot resolve `x` (so `f32` stays usable with `f64`-calibrated limits).
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(256.0);
        let t = Self::lit(x);
        if t > floor {
            t
        } else {
            floor
        }
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable in scalar type")
    }

    /// `|x|` without the `Signed`/`ComplexField` method ambiguity.
    #[inline]
    fn magnitude(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cr<T: Real>(re: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::zero())
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
        .sqrt()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &CVec<T>) -> T {
    v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}

/// `⟨u|v⟩`, antilinear in the first argument.
pub fn inner<T: Real>(u: &CVec<T>, v: &CVec<T>) -> Complex<T> {
    u.iter()
        .zip(v.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}
