//! Floating-point scalar abstraction.
//!
//! Every numerical routine in this crate is generic over a scalar type
//! implementing [`Real`]: the standard float operations plus the constant
//! and conversion traits the quadrature tables need. Only `f32` and `f64`
//! implement it; the trait exists so the core algorithms are written once
//! and the precision is chosen at the call site.

use num_complex::Complex;

/// Floating-point scalar usable by the numerical kernels.
///
/// The supertraits supply arithmetic ([`num_traits::Float`]), π and ln 2
/// ([`num_traits::FloatConst`]), and conversion from literal tables
/// ([`num_traits::FromPrimitive`]). `Send + Sync + 'static` let field
/// closures and quadrature cells move across worker threads.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumCast
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts a finite `f64` constant (quadrature nodes, tolerances,
    /// tabulated defaults) into `Self`.
    ///
    /// # Panics
    ///
    /// Panics if the value is not representable, which cannot happen for
    /// the finite literals this crate feeds it.
    fn of(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x)
            .expect("finite f64 literal must convert to a Real scalar")
    }

    /// Lossy view of `self` as `f64`, for diagnostics and reports.
    fn as_f64(self) -> f64 {
        num_traits::NumCast::from(self).expect("Real scalar must widen to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Unit complex number `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// The imaginary unit.
#[inline]
pub fn i<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}
