//! Model scalar fields with inverse-log singular structure.
//!
//! The library's sharpness studies revolve around one family on the
//! punctured disk. Writing `L(z) = |ln |z|²|` (so `L → ∞` at the origin
//! and `L > 0` for `0 < |z| < 1`), the source fields and their exact
//! antiderivatives in `∂̄` are
//!
//! ```text
//! f̃_ν(z) = z / (z̄ · L(z)^ν),                         f̃_ν(0) = 0,
//! ũ_ν(z) = z · L(z)^{1-ν} / (ν - 1)      (ν ≠ 1),    ũ_ν(0) = 0,
//! ũ_1(z) = -z · ln L(z),                              ũ_1(0) = 0,
//! ```
//!
//! with `∂̄ũ_ν = f̃_ν` exactly and
//! `∂ũ_ν = L^{1-ν}/(ν-1) + L^{-ν}` (resp. `-ln L + 1/L` at `ν = 1`).
//! The modulus `|f̃_ν| = L^{-ν}` decays slower than any power of `|z|`,
//! which is what makes the family sharp for inverse-log continuity
//! classes: `f̃_ν` loses exactly one logarithm of smoothness passing to
//! the gradient of its potential.
//!
//! [`ScalarField`] packages a field with optional exact Wirtinger
//! derivatives, a validity radius, and declared singular structure, so
//! operator code can query derivatives without knowing whether they are
//! closed-form or finite-difference.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{DbarError, Result};
use crate::scalar::Real;

type FieldFn<T> = Arc<dyn Fn(Complex<T>) -> Complex<T> + Send + Sync>;

/// A complex-valued field on a planar region, with optional exact
/// Wirtinger derivatives and declared singular structure.
#[derive(Clone)]
pub struct ScalarField<T: Real> {
    /// Human-readable name used in reports (for example `f_nu(2)`).
    pub label: String,
    value: FieldFn<T>,
    dz: Option<FieldFn<T>>,
    dzbar: Option<FieldFn<T>>,
    /// Supremum of `|z|` on which the field's formula is intended to be
    /// used; [`ScalarField::try_evaluate`] rejects points beyond it.
    pub intended_max_abs: T,
    /// Location of the declared singular point, if any. Finite-difference
    /// stencils shrink their step near it.
    pub declared_singularity: Option<Complex<T>>,
    /// Inverse-log decay order ν when the field's modulus behaves like
    /// `L^{-ν}` at the singular point.
    pub log_order: Option<T>,
    /// Default central-difference step for derivative fallbacks.
    pub fd_step: T,
}

impl<T: Real> std::fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("intended_max_abs", &self.intended_max_abs)
            .field("declared_singularity", &self.declared_singularity)
            .field("log_order", &self.log_order)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ScalarField<T> {
    /// Wraps a plain closure as a field valid on the whole plane.
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            label: label.into(),
            value: Arc::new(value),
            dz: None,
            dzbar: None,
            intended_max_abs: T::infinity(),
            declared_singularity: None,
            log_order: None,
            fd_step: T::of(1e-5),
        }
    }

    /// Attaches an exact `∂/∂z` derivative.
    pub fn with_dz(
        mut self,
        dz: impl Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static,
    ) -> Self {
        self.dz = Some(Arc::new(dz));
        self
    }

    /// Attaches an exact `∂/∂z̄` derivative.
    pub fn with_dzbar(
        mut self,
        dzbar: impl Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static,
    ) -> Self {
        self.dzbar = Some(Arc::new(dzbar));
        self
    }

    /// Restricts the intended evaluation region to `|z| < max_abs`.
    pub fn with_intended_max_abs(mut self, max_abs: T) -> Self {
        self.intended_max_abs = max_abs;
        self
    }

    /// Declares a singular point and an inverse-log order at it.
    pub fn with_singularity(mut self, at: Complex<T>, log_order: Option<T>) -> Self {
        self.declared_singularity = Some(at);
        self.log_order = log_order;
        self
    }

    /// Evaluates the field. No domain checking; see
    /// [`ScalarField::try_evaluate`] for the guarded form.
    #[inline]
    pub fn value(&self, z: Complex<T>) -> Complex<T> {
        (self.value)(z)
    }

    /// Evaluates the field after checking the intended region.
    ///
    /// # Errors
    ///
    /// Returns [`DbarError::OutOfIntendedDomain`] when
    /// `|z| ≥ intended_max_abs`.
    pub fn try_evaluate(&self, z: Complex<T>) -> Result<Complex<T>> {
        if z.norm() >= self.intended_max_abs {
            return Err(DbarError::OutOfIntendedDomain(format!(
                "{} is only intended for |z| < {}, got |z| = {}",
                self.label,
                self.intended_max_abs,
                z.norm()
            )));
        }
        Ok(self.value(z))
    }

    /// `∂f/∂z`, exact when a closed form was attached, otherwise a
    /// central Wirtinger difference with a step that shrinks near the
    /// declared singularity.
    pub fn derivative_dz(&self, z: Complex<T>) -> Complex<T> {
        match &self.dz {
            Some(g) => g(z),
            None => wirtinger_fd_fn(|w| self.value(w), z, self.local_step(z)).0,
        }
    }

    /// `∂f/∂z̄`, exact when available, finite-difference otherwise.
    pub fn derivative_dzbar(&self, z: Complex<T>) -> Complex<T> {
        match &self.dzbar {
            Some(g) => g(z),
            None => wirtinger_fd_fn(|w| self.value(w), z, self.local_step(z)).1,
        }
    }

    /// Returns a new field `z ↦ self(λ·z)` for a real positive scaling.
    ///
    /// Composition with a real dilation multiplies both Wirtinger
    /// derivatives by λ, preserves the log order, and divides the valid
    /// radius by λ — the standard way to transplant a unit-disk model
    /// field onto a domain of different size.
    ///
    /// # Errors
    ///
    /// Returns [`DbarError::InvalidArgument`] when λ is not a positive
    /// finite number.
    pub fn precompose_scaling(&self, lambda: T) -> Result<ScalarField<T>> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(DbarError::InvalidArgument(format!(
                "scaling factor must be positive and finite, got {lambda}"
            )));
        }
        let value = self.value.clone();
        let mut out = ScalarField {
            label: format!("{}∘({lambda}·)", self.label),
            value: Arc::new(move |z| value(z * lambda)),
            dz: self.dz.clone().map(|g| {
                let g: FieldFn<T> = Arc::new(move |z: Complex<T>| g(z * lambda) * lambda);
                g
            }),
            dzbar: self.dzbar.clone().map(|g| {
                let g: FieldFn<T> = Arc::new(move |z: Complex<T>| g(z * lambda) * lambda);
                g
            }),
            intended_max_abs: self.intended_max_abs / lambda,
            declared_singularity: self.declared_singularity.map(|s| s / lambda),
            log_order: self.log_order,
            fd_step: self.fd_step,
        };
        if let Some(s) = out.declared_singularity {
            if !(s.re.is_finite() && s.im.is_finite()) {
                out.declared_singularity = None;
            }
        }
        Ok(out)
    }

    /// Step for finite-difference fallbacks: the configured step, shrunk
    /// to an eighth of the distance to the declared singularity so the
    /// stencil never straddles it.
    fn local_step(&self, z: Complex<T>) -> T {
        match self.declared_singularity {
            Some(s) => {
                let d = (z - s).norm() / T::of(8.0);
                if d > T::zero() {
                    self.fd_step.min(d)
                } else {
                    self.fd_step
                }
            }
            None => self.fd_step,
        }
    }
}

/// `L(z) = |ln |z|²|`, the inverse-log weight of the model family.
#[inline]
pub fn log_weight<T: Real>(z: Complex<T>) -> T {
    (z.norm_sqr().ln()).abs()
}

/// The source field `f̃_ν(z) = z / (z̄ · L(z)^ν)` with `f̃_ν(0) = 0`.
///
/// Its modulus is exactly `L^{-ν}`, continuous at the origin for `ν > 0`
/// but slower than any Hölder rate. Carries exact Wirtinger derivatives
/// (both singular at the origin) and is intended for `|z| < 0.95`, where
/// the weight `L` stays bounded away from zero.
///
/// # Examples
///
/// ```
/// use dbar_core::testfields::field_f_nu;
/// use num_complex::Complex;
///
/// let f = field_f_nu(2.0_f64);
/// let v = f.value(Complex::new(0.1, 0.0));
/// assert!((v.re - 0.0471529243).abs() < 1e-9);
/// ```
pub fn field_f_nu<T: Real>(nu: T) -> ScalarField<T> {
    let zero = Complex::new(T::zero(), T::zero());
    ScalarField::new(format!("f_nu({nu})"), move |z: Complex<T>| {
        if z == zero {
            return zero;
        }
        z / (z.conj() * log_weight(z).powf(nu))
    })
    .with_dz(move |z: Complex<T>| {
        // ∂f̃ = (L^{-ν} + ν L^{-ν-1}) / z̄.
        let l = log_weight(z);
        let radial = l.powf(-nu) + nu * l.powf(-nu - T::one());
        z.conj().inv() * radial
    })
    .with_dzbar(move |z: Complex<T>| {
        // ∂̄f̃ = (z/z̄²) (ν L^{-ν-1} - L^{-ν}).
        let l = log_weight(z);
        let radial = nu * l.powf(-nu - T::one()) - l.powf(-nu);
        let zb = z.conj();
        z / (zb * zb) * radial
    })
    .with_intended_max_abs(T::of(0.95))
    .with_singularity(zero, Some(nu))
}

/// The potential `ũ_ν` with `∂̄ũ_ν = f̃_ν` exactly.
///
/// For `ν ≠ 1` this is `z·L^{1-ν}/(ν-1)`; at `ν = 1` it degenerates to
/// `-z·ln L`. Both Wirtinger derivatives are attached in closed form:
/// `∂̄ũ_ν = f̃_ν` and `∂ũ_ν = L^{1-ν}/(ν-1) + L^{-ν}` (respectively
/// `-ln L + 1/L`). The value extends continuously by `0` at the origin
/// for every ν; the `z`-derivative tends to `0` there exactly when
/// `ν > 1`, which is the boundedness threshold the sharpness studies
/// probe.
pub fn field_u_nu<T: Real>(nu: T) -> ScalarField<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = T::one();
    let value = move |z: Complex<T>| {
        if z == zero {
            return zero;
        }
        let l = log_weight(z);
        if nu == one {
            -z * l.ln()
        } else {
            z * (l.powf(one - nu) / (nu - one))
        }
    };
    let dz = move |z: Complex<T>| {
        if z == zero {
            // Radial profile L^{1-ν}/(ν-1) + L^{-ν} has limit 0 iff ν > 1.
            return if nu > one {
                zero
            } else {
                Complex::new(T::infinity(), T::zero())
            };
        }
        let l = log_weight(z);
        let radial = if nu == one {
            -l.ln() + l.recip()
        } else {
            l.powf(one - nu) / (nu - one) + l.powf(-nu)
        };
        Complex::new(radial, T::zero())
    };
    let dzbar = move |z: Complex<T>| {
        if z == zero {
            return zero;
        }
        z / (z.conj() * log_weight(z).powf(nu))
    };
    ScalarField::new(format!("u_nu({nu})"), value)
        .with_dz(dz)
        .with_dzbar(dzbar)
        .with_intended_max_abs(T::of(0.95))
        .with_singularity(zero, Some(nu - one))
}

/// Polynomial field `Σ c·z^p·z̄^q` from a term list, with exact
/// Wirtinger derivatives. Entire, so the intended region is unbounded.
///
/// # Examples
///
/// ```
/// use dbar_core::testfields::field_polynomial;
/// use num_complex::Complex;
///
/// // f(z) = z̄² — its ∂̄ derivative is 2z̄.
/// let f = field_polynomial(&[(Complex::new(1.0, 0.0), 0, 2)]);
/// let z = Complex::new(0.3, -0.2);
/// assert!((f.derivative_dzbar(z) - z.conj() * 2.0).norm() < 1e-12);
/// ```
pub fn field_polynomial<T: Real>(terms: &[(Complex<T>, u32, u32)]) -> ScalarField<T> {
    let terms_v: Vec<(Complex<T>, u32, u32)> = terms.to_vec();
    let terms_dz = terms_v.clone();
    let terms_dzbar = terms_v.clone();
    let eval = |terms: &[(Complex<T>, u32, u32)], z: Complex<T>| -> Complex<T> {
        let zb = z.conj();
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(coeff, p, q) in terms {
            acc = acc + coeff * z.powu(p) * zb.powu(q);
        }
        acc
    };
    ScalarField::new("polynomial", move |z| eval(&terms_v, z))
        .with_dz(move |z| {
            let zb = z.conj();
            let mut acc = Complex::new(T::zero(), T::zero());
            for &(coeff, p, q) in &terms_dz {
                if p > 0 {
                    acc = acc + coeff * T::of(f64::from(p)) * z.powu(p - 1) * zb.powu(q);
                }
            }
            acc
        })
        .with_dzbar(move |z| {
            let zb = z.conj();
            let mut acc = Complex::new(T::zero(), T::zero());
            for &(coeff, p, q) in &terms_dzbar {
                if q > 0 {
                    acc = acc + coeff * T::of(f64::from(q)) * z.powu(p) * zb.powu(q - 1);
                }
            }
            acc
        })
}

/// The constant field `z ↦ c`.
pub fn field_constant<T: Real>(c: Complex<T>) -> ScalarField<T> {
    field_polynomial(&[(c, 0, 0)])
}

/// Central-difference Wirtinger derivatives `(∂f/∂z, ∂f/∂z̄)` of a field
/// at `z` with step `step`, after validating that the whole 4-point
/// stencil stays inside the field's intended region.
///
/// The differences are second order: `O(step²)` accurate for three times
/// differentiable fields.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] for a non-positive step and
/// [`DbarError::StencilOutOfDomain`] when any of `z ± step`,
/// `z ± i·step` leaves the intended region.
///
/// # Examples
///
/// ```
/// use dbar_core::testfields::{field_polynomial, wirtinger_fd};
/// use num_complex::Complex;
///
/// // f = z²: holomorphic, so ∂f = 2z and ∂̄f = 0.
/// let f = field_polynomial(&[(Complex::new(1.0, 0.0), 2, 0)]);
/// let (dz, dzbar) = wirtinger_fd(&f, Complex::new(0.3, 0.0), 1e-4).unwrap();
/// assert!((dz - Complex::new(0.6, 0.0)).norm() < 1e-7);
/// assert!(dzbar.norm() < 1e-7);
/// ```
pub fn wirtinger_fd<T: Real>(
    field: &ScalarField<T>,
    z: Complex<T>,
    step: T,
) -> Result<(Complex<T>, Complex<T>)> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(DbarError::InvalidArgument(format!(
            "finite-difference step must be positive and finite, got {step}"
        )));
    }
    let ex = Complex::new(step, T::zero());
    let ey = Complex::new(T::zero(), step);
    for p in [z + ex, z - ex, z + ey, z - ey] {
        if p.norm() >= field.intended_max_abs {
            return Err(DbarError::StencilOutOfDomain(format!(
                "stencil point {p} leaves the region |z| < {} of {}",
                field.intended_max_abs, field.label
            )));
        }
    }
    Ok(wirtinger_fd_fn(|w| field.value(w), z, step))
}

/// Raw closure form of [`wirtinger_fd`], without domain checking:
///
/// ```text
/// ∂f/∂z  = (f_x - i·f_y) / 2,    ∂f/∂z̄ = (f_x + i·f_y) / 2,
/// ```
///
/// where `f_x`, `f_y` are second-order central differences along the
/// real and imaginary axes. Used on numerically defined functions
/// (operator outputs) where no validity radius is declared.
pub fn wirtinger_fd_fn<T: Real>(
    f: impl Fn(Complex<T>) -> Complex<T>,
    z: Complex<T>,
    h: T,
) -> (Complex<T>, Complex<T>) {
    let two_h = h + h;
    let ex = Complex::new(h, T::zero());
    let ey = Complex::new(T::zero(), h);
    let fx = (f(z + ex) - f(z - ex)) / two_h;
    let fy = (f(z + ey) - f(z - ey)) / two_h;
    let i = Complex::new(T::zero(), T::one());
    let half = T::of(0.5);
    ((fx - i * fy) * half, (fx + i * fy) * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// Deterministic low-discrepancy points in the annulus 0.05 ≤ |z| ≤ 0.45.
    fn sample_points(n: usize) -> Vec<Complex<f64>> {
        (0..n)
            .map(|j| {
                let u = (0.5 + j as f64 * 0.754_877_666_246_692_7).fract();
                let v = (0.5 + j as f64 * 0.569_840_290_998_053_2).fract();
                let r = 0.05 + 0.40 * u;
                cis(2.0 * std::f64::consts::PI * v) * r
            })
            .collect()
    }

    #[test]
    fn u_nu_is_an_exact_antiderivative_of_f_nu() {
        for &nu in &[0.5, 1.0, 1.5, 2.0, 3.0] {
            let f = field_f_nu(nu);
            let u = field_u_nu(nu);
            for z in sample_points(200) {
                let got = u.derivative_dzbar(z);
                let want = f.value(z);
                assert!(
                    (got - want).norm() <= 1e-12 * want.norm().max(1.0),
                    "dzbar mismatch at {z} for nu={nu}"
                );
            }
        }
    }

    #[test]
    fn analytic_derivatives_agree_with_finite_differences() {
        for &nu in &[1.2, 2.0, 3.0] {
            let u = field_u_nu(nu);
            let f = field_f_nu(nu);
            for z in sample_points(40) {
                let (dz_fd, dzbar_fd) = wirtinger_fd_fn(|w| u.value(w), z, 1e-6);
                assert!((u.derivative_dz(z) - dz_fd).norm() < 1e-5);
                assert!((u.derivative_dzbar(z) - dzbar_fd).norm() < 1e-5);
                let (dz_fd, dzbar_fd) = wirtinger_fd_fn(|w| f.value(w), z, 1e-6);
                assert!((f.derivative_dz(z) - dz_fd).norm() < 1e-4);
                assert!((f.derivative_dzbar(z) - dzbar_fd).norm() < 1e-4);
            }
        }
    }

    #[test]
    fn f_nu_modulus_is_the_inverse_log_weight() {
        let f = field_f_nu(2.0);
        for z in sample_points(100) {
            let l = log_weight(z);
            assert_relative_eq!(f.value(z).norm(), l.powf(-2.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn frozen_point_values() {
        assert_relative_eq!(
            field_f_nu(2.0).value(c(0.1, 0.0)).re,
            0.047_152_924_3,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            field_u_nu(2.0).value(c(0.1, 0.0)).re,
            0.021_714_724_1,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            field_u_nu(1.0).value(c(0.1, 0.0)).re,
            -0.152_717_962_6,
            epsilon = 1e-9
        );
        assert_eq!(field_f_nu(2.0).value(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(field_u_nu(2.0).value(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn origin_limits_of_the_z_derivative() {
        // Bounded (indeed vanishing) gradient for ν > 1, blow-up for ν ≤ 1.
        assert_eq!(field_u_nu(2.0).derivative_dz(c(0.0, 0.0)), c(0.0, 0.0));
        assert!(field_u_nu(0.5).derivative_dz(c(0.0, 0.0)).re.is_infinite());
        // Along a shrinking radius the ν = 2 gradient decays…
        let u2 = field_u_nu(2.0);
        let big = u2.derivative_dz(c(0.1, 0.0)).norm();
        let small = u2.derivative_dz(c(1e-6, 0.0)).norm();
        assert!(small < big);
        // …while the ν = 1/2 gradient grows without bound.
        let u_half = field_u_nu(0.5);
        let near = u_half.derivative_dz(c(1e-12, 0.0)).norm();
        let far = u_half.derivative_dz(c(0.1, 0.0)).norm();
        assert!(near > 3.0 * far);
    }

    #[test]
    fn intended_region_is_enforced() {
        let f = field_f_nu(2.0);
        assert!(f.try_evaluate(c(0.3, 0.0)).is_ok());
        let err = f.try_evaluate(c(0.97, 0.0)).unwrap_err();
        assert_eq!(err.category(), "out-of-intended-domain");
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        // f = 2·z³z̄ + (1-i)·z̄².
        let f = field_polynomial(&[(c(2.0, 0.0), 3, 1), (c(1.0, -1.0), 0, 2)]);
        let z = c(0.4, -0.7);
        let dz_want = c(2.0, 0.0) * 3.0 * z * z * z.conj();
        let dzbar_want = c(2.0, 0.0) * z.powu(3) + c(1.0, -1.0) * 2.0 * z.conj();
        assert!((f.derivative_dz(z) - dz_want).norm() < 1e-14);
        assert!((f.derivative_dzbar(z) - dzbar_want).norm() < 1e-14);
        // FD fallback on the raw closure agrees.
        let (dz_fd, dzbar_fd) = wirtinger_fd_fn(|w| f.value(w), z, 1e-6);
        assert!((dz_fd - dz_want).norm() < 1e-8);
        assert!((dzbar_fd - dzbar_want).norm() < 1e-8);
    }

    #[test]
    fn rescaled_field_chains_derivatives() {
        let f = field_f_nu(2.0);
        let lambda = 0.9;
        let g = f.precompose_scaling(lambda).unwrap();
        let z = c(0.2, 0.1);
        assert!((g.value(z) - f.value(z * lambda)).norm() < 1e-15);
        assert!((g.derivative_dz(z) - f.derivative_dz(z * lambda) * lambda).norm() < 1e-13);
        assert_relative_eq!(g.intended_max_abs, 0.95 / lambda);
        assert!(f.precompose_scaling(0.0).is_err());
    }

    #[test]
    fn checked_stencil_validates_region_and_matches_datum() {
        let u = field_u_nu(2.0);
        // ∂̄ũ₂ from the stencil reproduces f̃₂ at 0.1 to stencil accuracy.
        let (_, dzbar) = wirtinger_fd(&u, c(0.1, 0.0), 1e-5).unwrap();
        assert!((dzbar - field_f_nu(2.0).value(c(0.1, 0.0))).norm() < 1e-6);
        // A stencil reaching past the validity radius is rejected.
        let err = wirtinger_fd(&u, c(0.945, 0.0), 1e-2).unwrap_err();
        assert_eq!(err.category(), "stencil-out-of-domain");
        let err = wirtinger_fd(&u, c(0.1, 0.0), 0.0).unwrap_err();
        assert_eq!(err.category(), "invalid-argument");
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let k = field_constant(c(2.0, -1.0));
        assert_eq!(k.value(c(5.0, 5.0)), c(2.0, -1.0));
        assert_eq!(k.derivative_dz(c(0.3, 0.2)), c(0.0, 0.0));
        assert_eq!(k.derivative_dzbar(c(0.3, 0.2)), c(0.0, 0.0));
    }
}
