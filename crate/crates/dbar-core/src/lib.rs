//! Numerical solution of the inhomogeneous Cauchy–Riemann equation
//! ∂u/∂z̄ = f on bounded planar domains, together with the singular
//! integral operators that control its regularity.
//!
//! # Overview
//!
//! The library evaluates the Cauchy–Pompeiu transform
//!
//! ```text
//! Tf(z) = -(1/π) ∬_Ω f(ζ)/(ζ - z) dA(ζ),
//! ```
//!
//! which solves ∂̄(Tf) = f, and its ∂-derivative, the principal-value
//! operator H with kernel (ζ - z)⁻². H admits two evaluation routes: a
//! direct symmetric-exclusion limit, and the absolutely convergent
//! regularization
//!
//! ```text
//! ²Tf(z) = -(1/π) ∬_Ω (f(ζ) - f(z))/(ζ - z)² dA(ζ),
//! ```
//!
//! related by `Hf = ²Tf - f·Φ` where Φ is a boundary integral that
//! vanishes identically on disks. The crate provides:
//!
//! - [`geometry`]: bounded domains with smooth positively oriented
//!   boundary parametrizations (disks, ellipses, perturbed disks, generic
//!   curves) and the membership/distance/chord queries the quadrature
//!   engine needs;
//! - [`quadrature`]: boundary trapezoid sums, graded polar area quadrature
//!   about an interior singularity, radial model integrals with
//!   logarithmic weights, and symmetric-exclusion principal-value limits;
//! - [`testfields`]: the explicit singular fields `f_ν`, their closed-form
//!   antiderivatives `u_ν`, polynomial fields, and finite-difference
//!   Wirtinger derivatives;
//! - [`operators`]: T, H, ²T, Φ, S, the annulus residual integral, and the
//!   end-to-end ∂̄ solver;
//! - [`logspace`]: sampled moduli of continuity, `C^{k,Log^ν L}` norm
//!   estimates, and fitted logarithmic orders.
//!
//! # Scalar genericity
//!
//! All numerics are generic over the floating-point scalar through the
//! [`Real`] trait (implemented for `f32` and `f64`). The concrete aliases
//! [`C64`], [`Domain64`], [`Spec64`] etc. fix `f64`, which is what the
//! verification tolerances are calibrated for; `f32` compiles and is
//! exercised by smoke tests only.
//!
//! # Example
//!
//! ```
//! use dbar_core::geometry::make_disk;
//! use dbar_core::quadrature::QuadratureSpec;
//! use dbar_core::testfields::field_polynomial;
//! use dbar_core::operators::op_t;
//! use num_complex::Complex;
//!
//! // Solve du/dzbar = 1 on the unit disk: the solution through the
//! // Cauchy-Pompeiu transform is conj(z).
//! let disk = make_disk(Complex::new(0.0, 0.0), 1.0).unwrap();
//! let one = field_polynomial(&[(Complex::new(1.0, 0.0), 0, 0)]);
//! let spec = QuadratureSpec::<f64>::default();
//! let z = Complex::new(0.3, 0.1);
//! let t1 = op_t(&disk, &one, z, &spec).unwrap();
//! assert!((t1.value - z.conj()).norm() < 1e-4);
//! ```

pub mod error;
pub mod geometry;
pub mod logspace;
pub mod operators;
pub mod quadrature;
pub mod scalar;
pub mod testfields;

pub use error::{DbarError, Result};
pub use scalar::Real;

/// Complex scalar at the default working precision.
pub type C64 = num_complex::Complex<f64>;
/// Planar domain at the default working precision.
pub type Domain64 = geometry::PlanarDomain<f64>;
/// Quadrature configuration at the default working precision.
pub type Spec64 = quadrature::QuadratureSpec<f64>;
/// Scalar field at the default working precision.
pub type Field64 = testfields::ScalarField<f64>;
/// Integral result at the default working precision.
pub type IntegralResult64 = quadrature::IntegralResult<f64>;
