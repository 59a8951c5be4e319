//! The singular integral operators of the planar ∂̄ theory.
//!
//! For a bounded domain `Ω` with smooth boundary and a continuous field
//! `f`, the module evaluates
//!
//! ```text
//! Tf(z)  = -(1/π) ∬_Ω f(ζ)/(ζ-z) dA          (Cauchy–Pompeiu transform)
//! Hf(z)  = p.v. -(1/π) ∬_Ω f(ζ)/(ζ-z)² dA    (= ∂/∂z Tf)
//! ²Tf(z) = -(1/π) ∬_Ω (f(ζ)-f(z))/(ζ-z)² dA  (regularized H)
//! Φ(z)   = 1/(2πi) ∮_{bΩ} dζ̄/(ζ-z)
//! Sf(z)  = -∮_{bΩ} f(ζ)/(ζ-z) dζ
//! ```
//!
//! together with the annular residual `∫_{Ω∖D(z,r)} (ζ-z)^{-2} dζ̄∧dζ`
//! and the end-to-end solver for `∂̄u = f` (namely `u = Tf`, whose
//! `z`-derivative is `Hf` and whose `z̄`-derivative reproduces the
//! datum).
//!
//! The three operators tie together through the identity
//! `Hf = ²Tf - f·Φ`: the regularization absorbs the principal value, and
//! the boundary term `Φ` — identically zero on disks, constant on
//! ellipses — carries all the domain dependence. [`op_h`] defaults to
//! this identity route and keeps the direct principal-value evaluation
//! as a cross-checking oracle.
//!
//! # Measure conventions
//!
//! The defining formulas above are classically written against the
//! complex area form `dζ̄∧dζ = 2i·dA`. All quadrature in this crate works
//! in real Lebesgue measure `dA`; the conversion factor `2i` (and the
//! resulting real prefactors, e.g. `-1/(2πi)·2i = -1/π`) is applied in
//! this module only, so the orientation convention is auditable in one
//! place. [`nw_residual`] is the one operator reported in the `dζ̄∧dζ`
//! normalization itself, hence its explicit `2i` factor.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{DbarError, Result};
use crate::geometry::PlanarDomain;
use crate::quadrature::{
    boundary_integral, polar_annulus_integral, polar_area_integral, pv_limit_integral,
    IntegralResult, QuadratureSpec,
};
use crate::scalar::Real;
use crate::testfields::{wirtinger_fd_fn, ScalarField};

/// Minimum signed boundary distance for solver grid points, as a
/// multiple of the quadrature cutoff radius.
const GRID_MARGIN_CUTOFFS: f64 = 100.0;

/// Finite-difference step for the solver's ∂̄ verification stencils.
/// Larger steps are dominated by the stencil truncation error, smaller
/// ones by quadrature noise in the computed potential.
const DBAR_CHECK_STEP: f64 = 1e-3;

/// Which operator an evaluation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    /// Cauchy–Pompeiu transform `T`.
    T,
    /// `H` evaluated through the identity `Hf = ²Tf - f·Φ`.
    HIdentity,
    /// `H` evaluated as a direct principal value.
    HDirect,
    /// Regularized transform `²T`.
    TwoT,
    /// Boundary functional `Φ`.
    Phi,
    /// Boundary transform `S`.
    S,
    /// Annular residual in the `dζ̄∧dζ` normalization.
    NwResidual,
}

/// Method selector for [`op_h`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HMethod {
    /// `Hf = ²Tf - f·Φ` — no principal value anywhere (default).
    Identity,
    /// Direct shrinking-disk principal value, cross-checked against the
    /// identity route.
    DirectPv,
}

/// One operator evaluation with its quadrature provenance.
#[derive(Clone, Debug)]
pub struct OperatorEvaluation<T: Real> {
    /// Which operator produced the value.
    pub operator: Operator,
    /// Evaluation point.
    pub point: Complex<T>,
    /// Computed value.
    pub value: Complex<T>,
    /// Error estimate, convergence flag, and cost of the quadrature.
    pub quadrature: IntegralResult<T>,
    /// Soft diagnostic (e.g. evaluation very close to the boundary) that
    /// does not invalidate the value.
    pub warning: Option<String>,
}

/// Solution of `∂̄u = f` sampled on a grid.
#[derive(Clone, Debug)]
pub struct SolutionField<T: Real> {
    /// Grid points (interior, in input order).
    pub grid: Vec<Complex<T>>,
    /// `u = Tf` at each grid point.
    pub values: Vec<Complex<T>>,
    /// `∂u = Hf` (identity method) at each grid point.
    pub dz_values: Vec<Complex<T>>,
    /// `∂̄u = f` at each grid point (the datum, by construction).
    pub dzbar_values: Vec<Complex<T>>,
    /// First-order norm estimate and residual checks.
    pub norm_report: NormReport<T>,
}

/// Norm and residual summary attached to a [`SolutionField`].
#[derive(Clone, Debug)]
pub struct NormReport<T: Real> {
    /// Order `ν - 1` at which the first-derivative seminorm was weighted.
    pub order: T,
    /// Grid-limited estimate of
    /// `sup|u| + sup|∂u| + sup|∂̄u| + seminorms`: suprema and increment
    /// pairs range over the solution grid only.
    pub c1_norm_estimate: T,
    /// Always true for solver output: marks the estimate as a lower
    /// bound computed from grid samples, not a domain-dense profile.
    pub grid_limited: bool,
    /// Largest `|finite-difference ∂̄u - f|` over the checked subsample.
    pub dbar_check_max: T,
    /// Number of grid points where the ∂̄ residual was checked.
    pub dbar_check_points: usize,
}

fn require_interior<T: Real>(domain: &PlanarDomain<T>, z: Complex<T>, what: &str) -> Result<()> {
    if !domain.contains(z) {
        return Err(DbarError::InvalidCenter(format!(
            "{what} must be evaluated at an interior point; {z} is not interior"
        )));
    }
    Ok(())
}

/// Near-boundary warning shared by the boundary-kernel operators.
fn boundary_proximity_warning<T: Real>(
    domain: &PlanarDomain<T>,
    z: Complex<T>,
) -> Option<String> {
    let d = domain.boundary_distance(z);
    if d.abs() < T::of(1e-8) {
        Some(format!(
            "evaluation point {z} lies within {d:e} of the boundary; boundary kernels are \
             near-singular there"
        ))
    } else {
        None
    }
}

/// Cauchy–Pompeiu transform `Tf(z) = -(1/π) ∬_Ω f(ζ)/(ζ-z) dA`.
///
/// The kernel times the polar Jacobian is bounded (`|1/(ζ-z)|·s = 1`),
/// so the graded area quadrature handles it without a principal value.
///
/// # Errors
///
/// Returns [`DbarError::InvalidCenter`] for exterior `z` and propagates
/// quadrature errors. Non-convergence is reported through the result's
/// `quadrature.converged`, not as an error.
///
/// # Examples
///
/// ```
/// use dbar_core::geometry::make_disk;
/// use dbar_core::operators::op_t;
/// use dbar_core::quadrature::QuadratureSpec;
/// use dbar_core::testfields::field_constant;
/// use num_complex::Complex;
///
/// let disk = make_disk(Complex::new(0.0, 0.0), 1.0).unwrap();
/// let spec = QuadratureSpec { tol: 1e-4, ..QuadratureSpec::default() };
/// let z = Complex::new(0.3, 0.1);
/// // T1 = z̄ on a disk centered at the origin.
/// let ev = op_t(&disk, &field_constant(Complex::new(1.0, 0.0)), z, &spec).unwrap();
/// assert!((ev.value - z.conj()).norm() < 1e-4);
/// ```
pub fn op_t<T: Real>(
    domain: &PlanarDomain<T>,
    f: &ScalarField<T>,
    z: Complex<T>,
    spec: &QuadratureSpec<T>,
) -> Result<OperatorEvaluation<T>> {
    require_interior(domain, z, "the transform T")?;
    let quad = polar_area_integral(domain, z, spec, |zeta, offset| f.value(zeta) / offset)?;
    let inv_pi = -T::PI().recip();
    Ok(OperatorEvaluation {
        operator: Operator::T,
        point: z,
        value: quad.value * inv_pi,
        quadrature: IntegralResult {
            value: quad.value * inv_pi,
            err_estimate: quad.err_estimate * T::PI().recip(),
            converged: quad.converged,
            evaluations: quad.evaluations,
        },
        warning: None,
    })
}

/// Boundary functional `Φ(z) = 1/(2πi) ∮_{bΩ} dζ̄/(ζ-z)`.
///
/// Identically zero on disks; constant (dependent only on the axes) on
/// ellipse interiors.
///
/// # Errors
///
/// Returns [`DbarError::InvalidCenter`] for exterior points. A point
/// within `10⁻⁸` of the boundary keeps its value but carries a warning.
///
/// # Examples
///
/// ```
/// use dbar_core::geometry::make_ellipse;
/// use dbar_core::operators::op_phi;
/// use dbar_core::quadrature::QuadratureSpec;
/// use num_complex::Complex;
///
/// let e = make_ellipse(2.0_f64, 1.0).unwrap();
/// let ev = op_phi(&e, Complex::new(0.0, 0.0), &QuadratureSpec::default()).unwrap();
/// // Φ = (a-b)/(a+b) = 1/3 everywhere inside the ellipse.
/// assert!((ev.value.re - 1.0 / 3.0).abs() < 1e-8);
/// assert!(ev.value.im.abs() < 1e-10);
/// ```
pub fn op_phi<T: Real>(
    domain: &PlanarDomain<T>,
    z: Complex<T>,
    spec: &QuadratureSpec<T>,
) -> Result<OperatorEvaluation<T>> {
    require_interior(domain, z, "the boundary functional")?;
    let quad = boundary_integral(domain, spec, |zeta, _dzeta, dzbar| dzbar / (zeta - z))?;
    let prefactor = (Complex::new(T::zero(), T::one()) * (T::PI() + T::PI())).inv();
    Ok(OperatorEvaluation {
        operator: Operator::Phi,
        point: z,
        value: quad.value * prefactor,
        quadrature: IntegralResult {
            value: quad.value * prefactor,
            err_estimate: quad.err_estimate / (T::PI() + T::PI()),
            converged: quad.converged,
            evaluations: quad.evaluations,
        },
        warning: boundary_proximity_warning(domain, z),
    })
}

/// Boundary transform `Sf(z) = -∮_{bΩ} f(ζ)/(ζ-z) dζ` for a boundary
/// density given as a plain closure.
///
/// # Errors
///
/// As [`op_phi`].
///
/// # Examples
///
/// ```
/// use dbar_core::geometry::make_disk;
/// use dbar_core::operators::op_s;
/// use dbar_core::quadrature::QuadratureSpec;
/// use num_complex::Complex;
///
/// let disk = make_disk(Complex::new(0.0, 0.0), 1.0).unwrap();
/// let one = |_zeta: Complex<f64>| Complex::new(1.0, 0.0);
/// let ev = op_s(&disk, one, Complex::new(0.2, 0.0), &QuadratureSpec::default()).unwrap();
/// // Residue theorem: S(1) = -2πi inside.
/// assert!((ev.value - Complex::new(0.0, -2.0 * std::f64::consts::PI)).norm() < 1e-10);
/// ```
pub fn op_s<T, F>(
    domain: &PlanarDomain<T>,
    boundary_fn: F,
    z: Complex<T>,
    spec: &QuadratureSpec<T>,
) -> Result<OperatorEvaluation<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    require_interior(domain, z, "the boundary transform S")?;
    let quad = boundary_integral(domain, spec, |zeta, dzeta, _| {
        -boundary_fn(zeta) / (zeta - z) * dzeta
    })?;
    Ok(OperatorEvaluation {
        operator: Operator::S,
        point: z,
        value: quad.value,
        quadrature: quad,
        warning: boundary_proximity_warning(domain, z),
    })
}

/// Regularized transform
/// `²Tf(z) = -(1/π) ∬_Ω (f(ζ)-f(z))/(ζ-z)² dA`.
///
/// The difference in the numerator tames the kernel to `O(ω_f(s)/s²)`:
/// integrable in area measure exactly when the modulus of continuity of
/// `f` beats one logarithm. The evaluation runs the shrinking-disk
/// schedule of the quadrature spec and extrapolates the partial sums
/// (Aitken Δ², exact when the tail decays geometrically, as it does for
/// inverse-log data with order above 1). A schedule whose partial sums
/// keep growing is reported as genuinely divergent.
///
/// # Errors
///
/// Returns [`DbarError::InvalidCenter`] for exterior `z` and
/// [`DbarError::DivergentEvaluation`] (carrying the partial moduli) when
/// the regularization fails to converge at all — the behavior of ν ≤ 1
/// data at the singular point.
///
/// # Examples
///
/// ```
/// use dbar_core::geometry::make_disk;
/// use dbar_core::operators::op_2t;
/// use dbar_core::quadrature::QuadratureSpec;
/// use dbar_core::testfields::field_f_nu;
/// use num_complex::Complex;
///
/// let disk = make_disk(Complex::new(0.0, 0.0), 0.5).unwrap();
/// let spec = QuadratureSpec { tol: 1e-5, ..QuadratureSpec::default() };
/// let ev = op_2t(&disk, &field_f_nu(2.0), Complex::new(0.0, 0.0), &spec).unwrap();
/// // ²Tf̃₂(0) = -1/ln 4.
/// assert!((ev.value.re + 1.0 / 4.0_f64.ln()).abs() < 1e-6);
/// ```
pub fn op_2t<T: Real>(
    domain: &PlanarDomain<T>,
    f: &ScalarField<T>,
    z: Complex<T>,
    spec: &QuadratureSpec<T>,
) -> Result<OperatorEvaluation<T>> {
    require_interior(domain, z, "the regularized transform")?;
    let fz = f.value(z);
    let quad = pv_limit_integral(domain, z, spec, |zeta, offset| {
        (f.value(zeta) - fz) / (offset * offset)
    })?;
    let inv_pi = -T::PI().recip();
    Ok(OperatorEvaluation {
        operator: Operator::TwoT,
        point: z,
        value: quad.value * inv_pi,
        quadrature: IntegralResult {
            value: quad.value * inv_pi,
            err_estimate: quad.err_estimate * T::PI().recip(),
            converged: quad.converged,
            evaluations: quad.evaluations,
        },
        warning: None,
    })
}

/// `Hf = ∂(Tf)`, by the regularization identity or as a direct
/// principal value.
///
/// The identity route computes `²Tf(z) - f(z)·Φ(z)` — no principal
/// value is taken anywhere. The direct route evaluates
/// `p.v. -(1/π)∬ f(ζ)/(ζ-z)² dA` through the shrinking-disk schedule
/// *and* cross-checks it against the identity route; a disagreement
/// beyond ten times the combined error estimates (plus a fixed
/// `10⁻¹³`-scale roundoff floor) aborts with an inconsistency error,
/// because the two routes are mathematically equal and share no
/// quadrature path.
///
/// # Errors
///
/// Propagates [`DbarError::DivergentEvaluation`] from the regularized
/// transform, and returns [`DbarError::Inconsistency`] when the two
/// methods disagree as described.
pub fn op_h<T: Real>(
    domain: &PlanarDomain<T>,
    f: &ScalarField<T>,
    z: Complex<T>,
    spec: &QuadratureSpec<T>,
    method: HMethod,
) -> Result<OperatorEvaluation<T>> {
    require_interior(domain, z, "the operator H")?;
    let two_t = op_2t(domain, f, z, spec)?;
    let phi = op_phi(domain, z, spec)?;
    let fz = f.value(z);
    let identity_value = two_t.value - fz * phi.value;
    let identity_err = two_t.quadrature.err_estimate + fz.norm() * phi.quadrature.err_estimate;
    let identity = OperatorEvaluation {
        operator: Operator::HIdentity,
        point: z,
        value: identity_value,
        quadrature: IntegralResult {
            value: identity_value,
            err_estimate: identity_err,
            converged: two_t.quadrature.converged && phi.quadrature.converged,
            evaluations: two_t.quadrature.evaluations + phi.quadrature.evaluations,
        },
        warning: phi.warning,
    };
    match method {
        HMethod::Identity => Ok(identity),
        HMethod::DirectPv => {
            let quad = pv_limit_integral(domain, z, spec, |zeta, offset| {
                f.value(zeta) / (offset * offset)
            })?;
            let inv_pi = -T::PI().recip();
            let direct_value = quad.value * inv_pi;
            let direct_err = quad.err_estimate * T::PI().recip();
            let combined = direct_err
                + identity.quadrature.err_estimate
                + T::of(1e-13) * (T::one() + identity_value.norm());
            let gap = (direct_value - identity.value).norm();
            if gap > T::of(10.0) * combined {
                return Err(DbarError::Inconsistency(format!(
                    "direct principal value {direct_value} and regularization identity {} \
                     disagree by {gap:e} (> 10x combined error {combined:e}) at {z}",
                    identity.value
                )));
            }
            Ok(OperatorEvaluation {
                operator: Operator::HDirect,
                point: z,
                value: direct_value,
                quadrature: IntegralResult {
                    value: direct_value,
                    err_estimate: direct_err,
                    converged: quad.converged,
                    evaluations: quad.evaluations + identity.quadrature.evaluations,
                },
                warning: None,
            })
        }
    }
}

/// Annular residual `∫_{Ω∖D(z,r)} (ζ-z)^{-2} dζ̄∧dζ`, reported in the
/// complex area form normalization (`dζ̄∧dζ = 2i·dA`).
///
/// No singularity is present — the excluded disk removes it — so this is
/// a plain graded quadrature from radius `r` outward. The excluded disk
/// may stick out of the domain. By the Stokes argument the value equals
/// `∮_{bΩ} dζ̄/(ζ-z)` whenever `D(z,r) ⊆ Ω`, independent of `r`; its
/// modulus stays below `8π` on disks for every admissible `(z, r)`.
///
/// # Errors
///
/// Returns [`DbarError::InvalidCenter`] for exterior `z` and
/// [`DbarError::InvalidArgument`] for `r ≤ 0`.
pub fn nw_residual<T: Real>(
    domain: &PlanarDomain<T>,
    z: Complex<T>,
    r: T,
    spec: &QuadratureSpec<T>,
) -> Result<OperatorEvaluation<T>> {
    require_interior(domain, z, "the annular residual")?;
    if !(r > T::zero()) || !r.is_finite() {
        return Err(DbarError::InvalidArgument(format!(
            "exclusion radius must be positive and finite, got {r}"
        )));
    }
    let two_i = Complex::new(T::zero(), T::one() + T::one());
    let smax = domain.max_boundary_radius(z);
    if r >= smax {
        // The excluded disk covers the whole domain: empty integral.
        return Ok(OperatorEvaluation {
            operator: Operator::NwResidual,
            point: z,
            value: Complex::new(T::zero(), T::zero()),
            quadrature: IntegralResult {
                value: Complex::new(T::zero(), T::zero()),
                err_estimate: T::zero(),
                converged: true,
                evaluations: 0,
            },
            warning: Some(format!(
                "exclusion radius {r} covers the whole domain (outer radius {smax}); \
                 the residual region is empty"
            )),
        });
    }
    let quad = polar_annulus_integral(domain, z, spec, r, |_zeta, offset| {
        (offset * offset).inv()
    })?;
    Ok(OperatorEvaluation {
        operator: Operator::NwResidual,
        point: z,
        value: quad.value * two_i,
        quadrature: IntegralResult {
            value: quad.value * two_i,
            err_estimate: quad.err_estimate * (T::one() + T::one()),
            converged: quad.converged,
            evaluations: quad.evaluations,
        },
        warning: None,
    })
}

/// Solves `∂̄u = f` on a grid: `u = Tf`, `∂u = Hf` (identity route),
/// `∂̄u = f`, plus a grid-limited first-order norm estimate at order
/// `nu - 1` and a finite-difference residual check on a subsample.
///
/// # Arguments
///
/// * `domain` — region of the equation.
/// * `f` — datum, assumed continuous on the closed domain with
///   inverse-log order `nu` at worst.
/// * `grid` — interior evaluation points, each with boundary distance
///   at least 100 quadrature cutoffs.
/// * `nu` — declared smoothness order of the datum; must exceed 1.
/// * `spec` — quadrature parameters for every evaluation.
///
/// # Errors
///
/// Returns [`DbarError::Rejected`] for `nu ≤ 1` (below that order no C¹
/// solution needs to exist and the derivative operators are not
/// reliable), [`DbarError::InvalidArgument`] for an empty grid,
/// [`DbarError::InvalidCenter`] for a grid point too close to the
/// boundary, and [`DbarError::NotConverged`] naming the first grid point
/// whose quadrature exhausted refinement without meeting tolerance.
pub fn solve_dbar<T: Real>(
    domain: &PlanarDomain<T>,
    f: &ScalarField<T>,
    grid: &[Complex<T>],
    nu: T,
    spec: &QuadratureSpec<T>,
) -> Result<SolutionField<T>> {
    if !(nu > T::one()) {
        return Err(DbarError::Rejected(format!(
            "the solver requires an inverse-log order above 1, got nu = {nu}; at or below \
             that order the gradient of the potential can be unbounded"
        )));
    }
    if grid.is_empty() {
        return Err(DbarError::InvalidArgument("solution grid is empty".into()));
    }
    let margin = spec.cutoff * T::of(GRID_MARGIN_CUTOFFS);
    for &z in grid {
        if !domain.contains(z) || domain.boundary_distance(z) < margin {
            return Err(DbarError::InvalidCenter(format!(
                "grid point {z} is outside the domain or closer than {margin:e} to the boundary"
            )));
        }
    }

    // Pointwise evaluations are independent; aggregate in grid order.
    let evaluations: Result<Vec<(Complex<T>, Complex<T>)>> = grid
        .par_iter()
        .map(|&z| {
            let t = op_t(domain, f, z, spec)?;
            if !t.quadrature.converged {
                return Err(DbarError::NotConverged(format!(
                    "transform quadrature did not converge at grid point {z}"
                )));
            }
            let h = op_h(domain, f, z, spec, HMethod::Identity)?;
            if !h.quadrature.converged {
                return Err(DbarError::NotConverged(format!(
                    "derivative quadrature did not converge at grid point {z}"
                )));
            }
            Ok((t.value, h.value))
        })
        .collect();
    let evaluations = evaluations?;
    let values: Vec<Complex<T>> = evaluations.iter().map(|e| e.0).collect();
    let dz_values: Vec<Complex<T>> = evaluations.iter().map(|e| e.1).collect();
    let dzbar_values: Vec<Complex<T>> = grid.iter().map(|&z| f.value(z)).collect();

    // Finite-difference ∂̄ residual on a deterministic subsample of
    // points whose stencils stay interior.
    let step = T::of(DBAR_CHECK_STEP);
    let candidates: Vec<usize> = (0..grid.len())
        .filter(|&i| domain.boundary_distance(grid[i]) > step * T::of(2.0))
        .collect();
    let stride = (candidates.len() / 5).max(1);
    let check_idx: Vec<usize> = candidates.iter().copied().step_by(stride).take(5).collect();
    let checks: Result<Vec<T>> = check_idx
        .par_iter()
        .map(|&i| {
            let z = grid[i];
            let u_at = |w: Complex<T>| -> Result<Complex<T>> {
                let ev = op_t(domain, f, w, spec)?;
                if !ev.quadrature.converged {
                    return Err(DbarError::NotConverged(format!(
                        "transform quadrature did not converge at stencil point {w}"
                    )));
                }
                Ok(ev.value)
            };
            let ex = Complex::new(step, T::zero());
            let ey = Complex::new(T::zero(), step);
            let fx = (u_at(z + ex)? - u_at(z - ex)?) / (step + step);
            let fy = (u_at(z + ey)? - u_at(z - ey)?) / (step + step);
            let i_unit = Complex::new(T::zero(), T::one());
            let dzbar = (fx + i_unit * fy) * T::of(0.5);
            Ok((dzbar - f.value(z)).norm())
        })
        .collect();
    let checks = checks?;
    let dbar_check_max = checks.iter().fold(T::zero(), |a, &b| a.max(b));

    let order = nu - T::one();
    let c1_norm_estimate = grid_c1_estimate(grid, &values, &dz_values, &dzbar_values, order);
    Ok(SolutionField {
        grid: grid.to_vec(),
        values,
        dz_values,
        dzbar_values,
        norm_report: NormReport {
            order,
            c1_norm_estimate,
            grid_limited: true,
            dbar_check_max,
            dbar_check_points: checks.len(),
        },
    })
}

/// Grid-limited first-order norm estimate: suprema over grid samples
/// plus increment seminorms over grid pairs separated by at most ½.
fn grid_c1_estimate<T: Real>(
    grid: &[Complex<T>],
    values: &[Complex<T>],
    dz: &[Complex<T>],
    dzbar: &[Complex<T>],
    order: T,
) -> T {
    let sup = |vs: &[Complex<T>]| vs.iter().fold(T::zero(), |a, v| a.max(v.norm()));
    let semi = |vs: &[Complex<T>]| {
        let mut best = T::zero();
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let h = (grid[i] - grid[j]).norm();
                if h > T::zero() && h <= T::of(0.5) {
                    let weight = (-h.ln()).powf(order);
                    best = best.max((vs[i] - vs[j]).norm() * weight);
                }
            }
        }
        best
    };
    sup(values) + sup(dz) + sup(dzbar) + semi(dz) + semi(dzbar)
}

/// Evaluates the finite-difference Wirtinger pair of a numerically
/// defined potential (such as `z ↦ op_t(...)`) with the solver's check
/// step. Exposed for verification code that needs the same stencil the
/// solver uses.
pub fn potential_fd_derivatives<T: Real>(
    u: impl Fn(Complex<T>) -> Complex<T>,
    z: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    wirtinger_fd_fn(u, z, T::of(DBAR_CHECK_STEP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_disk, make_ellipse};
    use crate::testfields::{field_constant, field_f_nu, field_polynomial};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn spec(tol: f64) -> QuadratureSpec<f64> {
        QuadratureSpec {
            tol,
            ..QuadratureSpec::default()
        }
    }

    fn one() -> ScalarField<f64> {
        field_constant(c(1.0, 0.0))
    }

    #[test]
    fn t_of_unit_datum_is_conjugation_on_disk() {
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let z = c(0.3, 0.1);
        let ev = op_t(&disk, &one(), z, &spec(1e-5)).unwrap();
        assert!(ev.quadrature.converged);
        assert!(
            (ev.value - z.conj()).norm() < 1e-4,
            "T1 error {}",
            (ev.value - z.conj()).norm()
        );
    }

    #[test]
    fn t_of_zero_datum_vanishes() {
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let ev = op_t(
            &disk,
            &field_constant(c(0.0, 0.0)),
            c(0.2, -0.4),
            &spec(1e-5),
        )
        .unwrap();
        assert!(ev.value.norm() < 1e-14);
    }

    #[test]
    fn t_rejects_exterior_points() {
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let err = op_t(&disk, &one(), c(1.5, 0.0), &spec(1e-5)).unwrap_err();
        assert_eq!(err.category(), "invalid-center");
    }

    #[test]
    fn dbar_of_t_reproduces_the_datum() {
        // ∂̄(Tf) = f, checked by a central stencil on the computed
        // potential for the inverse-log model datum.
        let disk = make_disk(c(0.0, 0.0), 0.5).unwrap();
        let f = field_f_nu(2.0);
        let q = spec(1e-5);
        let z = c(0.1, 0.0);
        let u = |w: Complex<f64>| op_t(&disk, &f, w, &q).unwrap().value;
        let (_, dzbar) = potential_fd_derivatives(u, z);
        assert!(
            (dzbar - f.value(z)).norm() < 1e-4,
            "residual {}",
            (dzbar - f.value(z)).norm()
        );
    }

    #[test]
    fn phi_vanishes_on_disks_everywhere() {
        let disk = make_disk(c(0.4, -0.3), 1.7).unwrap();
        for &z in &[c(0.4, -0.3), c(1.0, 0.2), c(-0.5, -1.0)] {
            let ev = op_phi(&disk, z, &spec(1e-6)).unwrap();
            assert!(ev.value.norm() < 1e-10, "Phi {} at {z}", ev.value.norm());
            assert!(ev.warning.is_none());
        }
    }

    #[test]
    fn phi_is_the_axis_ratio_constant_inside_ellipses() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        for &z in &[c(0.0, 0.0), c(1.2, 0.3), c(-0.7, -0.6)] {
            let ev = op_phi(&e, z, &spec(1e-6)).unwrap();
            assert!(
                (ev.value - c(1.0 / 3.0, 0.0)).norm() < 1e-8,
                "Phi at {z} = {}",
                ev.value
            );
        }
        // A circle parametrized as an ellipse is still a disk.
        let circle = make_ellipse(1.0, 1.0).unwrap();
        let ev = op_phi(&circle, c(0.0, 0.5), &spec(1e-6)).unwrap();
        assert!(ev.value.norm() < 1e-10);
    }

    #[test]
    fn phi_warns_near_the_boundary() {
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let ev = op_phi(&disk, c(1.0 - 1e-9, 0.0), &spec(1e-6)).unwrap();
        assert!(ev.warning.is_some());
    }

    #[test]
    fn s_examples_from_residue_calculus() {
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        // S(1) inside = -2πi.
        let ev = op_s(&disk, |_| c(1.0, 0.0), c(0.2, 0.0), &spec(1e-6)).unwrap();
        assert!((ev.value - c(0.0, -2.0 * PI)).norm() < 1e-10);
        // S(ζ̄)(0.5): ζ̄ = 1/ζ on the unit circle; residues at 0 and 0.5
        // cancel exactly.
        let ev = op_s(&disk, |zeta| zeta.conj(), c(0.5, 0.0), &spec(1e-6)).unwrap();
        assert!(ev.value.norm() < 1e-10, "S(conj) = {}", ev.value.norm());
        // Winding only: the same -2πi on an ellipse.
        let e = make_ellipse(2.0, 1.0).unwrap();
        let ev = op_s(&e, |_| c(1.0, 0.0), c(0.0, 0.0), &spec(1e-6)).unwrap();
        assert!((ev.value - c(0.0, -2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn two_t_annihilates_constants() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let ev = op_2t(&e, &field_constant(c(3.0, -2.0)), c(0.4, 0.2), &spec(1e-5)).unwrap();
        assert!(ev.value.norm() < 1e-10);
    }

    #[test]
    fn two_t_of_f2_at_origin_matches_closed_form() {
        let disk = make_disk(c(0.0, 0.0), 0.5).unwrap();
        let ev = op_2t(&disk, &field_f_nu(2.0), c(0.0, 0.0), &spec(1e-5)).unwrap();
        assert!(ev.quadrature.converged);
        assert_relative_eq!(ev.value.re, -1.0 / 4.0_f64.ln(), epsilon = 1e-6);
        assert!(ev.value.im.abs() < 1e-8);
    }

    #[test]
    fn two_t_of_f12_converges_near_the_heuristic_margin() {
        // ν = 1.2 contracts slowly (ratio 2^{-0.2} ≈ 0.87, just under the
        // divergence threshold 0.9): Aitken still nails the limit.
        let disk = make_disk(c(0.0, 0.0), 0.5).unwrap();
        let ev = op_2t(&disk, &field_f_nu(1.2), c(0.0, 0.0), &spec(1e-5)).unwrap();
        let want = -(2.0 * 2.0_f64.ln()).powf(-0.2) / 0.2;
        assert_relative_eq!(ev.value.re, want, epsilon = 1e-5);
    }

    #[test]
    fn two_t_of_f1_diverges_with_growth_diagnostic() {
        let disk = make_disk(c(0.0, 0.0), 0.5).unwrap();
        let err = op_2t(&disk, &field_f_nu(1.0), c(0.0, 0.0), &spec(1e-5)).unwrap_err();
        match err {
            DbarError::DivergentEvaluation { partial_moduli, .. } => {
                // Growth like ln L(ε): increments roughly constant.
                assert!(partial_moduli.len() >= 4);
                assert!(partial_moduli.windows(2).all(|w| w[1] > w[0]));
            }
            other => panic!("expected divergent-evaluation, got {other}"),
        }
    }

    #[test]
    fn h_identity_examples() {
        // Constants: ²T term vanishes; on disks Φ vanishes too.
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let ev = op_h(&disk, &one(), c(0.3, 0.0), &spec(1e-5), HMethod::Identity).unwrap();
        assert!(ev.value.norm() < 1e-10);
        // On the ellipse H(1) = -Φ = -1/3.
        let e = make_ellipse(2.0, 1.0).unwrap();
        for method in [HMethod::Identity, HMethod::DirectPv] {
            let ev = op_h(&e, &one(), c(0.0, 0.0), &spec(1e-5), method).unwrap();
            assert!(
                (ev.value - c(-1.0 / 3.0, 0.0)).norm() < 1e-4,
                "H(1) = {} via {method:?}",
                ev.value
            );
        }
    }

    #[test]
    fn h_both_methods_agree_on_the_singular_field() {
        let disk = make_disk(c(0.0, 0.0), 0.5).unwrap();
        let f = field_f_nu(2.0);
        let a = op_h(&disk, &f, c(0.0, 0.0), &spec(1e-5), HMethod::Identity).unwrap();
        let b = op_h(&disk, &f, c(0.0, 0.0), &spec(1e-5), HMethod::DirectPv).unwrap();
        assert_relative_eq!(a.value.re, -1.0 / 4.0_f64.ln(), epsilon = 1e-3);
        assert!((a.value - b.value).norm() < 1e-3);
    }

    #[test]
    fn h_direct_matches_identity_on_smooth_data_on_disks() {
        // Disk specialization: with Φ ≡ 0, H = ²T; the direct principal
        // value agrees to 1e-6 for smooth fields.
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let f = field_polynomial(&[(c(1.0, 0.0), 1, 1), (c(0.0, 1.0), 0, 2)]);
        let z = c(0.3, -0.2);
        let direct = op_h(&disk, &f, z, &spec(1e-7), HMethod::DirectPv).unwrap();
        let ident = op_h(&disk, &f, z, &spec(1e-7), HMethod::Identity).unwrap();
        assert!(
            (direct.value - ident.value).norm() < 1e-6,
            "gap {}",
            (direct.value - ident.value).norm()
        );
    }

    #[test]
    fn operators_are_linear_at_fixed_mesh() {
        // With a tolerance no level can meet, every evaluation runs the
        // same fixed mesh sequence, making T and ²T exactly linear
        // functionals of the sampled field values.
        let e = make_ellipse(2.0, 1.0).unwrap();
        let mut q = spec(1e-13);
        q.max_refinements = 2;
        let g = field_polynomial(&[(c(1.0, 0.0), 1, 1)]);
        let h = field_polynomial(&[(c(0.0, 1.0), 0, 2), (c(0.5, 0.0), 2, 0)]);
        let (a, b) = (c(2.0, -1.0), c(-0.5, 3.0));
        let combo_terms = [
            (a, 1u32, 1u32),
            (b * c(0.0, 1.0), 0, 2),
            (b * c(0.5, 0.0), 2, 0),
        ];
        let combo = field_polynomial(&combo_terms);
        let z = c(0.4, 0.3);
        for op in [op_t, op_2t] {
            let va = op(&e, &g, z, &q).unwrap().value;
            let vb = op(&e, &h, z, &q).unwrap().value;
            let vc = op(&e, &combo, z, &q).unwrap().value;
            let gap = (vc - (a * va + b * vb)).norm();
            assert!(gap < 1e-8, "linearity gap {gap}");
        }
    }

    #[test]
    fn nw_residual_concentric_symmetry_and_disk_bound() {
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        // Concentric: every ring integrates e^{-2iθ} to zero.
        let ev = nw_residual(&disk, c(0.0, 0.0), 0.5, &spec(1e-6)).unwrap();
        assert!(ev.value.norm() < 1e-8, "concentric {}", ev.value.norm());
        // Off-center with the excluded disk poking outside: ≤ 8π.
        let ev = nw_residual(&disk, c(0.5, 0.0), 0.7, &spec(1e-5)).unwrap();
        assert!(ev.value.norm() <= 8.0 * PI * 1.001);
    }

    #[test]
    fn nw_residual_equals_boundary_term_when_disk_is_inside() {
        // Stokes: the annulus integral is r-independent and equals
        // ∮ dζ̄/(ζ-z) = 2πi·Φ(z) while D(z,r) stays inside.
        let e = make_ellipse(2.0, 1.0).unwrap();
        let z = c(0.5, 0.0);
        let phi = op_phi(&e, z, &spec(1e-6)).unwrap().value;
        let want = phi * c(0.0, 2.0 * PI);
        for &r in &[0.05, 0.2, 0.5] {
            let ev = nw_residual(&e, z, r, &spec(1e-5)).unwrap();
            assert!(
                (ev.value - want).norm() < 1e-4,
                "r={r}: {} vs {want}",
                ev.value
            );
        }
    }

    #[test]
    fn nw_residual_empty_annulus_warns() {
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let ev = nw_residual(&disk, c(0.0, 0.0), 2.5, &spec(1e-5)).unwrap();
        assert_eq!(ev.value, c(0.0, 0.0));
        assert!(ev.warning.is_some());
    }

    #[test]
    fn solver_reproduces_conjugation_for_unit_datum() {
        let disk = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let grid = vec![c(0.0, 0.0), c(0.3, 0.1), c(-0.2, 0.4), c(0.1, -0.5), c(-0.4, -0.3)];
        let sol = solve_dbar(&disk, &one(), &grid, 2.0, &spec(1e-5)).unwrap();
        for (z, u) in sol.grid.iter().zip(&sol.values) {
            assert!((u - z.conj()).norm() < 1e-4, "u({z}) = {u}");
        }
        for du in &sol.dz_values {
            assert!(du.norm() < 1e-6);
        }
        for dbu in &sol.dzbar_values {
            assert_eq!(*dbu, c(1.0, 0.0));
        }
        assert!(sol.norm_report.grid_limited);
        assert!(sol.norm_report.dbar_check_points >= 1);
        assert!(sol.norm_report.dbar_check_max < 1e-3);
        // sup|u| + sup|∂̄u| ≈ 0.54 + 1, derivative seminorms ≈ 0.
        assert!((1.0..2.2).contains(&sol.norm_report.c1_norm_estimate));
    }

    #[test]
    fn solver_checks_the_dbar_residual_on_the_model_datum() {
        let disk = make_disk(c(0.0, 0.0), 0.5).unwrap();
        let f = field_f_nu(2.0);
        let grid: Vec<Complex<f64>> = vec![
            c(0.0, 0.0),
            c(0.1, 0.0),
            c(0.0, 0.15),
            c(-0.12, 0.05),
            c(0.08, -0.11),
            c(-0.05, -0.14),
            c(0.2, 0.1),
            c(-0.18, -0.02),
            c(0.03, 0.21),
        ];
        let sol = solve_dbar(&disk, &f, &grid, 2.0, &spec(1e-5)).unwrap();
        assert!(sol.norm_report.dbar_check_points >= 3);
        assert!(
            sol.norm_report.dbar_check_max < 1e-3,
            "residual {}",
            sol.norm_report.dbar_check_max
        );
        assert!(sol.norm_report.order == 1.0);
    }

    #[test]
    fn solver_rejects_low_orders_and_bad_grids() {
        let disk = make_disk(c(0.0, 0.0), 0.5).unwrap();
        let f = field_f_nu(1.0);
        let err = solve_dbar(&disk, &f, &[c(0.1, 0.0)], 1.0, &spec(1e-5)).unwrap_err();
        assert_eq!(err.category(), "rejected");
        let f2 = field_f_nu(2.0);
        let err = solve_dbar(&disk, &f2, &[], 2.0, &spec(1e-5)).unwrap_err();
        assert_eq!(err.category(), "invalid-argument");
        let err = solve_dbar(&disk, &f2, &[c(0.499999999, 0.0)], 2.0, &spec(1e-5)).unwrap_err();
        assert_eq!(err.category(), "invalid-center");
    }
}
