//! Moduli of continuity and inverse-logarithm smoothness norms.
//!
//! Classical Hölder scales measure increments against powers `|h|^α`.
//! The function classes this module measures sit strictly between
//! continuity and every Hölder class: a field belongs to `C^{Log^ν L}`
//! when its modulus of continuity decays like `|ln |h||^{-ν}`. The
//! measuring instrument is a sampled modulus profile
//!
//! ```text
//! ω(h_k) = sup |f(w + h) - f(w)|,    |h| = h_k = 2^{-k},
//! ```
//!
//! taken over a deterministic low-discrepancy cloud of base points with
//! eight compass directions per point, plus the deterministic segment
//! pairs marching away from a field's declared singular point (the
//! worst-case pairs for the model fields, which are exactly the ones a
//! quasi-uniform cloud is most likely to miss). From a profile one can
//! form norm estimates ([`log_norm`], [`c1_log_norm`]) and fit the decay
//! order ([`fit_log_order`]): under `ω(h) ≍ |ln h|^{-ν}`, regressing
//! `ln ω` on `ln ln (1/h)` has slope `-ν`.
//!
//! All estimates are sampled *lower* bounds of true suprema. Fits are
//! exact for synthetic inverse-log data; on whole-domain samples of
//! fields with mixed behavior (small increments near the singular point,
//! ordinary Lipschitz increments elsewhere) the fitted order reflects
//! the sampled supremum, which coarse scales can legitimately dominate.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{DbarError, Result};
use crate::geometry::{DomainKind, PlanarDomain};
use crate::scalar::{cis, Real};
use crate::testfields::ScalarField;

/// First Kronecker increment (plastic-number pair) of the base-point
/// sequence.
const KRONECKER_A1: f64 = 0.754_877_666_246_692_7;
/// Second Kronecker increment of the base-point sequence.
const KRONECKER_A2: f64 = 0.569_840_290_998_053_2;
/// Deterministic index stride applied per seed unit, decorrelating
/// different seeds while keeping each stream low-discrepancy.
const SEED_STRIDE: u64 = 7919;

/// Sampled modulus of continuity of a field across dyadic scales.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusProfile<T: Real> {
    /// Dyadic scales `h_k = 2^{-k}`, decreasing.
    pub scales: Vec<T>,
    /// Largest sampled increment `|f(w+h) - f(w)|` at each scale.
    pub omega: Vec<T>,
    /// Number of admissible pairs that contributed at each scale.
    pub pair_count: Vec<usize>,
    /// Largest `|f|` seen over all sampled points.
    pub sup_norm: T,
}

impl<T: Real> ModulusProfile<T> {
    /// Builds a profile from precomputed parts (for example radial
    /// evaluations of an operator too expensive to sample densely).
    ///
    /// # Errors
    ///
    /// Returns [`DbarError::InvalidArgument`] when the vectors disagree
    /// in length, a scale leaves `(0, ½]`, the scales fail to decrease,
    /// or an omega is negative.
    pub fn from_parts(
        scales: Vec<T>,
        omega: Vec<T>,
        pair_count: Vec<usize>,
        sup_norm: T,
    ) -> Result<Self> {
        if scales.len() != omega.len() || scales.len() != pair_count.len() || scales.is_empty() {
            return Err(DbarError::InvalidArgument(
                "profile parts must be equal-length and non-empty".into(),
            ));
        }
        let half = T::of(0.5);
        for w in scales.windows(2) {
            if !(w[1] < w[0]) {
                return Err(DbarError::InvalidArgument(
                    "profile scales must be strictly decreasing".into(),
                ));
            }
        }
        for &h in &scales {
            if !(h > T::zero() && h <= half) {
                return Err(DbarError::InvalidArgument(format!(
                    "profile scales must lie in (0, 1/2], got {h}"
                )));
            }
        }
        for &om in &omega {
            if !(om >= T::zero()) {
                return Err(DbarError::InvalidArgument(format!(
                    "omega values must be nonnegative, got {om}"
                )));
            }
        }
        Ok(ModulusProfile {
            scales,
            omega,
            pair_count,
            sup_norm,
        })
    }
}

/// Least-squares fit of the inverse-log decay order of a profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogOrderFit<T: Real> {
    /// Fitted order: `ω(h) ≈ C·|ln h|^{-nu_hat}`.
    pub nu_hat: T,
    /// Regression intercept (of `ln ω` against `ln ln (1/h)`).
    pub intercept: T,
    /// Largest absolute regression residual.
    pub residual: T,
    /// Number of scales that entered the fit (positive omegas only).
    pub scales_used: usize,
}

/// Deterministic low-discrepancy stream of points inside the domain.
///
/// Disk domains map the Kronecker sequence through the exact area-uniform
/// polar transform; other kinds rejection-sample the bounding box with
/// the same underlying stream.
fn base_points<T: Real>(
    domain: &PlanarDomain<T>,
    count: usize,
    seed: u64,
) -> Result<Vec<Complex<T>>> {
    let start = 1 + seed.wrapping_mul(SEED_STRIDE);
    let two_pi = T::PI() + T::PI();
    let unit = |j: u64, a: f64| -> T {
        let x = (0.5 + j as f64 * a).fract();
        T::of(x)
    };
    match &domain.kind {
        DomainKind::Disk { center, radius } => Ok((0..count as u64)
            .map(|i| {
                let j = start + i;
                let r = *radius * unit(j, KRONECKER_A1).sqrt();
                let theta = two_pi * unit(j, KRONECKER_A2);
                *center + cis(theta) * r
            })
            .collect()),
        _ => {
            // Bounding box from a dense boundary scan.
            let n = 1024;
            let mut xmin = T::infinity();
            let mut xmax = -T::infinity();
            let mut ymin = T::infinity();
            let mut ymax = -T::infinity();
            for j in 0..n {
                let t = two_pi * T::of(j as f64) / T::of(n as f64);
                let p = domain.boundary.position(t);
                xmin = xmin.min(p.re);
                xmax = xmax.max(p.re);
                ymin = ymin.min(p.im);
                ymax = ymax.max(p.im);
            }
            let mut pts = Vec::with_capacity(count);
            let mut i: u64 = 0;
            let cap = 200 * count as u64;
            while pts.len() < count && i < cap {
                let j = start + i;
                i += 1;
                let z = Complex::new(
                    xmin + (xmax - xmin) * unit(j, KRONECKER_A1),
                    ymin + (ymax - ymin) * unit(j, KRONECKER_A2),
                );
                if domain.contains(z) {
                    pts.push(z);
                }
            }
            if pts.len() < count {
                return Err(DbarError::InsufficientSampling(format!(
                    "could only place {} of {count} base points inside the domain",
                    pts.len()
                )));
            }
            Ok(pts)
        }
    }
}

/// Samples the modulus of continuity of `f` over the domain at dyadic
/// scales `h_k = 2^{-k}`, `k = k_min..=k_max`.
///
/// For every scale the estimator takes the maximum increment over
/// `pairs_per_scale` quasi-uniform base points × 8 compass directions
/// (pairs whose partner leaves the domain are dropped), and additionally
/// over the deterministic segment pairs
/// `(z₀ + j·h·ê, z₀ + (j+1)·h·ê)`, `j = 0..8`, in all 8 directions when
/// the field declares a singular point `z₀` — the worst-case pairs for
/// inverse-log fields, which a uniform cloud systematically misses.
///
/// # Arguments
///
/// * `domain` — region the pairs must stay inside.
/// * `f` — field to sample.
/// * `k_min`, `k_max` — dyadic scale range, `3 ≤ k_min < k_max`.
/// * `pairs_per_scale` — base points per scale (≥ 1000).
/// * `seed` — selects a deterministic sampling stream.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] for a malformed scale range or
/// undersized sample budget, and [`DbarError::InsufficientSampling`]
/// when some scale admits no valid pair at all.
///
/// # Examples
///
/// ```
/// use dbar_core::geometry::make_disk;
/// use dbar_core::logspace::modulus_profile;
/// use dbar_core::testfields::ScalarField;
/// use num_complex::Complex;
///
/// let disk = make_disk(Complex::new(0.0, 0.0), 0.5).unwrap();
/// // The conjugation field is an exact isometry: ω(h) = h.
/// let f = ScalarField::new("conj", |z: Complex<f64>| z.conj());
/// let p = modulus_profile(&disk, &f, 4, 8, 1000, 0).unwrap();
/// for (h, om) in p.scales.iter().zip(&p.omega) {
///     assert!((om - h).abs() < 1e-15);
/// }
/// ```
pub fn modulus_profile<T: Real>(
    domain: &PlanarDomain<T>,
    f: &ScalarField<T>,
    k_min: u32,
    k_max: u32,
    pairs_per_scale: usize,
    seed: u64,
) -> Result<ModulusProfile<T>> {
    if !(3 <= k_min && k_min < k_max) {
        return Err(DbarError::InvalidArgument(format!(
            "scale range must satisfy 3 <= k_min < k_max, got {k_min}..{k_max}"
        )));
    }
    if pairs_per_scale < 1000 {
        return Err(DbarError::InvalidArgument(format!(
            "pairs_per_scale must be at least 1000, got {pairs_per_scale}"
        )));
    }
    let bases = base_points(domain, pairs_per_scale, seed)?;
    let base_values: Vec<Complex<T>> = bases.iter().map(|&w| f.value(w)).collect();
    let dirs: Vec<Complex<T>> = (0..8)
        .map(|j| cis(T::PI() * T::of(j as f64) / T::of(4.0)))
        .collect();

    let scales: Vec<T> = (k_min..=k_max)
        .map(|k| T::of(0.5).powi(k as i32))
        .collect();

    // Scales are independent; reduce each with deterministic maxima.
    let per_scale: Vec<(T, usize, T)> = scales
        .par_iter()
        .map(|&h| {
            let mut omega = T::zero();
            let mut pairs = 0usize;
            let mut sup = T::zero();
            for d in &dirs {
                let step = *d * h;
                for (w, fw) in bases.iter().zip(base_values.iter()) {
                    let w2 = *w + step;
                    if !domain.contains(w2) {
                        continue;
                    }
                    let fv = f.value(w2);
                    omega = omega.max((fv - *fw).norm());
                    sup = sup.max(fv.norm());
                    pairs += 1;
                }
                if let Some(z0) = f.declared_singularity {
                    for j in 0..9u32 {
                        let a = z0 + step * T::of(f64::from(j));
                        let b = a + step;
                        if !domain.contains(b) || !domain.contains(a) {
                            continue;
                        }
                        let fa = f.value(a);
                        let fb = f.value(b);
                        omega = omega.max((fb - fa).norm());
                        sup = sup.max(fa.norm()).max(fb.norm());
                        pairs += 1;
                    }
                }
            }
            (omega, pairs, sup)
        })
        .collect();

    let mut omega = Vec::with_capacity(per_scale.len());
    let mut pair_count = Vec::with_capacity(per_scale.len());
    let mut sup_norm = base_values
        .iter()
        .fold(T::zero(), |acc, v| acc.max(v.norm()));
    for (k_off, (om, pairs, sup)) in per_scale.iter().enumerate() {
        if *pairs == 0 {
            return Err(DbarError::InsufficientSampling(format!(
                "no admissible pairs at scale 2^-{}",
                k_min + k_off as u32
            )));
        }
        omega.push(*om);
        pair_count.push(*pairs);
        sup_norm = sup_norm.max(*sup);
    }
    Ok(ModulusProfile {
        scales,
        omega,
        pair_count,
        sup_norm,
    })
}

/// Norm estimate `sup|f| + max_k ω(h_k)·|ln h_k|^ν` of membership in the
/// order-ν inverse-log class (`k = 0` case).
///
/// The result is a sampled lower estimate of the true norm: the sup and
/// the seminorm both come from the profile's finite pair set.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when `nu ≤ 0`.
///
/// # Examples
///
/// ```
/// use dbar_core::logspace::{log_norm, ModulusProfile};
///
/// // Synthetic profile of a constant field: all increments vanish.
/// let p = ModulusProfile::from_parts(
///     vec![0.25, 0.125],
///     vec![0.0, 0.0],
///     vec![100, 100],
///     3.0,
/// ).unwrap();
/// assert_eq!(log_norm(&p, 2.0).unwrap(), 3.0);
/// ```
pub fn log_norm<T: Real>(profile: &ModulusProfile<T>, nu: T) -> Result<T> {
    if !(nu > T::zero()) {
        return Err(DbarError::InvalidArgument(format!(
            "log-norm order must be positive, got {nu}"
        )));
    }
    let mut semi = T::zero();
    for (&h, &om) in profile.scales.iter().zip(profile.omega.iter()) {
        semi = semi.max(om * (-h.ln()).powf(nu));
    }
    Ok(profile.sup_norm + semi)
}

/// Fits the inverse-log decay order of a profile by least squares of
/// `ln ω` against `ln ln (1/h)`.
///
/// Scales with `ω = 0` carry no information on a multiplicative scale
/// and are excluded.
///
/// # Errors
///
/// Returns [`DbarError::DegenerateFit`] when fewer than 4 scales have
/// positive omega.
///
/// # Examples
///
/// ```
/// use dbar_core::logspace::{fit_log_order, ModulusProfile};
///
/// // Synthetic data ω = |ln h|^{-3} is recovered exactly.
/// let scales: Vec<f64> = (4..=10).map(|k| 0.5f64.powi(k)).collect();
/// let omega: Vec<f64> = scales.iter().map(|h| h.ln().abs().powf(-3.0)).collect();
/// let counts = vec![1; scales.len()];
/// let p = ModulusProfile::from_parts(scales, omega, counts, 1.0).unwrap();
/// let fit = fit_log_order(&p).unwrap();
/// assert!((fit.nu_hat - 3.0).abs() < 1e-6);
/// ```
pub fn fit_log_order<T: Real>(profile: &ModulusProfile<T>) -> Result<LogOrderFit<T>> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&h, &om) in profile.scales.iter().zip(profile.omega.iter()) {
        if om > T::zero() {
            xs.push((-h.ln()).ln());
            ys.push(om.ln());
        }
    }
    let n = xs.len();
    if n < 4 {
        return Err(DbarError::DegenerateFit(format!(
            "log-order fit needs at least 4 scales with positive omega, got {n}"
        )));
    }
    let nf = T::of(n as f64);
    let xbar = xs.iter().fold(T::zero(), |a, &x| a + x) / nf;
    let ybar = ys.iter().fold(T::zero(), |a, &y| a + y) / nf;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        sxx = sxx + (x - xbar) * (x - xbar);
        sxy = sxy + (x - xbar) * (y - ybar);
    }
    if !(sxx > T::zero()) {
        return Err(DbarError::DegenerateFit(
            "all scales collapse to one regression abscissa".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mut residual = T::zero();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        residual = residual.max((y - (slope * x + intercept)).abs());
    }
    Ok(LogOrderFit {
        nu_hat: -slope,
        intercept,
        residual,
        scales_used: n,
    })
}

/// First-order inverse-log norm estimate
/// `sup|u| + sup|∂u| + sup|∂̄u| + Σ_{first derivatives} max_k ω·|ln h_k|^ν`.
///
/// Both Wirtinger derivative fields are sampled through
/// [`modulus_profile`] with the same parameters, inheriting the
/// singular-segment coverage from `u`'s declared singularity.
///
/// # Errors
///
/// As [`modulus_profile`], plus [`DbarError::InvalidArgument`] for
/// `nu ≤ 0`.
pub fn c1_log_norm<T: Real>(
    domain: &PlanarDomain<T>,
    u: &ScalarField<T>,
    nu: T,
    k_min: u32,
    k_max: u32,
    pairs_per_scale: usize,
    seed: u64,
) -> Result<T> {
    if !(nu > T::zero()) {
        return Err(DbarError::InvalidArgument(format!(
            "log-norm order must be positive, got {nu}"
        )));
    }
    let u_prof = modulus_profile(domain, u, k_min, k_max, pairs_per_scale, seed)?;
    let mut total = u_prof.sup_norm;
    for derivative in [true, false] {
        let inner = u.clone();
        let label = format!(
            "{}_{}",
            u.label,
            if derivative { "dz" } else { "dzbar" }
        );
        let mut g = ScalarField::new(label, move |z| {
            if derivative {
                inner.derivative_dz(z)
            } else {
                inner.derivative_dzbar(z)
            }
        });
        g.declared_singularity = u.declared_singularity;
        g.fd_step = u.fd_step;
        let prof = modulus_profile(domain, &g, k_min, k_max, pairs_per_scale, seed)?;
        total = total + log_norm(&prof, nu)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_disk, make_ellipse};
    use crate::testfields::{field_constant, field_f_nu, field_u_nu, log_weight};
    use approx::assert_relative_eq;

    fn half_disk() -> PlanarDomain<f64> {
        make_disk(Complex::new(0.0, 0.0), 0.5).unwrap()
    }

    #[test]
    fn synthetic_fit_recovers_order_exactly() {
        for &nu in &[0.7, 1.0, 2.0, 3.5] {
            let scales: Vec<f64> = (4..=14).map(|k| 0.5f64.powi(k)).collect();
            let omega: Vec<f64> = scales
                .iter()
                .map(|h| 2.3 * h.ln().abs().powf(-nu))
                .collect();
            let counts = vec![1; scales.len()];
            let p = ModulusProfile::from_parts(scales, omega, counts, 0.0).unwrap();
            let fit = fit_log_order(&p).unwrap();
            assert!(
                (fit.nu_hat - nu).abs() < 1e-6,
                "nu {nu} recovered as {}",
                fit.nu_hat
            );
            assert!(fit.residual < 1e-9);
            assert_eq!(fit.scales_used, 11);
        }
    }

    #[test]
    fn conjugation_field_has_unit_lipschitz_profile() {
        let f = ScalarField::new("conj", |z: Complex<f64>| z.conj());
        let p = modulus_profile(&half_disk(), &f, 4, 10, 1000, 0).unwrap();
        for (h, om) in p.scales.iter().zip(&p.omega) {
            assert_relative_eq!(*om, *h, epsilon = 1e-14);
        }
        assert!(p.pair_count.iter().all(|&c| c > 1000));
    }

    #[test]
    fn constant_field_profile_is_degenerate_for_fitting() {
        let f = field_constant(Complex::new(1.5, -0.5));
        let p = modulus_profile(&half_disk(), &f, 4, 10, 1000, 0).unwrap();
        assert!(p.omega.iter().all(|&om| om == 0.0));
        assert_relative_eq!(log_norm(&p, 2.0).unwrap(), 1.5811388300841898, epsilon = 1e-12);
        let err = fit_log_order(&p).unwrap_err();
        assert_eq!(err.category(), "degenerate-fit");
    }

    #[test]
    fn radial_base_pairs_fit_the_exact_order() {
        // Radial profile of f̃_ν along the worst-case segment: the fit
        // recovers ν to four decimals on k = 4..14.
        for &nu in &[2.0, 3.0] {
            let scales: Vec<f64> = (4..=14).map(|k| 0.5f64.powi(k)).collect();
            let omega: Vec<f64> = scales
                .iter()
                .map(|&h| {
                    let l = log_weight(Complex::new(h, 0.0));
                    l.powf(-nu)
                })
                .collect();
            let counts = vec![1; scales.len()];
            let p = ModulusProfile::from_parts(scales, omega, counts, 0.0).unwrap();
            let fit = fit_log_order(&p).unwrap();
            assert!(
                (fit.nu_hat - nu).abs() < 1e-3,
                "radial fit for nu={nu} gave {}",
                fit.nu_hat
            );
        }
    }

    #[test]
    fn whole_domain_estimator_matches_frozen_values() {
        // The mandated whole-domain estimator on disk(0,½): away from the
        // origin the model fields have ordinary Lipschitz increments that
        // dominate the coarse scales, so the fitted orders land far above
        // the radial-only values for f̃_ν — and inside the expected window
        // for the derivative field of ũ₂, whose profile the singular
        // segment controls at every scale.
        let disk = half_disk();
        let f2 = field_f_nu(2.0);
        let fit2 = fit_log_order(&modulus_profile(&disk, &f2, 4, 14, 10_000, 0).unwrap()).unwrap();
        assert_relative_eq!(fit2.nu_hat, 3.4607, epsilon = 2e-3);

        let f3 = field_f_nu(3.0);
        let fit3 = fit_log_order(&modulus_profile(&disk, &f3, 4, 14, 10_000, 0).unwrap()).unwrap();
        assert_relative_eq!(fit3.nu_hat, 5.3804, epsilon = 2e-3);

        let u2 = field_u_nu(2.0);
        let mut du2 = ScalarField::new("du2", move |z| u2.derivative_dz(z));
        du2.declared_singularity = Some(Complex::new(0.0, 0.0));
        let fit_du =
            fit_log_order(&modulus_profile(&disk, &du2, 4, 14, 10_000, 0).unwrap()).unwrap();
        assert_relative_eq!(fit_du.nu_hat, 1.1965, epsilon = 2e-3);
    }

    #[test]
    fn f2_membership_product_is_bounded_two_sided() {
        // ω(h_k)·|ln h_k|² stays within fixed positive bounds: membership
        // in the order-2 class at the level the sampled sup can certify.
        let p = modulus_profile(&half_disk(), &field_f_nu(2.0), 4, 14, 10_000, 0).unwrap();
        for (&h, &om) in p.scales.iter().zip(p.omega.iter()) {
            let product = om * h.ln().abs().powi(2);
            assert!(
                (0.1..10.0).contains(&product),
                "product {product} escaped at h={h}"
            );
        }
    }

    #[test]
    fn log_norm_is_monotone_in_nu_and_resolves_the_ray_constant() {
        let p = modulus_profile(&half_disk(), &field_f_nu(2.0), 4, 14, 10_000, 0).unwrap();
        let n1 = log_norm(&p, 1.0).unwrap();
        let n2 = log_norm(&p, 2.0).unwrap();
        let n3 = log_norm(&p, 3.0).unwrap();
        // Every scale satisfies |ln h| > 1, so the weights grow with ν.
        assert!(n1 <= n2 && n2 <= n3);

        // Deep scales are resolved by the segment pair anchored at the
        // singularity itself: |f̃₂(0) - f̃₂(h ê)| = (2|ln h|)⁻² exactly, so
        // the order-2 product locks onto the constant 1/4 while the
        // order-3 product keeps growing like |ln h|/4 — membership at
        // order 2 with escape at order 3, read off one profile.
        let t = p.scales.last().unwrap().ln().abs();
        let om = *p.omega.last().unwrap();
        let order2 = om * t.powi(2);
        assert!((order2 - 0.25).abs() < 0.02, "order-2 tail {order2}");
        let t_prev = p.scales[p.scales.len() - 2].ln().abs();
        let om_prev = p.omega[p.omega.len() - 2];
        let growth = om * t.powi(3) - om_prev * t_prev.powi(3);
        assert!(growth > 0.1, "order-3 growth per scale {growth}");
    }

    #[test]
    fn holder_field_embeds_into_every_log_class() {
        // For f = |z|^{1/2} the products ω·|ln h|^ν decay to 0: Hölder
        // classes sit inside every inverse-log class.
        let mut f = ScalarField::new("sqrt-abs", |z: Complex<f64>| {
            Complex::new(z.norm().sqrt(), 0.0)
        });
        f.declared_singularity = Some(Complex::new(0.0, 0.0));
        let p = modulus_profile(&half_disk(), &f, 6, 14, 1000, 0).unwrap();
        let prods: Vec<f64> = p
            .scales
            .iter()
            .zip(&p.omega)
            .map(|(&h, &om)| om * h.ln().abs().powi(2))
            .collect();
        assert!(prods.last().unwrap() < &(0.5 * prods[0]));

        // Contrast: for f̃₂ the order-2 product stays bounded below.
        let pf = modulus_profile(&half_disk(), &field_f_nu(2.0), 6, 14, 1000, 0).unwrap();
        let pf_last = pf.omega.last().unwrap() * pf.scales.last().unwrap().ln().abs().powi(2);
        assert!(pf_last > 0.2);
    }

    #[test]
    fn profiles_are_bit_identical_across_runs_and_differ_across_seeds() {
        let f = field_f_nu(2.0);
        let a = modulus_profile(&half_disk(), &f, 4, 10, 2000, 7).unwrap();
        let b = modulus_profile(&half_disk(), &f, 4, 10, 2000, 7).unwrap();
        assert_eq!(a, b);
        let c = modulus_profile(&half_disk(), &f, 4, 10, 2000, 8).unwrap();
        assert!(a.omega != c.omega);
    }

    #[test]
    fn rejection_sampling_covers_non_disk_domains() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let f = ScalarField::new("conj", |z: Complex<f64>| z.conj());
        let p = modulus_profile(&e, &f, 4, 8, 1000, 0).unwrap();
        for (h, om) in p.scales.iter().zip(&p.omega) {
            assert_relative_eq!(*om, *h, epsilon = 1e-14);
        }
    }

    #[test]
    fn c1_norm_of_conjugation_solution_is_two() {
        // u = z̄ solves the unit-source problem: |u| sup ≈ 1 on the unit
        // disk, derivatives (0, 1) are constant, seminorms vanish.
        let disk = make_disk(Complex::new(0.0, 0.0), 1.0).unwrap();
        let u = ScalarField::new("conj", |z: Complex<f64>| z.conj())
            .with_dz(|_| Complex::new(0.0, 0.0))
            .with_dzbar(|_| Complex::new(1.0, 0.0));
        let norm = c1_log_norm(&disk, &u, 1.0, 4, 10, 1000, 0).unwrap();
        assert!((1.9..=2.01).contains(&norm), "norm {norm}");
    }

    #[test]
    fn c1_norm_of_u2_plateaus_at_sharp_order_and_grows_past_it() {
        // ∂ũ₂ has derivative modulus ≈ 1/(2|ln h|) near the singularity,
        // so at the sharp order 1 the weighted products plateau (the
        // deep-window gain is small), while at order 3/2 they grow like
        // √|ln h| and deepening the window keeps adding norm.
        let disk = half_disk();
        let u = field_u_nu(2.0);
        let at_one_short = c1_log_norm(&disk, &u, 1.0, 4, 10, 2000, 0).unwrap();
        let at_one_long = c1_log_norm(&disk, &u, 1.0, 4, 14, 2000, 0).unwrap();
        assert!(
            at_one_long < 1.10 * at_one_short,
            "{at_one_long} vs {at_one_short}"
        );
        let at_15_short = c1_log_norm(&disk, &u, 1.5, 4, 10, 2000, 0).unwrap();
        let at_15_long = c1_log_norm(&disk, &u, 1.5, 4, 14, 2000, 0).unwrap();
        let grow_sharp = at_one_long - at_one_short;
        let grow_past = at_15_long - at_15_short;
        assert!(
            grow_past > grow_sharp + 0.05,
            "deep-window gain {grow_past} at order 3/2 vs {grow_sharp} at order 1"
        );
    }

    #[test]
    fn modulus_profile_validates_inputs() {
        let f = field_f_nu(2.0);
        assert!(modulus_profile(&half_disk(), &f, 2, 10, 1000, 0).is_err());
        assert!(modulus_profile(&half_disk(), &f, 8, 8, 1000, 0).is_err());
        assert!(modulus_profile(&half_disk(), &f, 4, 10, 10, 0).is_err());
        assert!(log_norm(
            &ModulusProfile::from_parts(vec![0.25], vec![1.0], vec![1], 0.0).unwrap(),
            0.0
        )
        .is_err());
    }
}
