//! Bounded planar domains with smooth positively oriented boundaries.
//!
//! A [`PlanarDomain`] couples a parametrized [`BoundaryCurve`] on `[0, 2π)`
//! with a structural [`DomainKind`] tag. The tag lets membership and
//! distance queries use closed forms where they exist (disks, ellipses,
//! polar-graph perturbed disks) and generic winding-number machinery
//! otherwise. Beyond the public queries, the module supplies the angular
//! chord decomposition `{θ : z + s·e^{iθ} ∈ Ω}` that the polar area
//! quadrature uses to clip circles against the boundary exactly.
//!
//! # Conventions
//!
//! - Domains are open: boundary points are not interior.
//! - [`PlanarDomain::boundary_distance`] is signed — positive inside,
//!   negative outside, zero on the boundary.
//! - All boundary parametrizations wind once counterclockwise; the
//!   constructors verify this with a winding-number check.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{DbarError, Result};
use crate::scalar::{cis, Real};

/// Sample count for the dense parameter scans behind numeric distance and
/// extremal-radius queries on non-disk domains. Each scan is refined by a
/// golden-section polish, so this only needs to bracket extrema reliably.
const SCAN_SAMPLES: usize = 2048;

/// Sample count for winding-number membership on generic domains.
/// Trapezoid sums converge spectrally on analytic curves, so 2048 nodes
/// leave the result exact to well below the 0.5 rounding threshold.
const WINDING_NODES: usize = 2048;

/// Angular samples used to bracket inside/outside transitions when
/// clipping the circle `z + s·e^{iθ}` against a non-disk boundary.
const ARC_SCAN_SAMPLES: usize = 1024;

/// Smooth closed boundary curve parametrized on `[0, 2π)`.
///
/// `position` and `derivative` must be 2π-periodic; the derivative must
/// never vanish (non-degenerate parametrization). Construction validates
/// both on a sample grid.
#[derive(Clone)]
pub struct BoundaryCurve<T: Real> {
    position: Arc<dyn Fn(T) -> Complex<T> + Send + Sync>,
    derivative: Arc<dyn Fn(T) -> Complex<T> + Send + Sync>,
    /// Hölder exponent of the first derivative, carried as metadata only.
    pub regularity_alpha: T,
}

impl<T: Real> BoundaryCurve<T> {
    /// Builds a curve from position and derivative closures.
    ///
    /// # Arguments
    ///
    /// * `position` — 2π-periodic parametrization of the boundary.
    /// * `derivative` — its exact parameter derivative.
    /// * `regularity_alpha` — Hölder exponent metadata in `(0, 1]`.
    ///
    /// # Errors
    ///
    /// Returns [`DbarError::InvalidArgument`] when the curve fails to
    /// close up at machine precision, the derivative vanishes on a
    /// 256-point grid, or `regularity_alpha` leaves `(0, 1]`.
    pub fn new(
        position: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
        derivative: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
        regularity_alpha: T,
    ) -> Result<Self> {
        if regularity_alpha <= T::zero() || regularity_alpha > T::one() {
            return Err(DbarError::InvalidArgument(format!(
                "boundary regularity exponent must lie in (0, 1], got {regularity_alpha}"
            )));
        }
        let curve = Self {
            position: Arc::new(position),
            derivative: Arc::new(derivative),
            regularity_alpha,
        };
        let two_pi = T::PI() + T::PI();
        let gap = (curve.position(T::zero()) - curve.position(two_pi)).norm();
        let scale = curve.position(T::zero()).norm().max(T::one());
        // Tolerance tracks the scalar type: 1e-9 for f64, a few dozen
        // ulps of trigonometric roundoff for narrower types.
        let close_tol = T::of(1e-9).max(T::epsilon() * T::of(32.0));
        if gap > close_tol * scale {
            return Err(DbarError::InvalidArgument(format!(
                "boundary curve does not close: |position(0) - position(2pi)| = {gap:e}"
            )));
        }
        let n = 256;
        for j in 0..n {
            let t = two_pi * T::of(j as f64) / T::of(n as f64);
            if curve.derivative(t).norm() == T::zero() {
                return Err(DbarError::InvalidArgument(format!(
                    "boundary derivative vanishes at t = {t}"
                )));
            }
        }
        Ok(curve)
    }

    /// Boundary point at parameter `t`.
    #[inline]
    pub fn position(&self, t: T) -> Complex<T> {
        (self.position)(t)
    }

    /// Parameter derivative at `t`.
    #[inline]
    pub fn derivative(&self, t: T) -> Complex<T> {
        (self.derivative)(t)
    }
}

impl<T: Real> std::fmt::Debug for BoundaryCurve<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryCurve")
            .field("regularity_alpha", &self.regularity_alpha)
            .finish_non_exhaustive()
    }
}

/// Structural tag enabling closed-form geometry where available.
#[derive(Clone, Debug)]
pub enum DomainKind<T: Real> {
    /// Disk `{ |z - center| < radius }`.
    Disk {
        /// Center of the disk.
        center: Complex<T>,
        /// Radius, strictly positive.
        radius: T,
    },
    /// Axis-aligned ellipse `{ (x/a)² + (y/b)² < 1 }` with `a ≥ b`.
    Ellipse {
        /// Semi-axis along the real direction.
        semi_a: T,
        /// Semi-axis along the imaginary direction.
        semi_b: T,
    },
    /// Polar graph `r < 1 + delta·cos(mode·θ)` — a smooth star-shaped
    /// perturbation of the unit disk.
    PerturbedDisk {
        /// Perturbation amplitude.
        delta: T,
        /// Angular frequency of the perturbation.
        mode: u32,
    },
    /// No structural information; all queries go through the boundary
    /// parametrization and winding numbers.
    Generic,
}

/// Bounded planar domain with a smooth positively oriented boundary.
#[derive(Clone, Debug)]
pub struct PlanarDomain<T: Real> {
    /// Positively oriented boundary parametrization.
    pub boundary: BoundaryCurve<T>,
    /// Structural tag used for closed-form queries.
    pub kind: DomainKind<T>,
    /// Diameter of the domain (exact for disks and ellipses, a dense
    /// boundary scan otherwise).
    pub diameter: T,
}

/// Builds the disk of the given center and radius.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] for a non-positive radius or a
/// non-finite center.
///
/// # Examples
///
/// ```
/// use dbar_core::geometry::make_disk;
/// use num_complex::Complex;
///
/// let d = make_disk(Complex::new(0.0, 0.0), 0.5).unwrap();
/// assert!(d.contains(Complex::new(0.4, 0.0)));
/// assert!(!d.contains(Complex::new(0.6, 0.0)));
/// ```
pub fn make_disk<T: Real>(center: Complex<T>, radius: T) -> Result<PlanarDomain<T>> {
    if !(center.re.is_finite() && center.im.is_finite()) {
        return Err(DbarError::InvalidArgument(
            "disk center must be finite".into(),
        ));
    }
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(DbarError::InvalidArgument(format!(
            "disk radius must be positive and finite, got {radius}"
        )));
    }
    let boundary = BoundaryCurve::new(
        move |t| center + cis(t) * radius,
        move |t| cis(t) * Complex::new(T::zero(), radius),
        T::one(),
    )?;
    let domain = PlanarDomain {
        boundary,
        kind: DomainKind::Disk { center, radius },
        diameter: radius + radius,
    };
    domain.validate_orientation(center)?;
    Ok(domain)
}

/// Builds the axis-aligned ellipse with semi-axes `semi_a ≥ semi_b > 0`.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when the axes are mis-ordered or
/// not strictly positive.
pub fn make_ellipse<T: Real>(semi_a: T, semi_b: T) -> Result<PlanarDomain<T>> {
    if !(semi_b > T::zero()) || !(semi_a >= semi_b) || !semi_a.is_finite() {
        return Err(DbarError::InvalidArgument(format!(
            "ellipse axes must satisfy semi_a >= semi_b > 0, got ({semi_a}, {semi_b})"
        )));
    }
    let (a, b) = (semi_a, semi_b);
    let boundary = BoundaryCurve::new(
        move |t| Complex::new(a * t.cos(), b * t.sin()),
        move |t| Complex::new(-a * t.sin(), b * t.cos()),
        T::one(),
    )?;
    let domain = PlanarDomain {
        boundary,
        kind: DomainKind::Ellipse { semi_a, semi_b },
        diameter: semi_a + semi_a,
    };
    domain.validate_orientation(Complex::new(T::zero(), T::zero()))?;
    Ok(domain)
}

/// Builds the perturbed unit disk `r(θ) = 1 + delta·cos(mode·θ)`.
///
/// The bound `delta < 1/(1 + mode)` keeps the parametrization derivative
/// away from zero, so the boundary stays a smooth embedded curve.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when `delta` is negative or too
/// large for the requested mode.
pub fn make_perturbed_disk<T: Real>(delta: T, mode: u32) -> Result<PlanarDomain<T>> {
    let limit = T::one() / (T::one() + T::of(mode as f64));
    if !(delta >= T::zero()) || !(delta < limit) {
        return Err(DbarError::InvalidArgument(format!(
            "perturbation must satisfy 0 <= delta < 1/(1+mode) = {limit}, got {delta}"
        )));
    }
    let m = T::of(mode as f64);
    let d = delta;
    let boundary = BoundaryCurve::new(
        move |t| cis(t) * (T::one() + d * (m * t).cos()),
        move |t| {
            let rho = T::one() + d * (m * t).cos();
            let drho = -d * m * (m * t).sin();
            cis(t) * Complex::new(drho, rho)
        },
        T::one(),
    )?;
    let mut domain = PlanarDomain {
        boundary,
        kind: DomainKind::PerturbedDisk { delta, mode },
        diameter: T::one(),
    };
    domain.diameter = domain.scan_diameter();
    domain.validate_orientation(Complex::new(T::zero(), T::zero()))?;
    Ok(domain)
}

/// Wraps an arbitrary smooth positively oriented closed curve as a
/// generic-kind domain. Membership falls back to winding numbers and all
/// metric queries to dense parameter scans.
///
/// # Arguments
///
/// * `curve` — validated boundary parametrization.
/// * `interior_reference` — any point known to be inside, used to verify
///   the counterclockwise orientation.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when the winding number about
/// the reference point is not +1.
pub fn make_generic<T: Real>(
    curve: BoundaryCurve<T>,
    interior_reference: Complex<T>,
) -> Result<PlanarDomain<T>> {
    let mut domain = PlanarDomain {
        boundary: curve,
        kind: DomainKind::Generic,
        diameter: T::one(),
    };
    domain.diameter = domain.scan_diameter();
    domain.validate_orientation(interior_reference)?;
    Ok(domain)
}

impl<T: Real> PlanarDomain<T> {
    /// Winding number of the boundary about `z`, rounded to the nearest
    /// integer from a trapezoid sum of `dζ/(ζ - z)`.
    pub fn winding_number(&self, z: Complex<T>) -> i32 {
        let two_pi = T::PI() + T::PI();
        let n = WINDING_NODES;
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..n {
            let t = two_pi * T::of(j as f64) / T::of(n as f64);
            let pos = self.boundary.position(t);
            let dpos = self.boundary.derivative(t);
            acc = acc + dpos / (pos - z);
        }
        let winding = (acc * (two_pi / T::of(n as f64))).im / two_pi;
        winding.round().to_i32().unwrap_or(i32::MAX)
    }

    fn validate_orientation(&self, interior_reference: Complex<T>) -> Result<()> {
        let w = self.winding_number(interior_reference);
        if w != 1 {
            return Err(DbarError::InvalidArgument(format!(
                "boundary must wind once counterclockwise about the interior; got winding {w}"
            )));
        }
        Ok(())
    }

    /// True iff `z` lies in the open interior.
    ///
    /// Disk / ellipse / perturbed-disk kinds use their closed forms; the
    /// generic kind uses the winding number. Points exactly on the
    /// boundary may report either value.
    pub fn contains(&self, z: Complex<T>) -> bool {
        match &self.kind {
            DomainKind::Disk { center, radius } => (z - *center).norm() < *radius,
            DomainKind::Ellipse { semi_a, semi_b } => {
                let x = z.re / *semi_a;
                let y = z.im / *semi_b;
                x * x + y * y < T::one()
            }
            DomainKind::PerturbedDisk { delta, mode } => {
                let theta = z.im.atan2(z.re);
                let rho = T::one() + *delta * (T::of(*mode as f64) * theta).cos();
                z.norm() < rho
            }
            DomainKind::Generic => self.winding_number(z) == 1,
        }
    }

    /// Signed distance from `z` to the boundary: positive inside,
    /// negative outside. Exact for disks; a dense parameter scan with
    /// golden-section refinement otherwise (absolute accuracy near
    /// machine precision for smooth boundaries).
    pub fn boundary_distance(&self, z: Complex<T>) -> T {
        match &self.kind {
            DomainKind::Disk { center, radius } => *radius - (z - *center).norm(),
            _ => {
                let d = self.scan_min_radius(z);
                if self.contains(z) {
                    d
                } else {
                    -d
                }
            }
        }
    }

    /// Largest distance from `z` to the boundary — the outer radius of the
    /// polar quadrature mesh about `z`.
    pub fn max_boundary_radius(&self, z: Complex<T>) -> T {
        match &self.kind {
            DomainKind::Disk { center, radius } => *radius + (z - *center).norm(),
            _ => self.scan_max_radius(z),
        }
    }

    /// Radii at which the angular arc structure about `z` can change:
    /// all local extrema of `t ↦ |position(t) - z|`. The polar quadrature
    /// inserts these as radial cell edges so no cell straddles an arc
    /// topology change.
    pub fn critical_radii(&self, z: Complex<T>) -> Vec<T> {
        match &self.kind {
            DomainKind::Disk { center, radius } => {
                let d = (z - *center).norm();
                vec![*radius - d, *radius + d]
            }
            _ => self.scan_radius_extrema(z),
        }
    }

    /// Angular intervals `{θ : z + s·e^{iθ} ∈ Ω}` for a disk-kind domain,
    /// by the law of cosines.
    ///
    /// Interval endpoints are absolute angles; each interval `(t1, t2)`
    /// satisfies `t1 < t2` with the convention that the arc may pass
    /// through `t1 + 2π` when it wraps.
    ///
    /// # Errors
    ///
    /// Returns [`DbarError::UnsupportedKind`] for non-disk domains and
    /// [`DbarError::InvalidArgument`] for `s ≤ 0`.
    ///
    /// # Examples
    ///
    /// ```
    /// use dbar_core::geometry::make_disk;
    /// use num_complex::Complex;
    ///
    /// let d = make_disk(Complex::new(0.0_f64, 0.0), 1.0).unwrap();
    /// let arcs = d.chord_arcs(Complex::new(0.8, 0.0), 0.5).unwrap();
    /// assert_eq!(arcs.len(), 1);
    /// assert!((arcs[0].0 - 1.432861).abs() < 1e-5);
    /// assert!((arcs[0].1 - 4.850324).abs() < 1e-5);
    /// ```
    pub fn chord_arcs(&self, z: Complex<T>, s: T) -> Result<Vec<(T, T)>> {
        if !(s > T::zero()) {
            return Err(DbarError::InvalidArgument(format!(
                "chord radius must be positive, got {s}"
            )));
        }
        match &self.kind {
            DomainKind::Disk { center, radius } => Ok(disk_arcs(*center, *radius, z, s)),
            _ => Err(DbarError::UnsupportedKind(
                "chord_arcs is defined for disk domains only".into(),
            )),
        }
    }

    /// Angular inside-intervals of the circle `z + s·e^{iθ}` for any
    /// domain kind: exact for disks, level-set bisection for ellipses and
    /// perturbed disks, membership bisection for generic curves.
    pub(crate) fn angular_arcs(&self, z: Complex<T>, s: T) -> Vec<(T, T)> {
        match &self.kind {
            DomainKind::Disk { center, radius } => disk_arcs(*center, *radius, z, s),
            _ => self.scan_arcs(z, s),
        }
    }

    /// Continuous inside-level function: positive inside, negative
    /// outside, zero on the boundary. Used for root bracketing when
    /// clipping circles; only its sign is meaningful.
    fn inside_level(&self, w: Complex<T>) -> T {
        match &self.kind {
            DomainKind::Disk { center, radius } => *radius - (w - *center).norm(),
            DomainKind::Ellipse { semi_a, semi_b } => {
                let x = w.re / *semi_a;
                let y = w.im / *semi_b;
                T::one() - x * x - y * y
            }
            DomainKind::PerturbedDisk { delta, mode } => {
                let theta = w.im.atan2(w.re);
                T::one() + *delta * (T::of(*mode as f64) * theta).cos() - w.norm()
            }
            DomainKind::Generic => {
                if self.winding_number(w) == 1 {
                    T::one()
                } else {
                    -T::one()
                }
            }
        }
    }

    fn scan_arcs(&self, z: Complex<T>, s: T) -> Vec<(T, T)> {
        let two_pi = T::PI() + T::PI();
        let m = ARC_SCAN_SAMPLES;
        let step = two_pi / T::of(m as f64);
        let mut inside = Vec::with_capacity(m);
        for j in 0..m {
            let t = step * T::of(j as f64);
            inside.push(self.inside_level(z + cis(t) * s) > T::zero());
        }
        if inside.iter().all(|&b| b) {
            return vec![(T::zero(), two_pi)];
        }
        if !inside.iter().any(|&b| b) {
            return Vec::new();
        }
        // Bisect each inside/outside transition to machine precision.
        let mut starts = Vec::new();
        let mut ends = Vec::new();
        for j in 0..m {
            let a = inside[j];
            let b = inside[(j + 1) % m];
            if a == b {
                continue;
            }
            let mut lo = step * T::of(j as f64);
            let mut hi = lo + step;
            for _ in 0..60 {
                let mid = (lo + hi) * T::of(0.5);
                let mid_inside = self.inside_level(z + cis(mid) * s) > T::zero();
                if mid_inside == a {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = (lo + hi) * T::of(0.5);
            if a {
                ends.push(t);
            } else {
                starts.push(t);
            }
        }
        let mut arcs = Vec::with_capacity(starts.len());
        for &st in &starts {
            let mut en = T::infinity();
            for &e in &ends {
                if e > st && e < en {
                    en = e;
                }
            }
            if en.is_infinite() {
                // The matching end wraps past 2π.
                let first = ends
                    .iter()
                    .copied()
                    .fold(T::infinity(), |acc, e| acc.min(e));
                en = first + two_pi;
            }
            arcs.push((st, en));
        }
        arcs
    }

    /// Dense scan + golden-section polish of `min_t |position(t) - z|`.
    fn scan_min_radius(&self, z: Complex<T>) -> T {
        self.scan_radius(z, false)
    }

    /// Dense scan + golden-section polish of `max_t |position(t) - z|`.
    fn scan_max_radius(&self, z: Complex<T>) -> T {
        self.scan_radius(z, true)
    }

    fn scan_radius(&self, z: Complex<T>, maximize: bool) -> T {
        let two_pi = T::PI() + T::PI();
        let n = SCAN_SAMPLES;
        let step = two_pi / T::of(n as f64);
        let r = |t: T| (self.boundary.position(t) - z).norm();
        let mut best_t = T::zero();
        let mut best = r(T::zero());
        for j in 1..n {
            let t = step * T::of(j as f64);
            let v = r(t);
            if (maximize && v > best) || (!maximize && v < best) {
                best = v;
                best_t = t;
            }
        }
        golden_section(&r, best_t - step, best_t + step, maximize)
    }

    /// All local extrema of `t ↦ |position(t) - z|`, refined and sorted.
    fn scan_radius_extrema(&self, z: Complex<T>) -> Vec<T> {
        let two_pi = T::PI() + T::PI();
        let n = SCAN_SAMPLES;
        let step = two_pi / T::of(n as f64);
        let r = |t: T| (self.boundary.position(t) - z).norm();
        let mut values = Vec::with_capacity(n);
        for j in 0..n {
            values.push(r(step * T::of(j as f64)));
        }
        let mut radii = Vec::new();
        for j in 0..n {
            let prev = values[(j + n - 1) % n];
            let here = values[j];
            let next = values[(j + 1) % n];
            let t = step * T::of(j as f64);
            if here <= prev && here <= next {
                radii.push(golden_section(&r, t - step, t + step, false));
            } else if here >= prev && here >= next {
                radii.push(golden_section(&r, t - step, t + step, true));
            }
        }
        radii.sort_by(|a, b| a.partial_cmp(b).expect("radii are finite"));
        radii.dedup_by(|a, b| (*a - *b).abs() < T::of(1e-12));
        radii
    }

    /// Diameter by a dense boundary pair scan (non-disk, non-ellipse
    /// kinds). Accuracy ~(2π/256)² relative, which is ample for a
    /// metadata field used only in validity checks and mesh scaling.
    fn scan_diameter(&self) -> T {
        let two_pi = T::PI() + T::PI();
        let n = 256;
        let step = two_pi / T::of(n as f64);
        let pts: Vec<Complex<T>> = (0..n)
            .map(|j| self.boundary.position(step * T::of(j as f64)))
            .collect();
        let mut best = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max((pts[i] - pts[j]).norm());
            }
        }
        best
    }
}

/// Law-of-cosines chord arcs for the disk `|w - center| < radius`.
///
/// With `d = |z - center|` and `base = arg(z - center)`, the point
/// `z + s·e^{iθ}` is interior iff `cos(θ - base) < (R² - s² - d²)/(2sd)`,
/// giving the single arc `(base + q, base + 2π - q)` with
/// `q = arccos` of the clamped right-hand side.
fn disk_arcs<T: Real>(center: Complex<T>, radius: T, z: Complex<T>, s: T) -> Vec<(T, T)> {
    let two_pi = T::PI() + T::PI();
    let offset = z - center;
    let d = offset.norm();
    if d < T::of(1e-15) * radius.max(T::one()) {
        return if s < radius {
            vec![(T::zero(), two_pi)]
        } else {
            Vec::new()
        };
    }
    if s >= radius + d {
        return Vec::new();
    }
    if s <= radius - d {
        return vec![(T::zero(), two_pi)];
    }
    let cos_q = (radius * radius - s * s - d * d) / ((s + s) * d);
    if cos_q >= T::one() {
        return vec![(T::zero(), two_pi)];
    }
    if cos_q <= -T::one() {
        return Vec::new();
    }
    let q = cos_q.acos();
    let base = offset.im.atan2(offset.re);
    vec![(base + q, base + two_pi - q)]
}

/// Golden-section optimization of a unimodal bracket.
fn golden_section<T: Real>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T, maximize: bool) -> T {
    let inv_phi = T::of(0.618_033_988_749_894_9);
    let mut x1 = hi - (hi - lo) * inv_phi;
    let mut x2 = lo + (hi - lo) * inv_phi;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..90 {
        let keep_low = if maximize { f1 > f2 } else { f1 < f2 };
        if keep_low {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * inv_phi;
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * inv_phi;
            f2 = f(x2);
        }
    }
    let mid = (lo + hi) * T::of(0.5);
    f(mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn disk_membership_matches_definition() {
        let d = make_disk(c(0.0, 0.0), 0.5).unwrap();
        assert!(d.contains(c(0.4, 0.0)));
        assert!(d.contains(c(0.3, 0.3))); // |z| ≈ 0.424 < 0.5
        assert!(!d.contains(c(0.6, 0.0)));
        assert!(!d.contains(c(0.5, 0.0))); // boundary is not interior
    }

    #[test]
    fn disk_rejects_degenerate_radius() {
        let err = make_disk(c(1.0, 1.0), 0.0).unwrap_err();
        assert_eq!(err.category(), "invalid-argument");
    }

    #[test]
    fn disk_distance_is_signed_and_exact() {
        let d = make_disk(c(0.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(d.boundary_distance(c(0.25, 0.0)), 0.75);
        assert_relative_eq!(d.boundary_distance(c(0.0, 0.0)), 1.0);
        assert_relative_eq!(d.boundary_distance(c(2.0, 0.0)), -1.0);
        let half = make_disk(c(0.0, 0.0), 0.5).unwrap();
        assert_relative_eq!(half.boundary_distance(c(0.5, 0.0)), 0.0);
    }

    #[test]
    fn ellipse_membership_and_distance() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        assert!(e.contains(c(1.5, 0.0)));
        assert!(e.contains(c(1.9, 0.0)));
        assert!(!e.contains(c(0.0, 1.1)));
        // Nearest boundary point to the center is (0, ±1).
        assert_relative_eq!(e.boundary_distance(c(0.0, 0.0)), 1.0, epsilon = 1e-10);
        assert!(e.boundary_distance(c(3.0, 0.0)) < 0.0);
    }

    #[test]
    fn ellipse_rejects_misordered_axes() {
        assert!(make_ellipse(1.0, 2.0).is_err());
        assert!(make_ellipse(2.0, 0.0).is_err());
        // The circle case is a legal ellipse.
        assert!(make_ellipse(1.0, 1.0).is_ok());
    }

    #[test]
    fn perturbed_disk_limits() {
        // delta = 0 reduces to the unit disk.
        let flat = make_perturbed_disk(0.0, 3).unwrap();
        assert!(flat.contains(c(0.99, 0.0)));
        assert!(!flat.contains(c(1.01, 0.0)));

        let wavy = make_perturbed_disk(0.1, 3).unwrap();
        assert!(wavy.contains(c(0.0, 0.0)));
        assert_eq!(wavy.winding_number(c(0.0, 0.0)), 1);
        // r(0) = 1.1 on the bump, r(π/3) = 0.9 in the dip.
        assert!(wavy.contains(c(1.05, 0.0)));
        let dip_point = cis(std::f64::consts::FRAC_PI_3) * 0.95;
        assert!(!wavy.contains(dip_point));

        assert!(make_perturbed_disk(0.5, 3).is_err());
        assert!(make_perturbed_disk(-0.1, 3).is_err());
    }

    #[test]
    fn generic_kind_uses_winding_membership() {
        // Wrap the ellipse parametrization as a generic curve.
        let curve = BoundaryCurve::new(
            |t: f64| Complex::new(2.0 * t.cos(), t.sin()),
            |t: f64| Complex::new(-2.0 * t.sin(), t.cos()),
            1.0,
        )
        .unwrap();
        let g = make_generic(curve, c(0.0, 0.0)).unwrap();
        assert!(g.contains(c(1.5, 0.0)));
        assert!(!g.contains(c(0.0, 1.1)));
    }

    #[test]
    fn orientation_validation_rejects_clockwise_curves() {
        let curve = BoundaryCurve::new(
            |t: f64| Complex::new(t.cos(), -t.sin()),
            |t: f64| Complex::new(-t.sin(), -t.cos()),
            1.0,
        )
        .unwrap();
        let err = make_generic(curve, c(0.0, 0.0)).unwrap_err();
        assert_eq!(err.category(), "invalid-argument");
    }

    #[test]
    fn chord_arcs_concentric_and_empty_cases() {
        let d = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let full = d.chord_arcs(c(0.0, 0.0), 0.5).unwrap();
        assert_eq!(full.len(), 1);
        assert_relative_eq!(full[0].1 - full[0].0, 2.0 * std::f64::consts::PI);
        assert!(d.chord_arcs(c(0.8, 0.0), 2.0).unwrap().is_empty());
    }

    #[test]
    fn chord_arcs_law_of_cosines_fixture() {
        // cos θ* = (1 - 0.25 - 0.64)/(2·0.5·0.8) = 0.1375.
        let d = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let arcs = d.chord_arcs(c(0.8, 0.0), 0.5).unwrap();
        assert_eq!(arcs.len(), 1);
        let q = 0.1375_f64.acos();
        assert_relative_eq!(arcs[0].0, q, epsilon = 1e-12);
        assert_relative_eq!(arcs[0].1, 2.0 * std::f64::consts::PI - q, epsilon = 1e-12);
    }

    #[test]
    fn chord_arcs_rejects_non_disk_kinds() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let err = e.chord_arcs(c(0.0, 0.0), 0.5).unwrap_err();
        assert_eq!(err.category(), "unsupported-kind");
    }

    #[test]
    fn chord_arcs_measure_reproduces_lens_area() {
        // ∫ arc-measure(s)·s ds over [0, R+d] equals the area of
        // disk(z, s_max) ∩ domain = the full domain area here.
        let d = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let z = c(0.4, 0.2);
        let smax = d.max_boundary_radius(z);
        let n = 20_000;
        let mut area = 0.0;
        for j in 0..n {
            let s = smax * (j as f64 + 0.5) / n as f64;
            let measure: f64 = d
                .chord_arcs(z, s)
                .unwrap()
                .iter()
                .map(|&(t1, t2)| t2 - t1)
                .sum();
            area += measure * s * (smax / n as f64);
        }
        assert_relative_eq!(area, std::f64::consts::PI, epsilon = 1e-6);
    }

    #[test]
    fn angular_arcs_agree_with_membership_on_ellipse() {
        let e = make_ellipse(2.0, 1.0).unwrap();
        let z = c(0.5, 0.3);
        for &s in &[0.4, 0.9, 1.7, 2.4] {
            let arcs = e.angular_arcs(z, s);
            // Sample densely and compare the indicator with arc membership.
            for j in 0..4096 {
                let t = 2.0 * std::f64::consts::PI * j as f64 / 4096.0;
                let inside = e.contains(z + cis(t) * s);
                let in_arc = arcs.iter().any(|&(t1, t2)| {
                    let tt = if t < t1 { t + 2.0 * std::f64::consts::PI } else { t };
                    tt > t1 + 1e-9 && tt < t2 - 1e-9
                });
                if in_arc {
                    assert!(inside, "arc claims inside at t={t}, s={s}");
                }
            }
        }
    }

    #[test]
    fn critical_radii_bracket_disk_transitions() {
        let d = make_disk(c(0.0, 0.0), 1.0).unwrap();
        let crit = d.critical_radii(c(0.6, 0.0));
        assert_relative_eq!(crit[0], 0.4);
        assert_relative_eq!(crit[1], 1.6);
    }

    #[test]
    fn contains_iff_positive_distance_property() {
        // Deterministic low-discrepancy sweep across all kinds.
        let domains: Vec<PlanarDomain<f64>> = vec![
            make_disk(c(0.0, 0.0), 0.5).unwrap(),
            make_disk(c(1.0, 1.0), 2.0).unwrap(),
            make_ellipse(2.0, 1.0).unwrap(),
            make_perturbed_disk(0.1, 3).unwrap(),
        ];
        for dom in &domains {
            for j in 0..2500usize {
                let u = (0.5 + j as f64 * 0.754_877_666_246_692_7).fract();
                let v = (0.5 + j as f64 * 0.569_840_290_998_053_2).fract();
                let z = c(6.0 * u - 3.0, 6.0 * v - 3.0);
                let dist = dom.boundary_distance(z);
                if dist.abs() > 1e-12 {
                    assert_eq!(
                        dom.contains(z),
                        dist > 0.0,
                        "membership/distance mismatch at {z} (dist {dist})"
                    );
                }
            }
        }
    }

    #[test]
    fn f32_smoke_disk_queries() {
        let d = make_disk(Complex::new(0.0_f32, 0.0), 1.0_f32).unwrap();
        assert!(d.contains(Complex::new(0.5_f32, 0.0)));
        assert!((d.boundary_distance(Complex::new(0.5_f32, 0.0)) - 0.5).abs() < 1e-6);
    }
}
