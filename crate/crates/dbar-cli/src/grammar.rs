//! Flag grammar: compact textual specs for domains, fields, points,
//! grids, and quadrature overrides.
//!
//! Every command-line value that names a mathematical object uses a
//! `kind:params` shape with comma-separated numeric parameters:
//!
//! | Spec | Meaning |
//! |------|---------|
//! | `disk:r` | disk centered at the origin with radius `r` |
//! | `disk:c,r` | disk centered at `(c, 0)` with radius `r` |
//! | `disk:cx,cy,r` | disk centered at `(cx, cy)` with radius `r` |
//! | `ellipse:a,b` | axis-aligned ellipse with semi-axes `a ≥ b` |
//! | `perturbed:delta,mode` | polar graph `1 + delta·cos(mode·θ)` |
//! | `f_nu:NU` | inverse-log model field of order `NU` |
//! | `u_nu:NU` | inverse-log model potential of order `NU` |
//! | `const:re[,im]` | constant field |
//! | `poly:re,im,p,q[;…]` | polynomial `Σ cᵢ z^pᵢ z̄^qᵢ` |
//! | `re[,im]` | a point in the plane |
//! | `NxM` or `N` | grid dimensions |
//! | `key=value,…` | quadrature overrides |
//!
//! Config files carry the same strings, except that `domain` may also be
//! a structured object `{"kind": "disk"|"ellipse"|"perturbed_disk", …}`
//! and `quad` may be a partial object with the fields of
//! [`QuadOverrides`]. All parse failures are
//! [`DbarError::InvalidArgument`], which the binary maps to the usage
//! exit code.

use dbar_core::error::{DbarError, Result};
use dbar_core::geometry::{make_disk, make_ellipse, make_perturbed_disk, PlanarDomain};
use dbar_core::quadrature::QuadratureSpec;
use dbar_core::testfields::{
    field_constant, field_f_nu, field_polynomial, field_u_nu, ScalarField,
};
use num_complex::Complex;
use serde::Deserialize;

/// Parses one float, naming the offending token on failure.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when `token` is not a finite
/// decimal number.
fn parse_f64(token: &str, what: &str) -> Result<f64> {
    let x: f64 = token.trim().parse().map_err(|_| {
        DbarError::InvalidArgument(format!("{what}: expected a number, got {token:?}"))
    })?;
    if !x.is_finite() {
        return Err(DbarError::InvalidArgument(format!(
            "{what}: expected a finite number, got {token:?}"
        )));
    }
    Ok(x)
}

/// Parses one unsigned integer, naming the offending token on failure.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when `token` is not a
/// non-negative integer.
fn parse_usize(token: &str, what: &str) -> Result<usize> {
    token.trim().parse().map_err(|_| {
        DbarError::InvalidArgument(format!(
            "{what}: expected a non-negative integer, got {token:?}"
        ))
    })
}

/// Splits `spec` into a kind tag and its comma-separated parameters.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when the colon or the kind
/// tag is missing.
fn split_spec<'a>(spec: &'a str, what: &str) -> Result<(&'a str, Vec<&'a str>)> {
    let (kind, params) = spec.split_once(':').ok_or_else(|| {
        DbarError::InvalidArgument(format!(
            "{what}: expected kind:params, got {spec:?}"
        ))
    })?;
    if kind.is_empty() {
        return Err(DbarError::InvalidArgument(format!(
            "{what}: missing kind tag in {spec:?}"
        )));
    }
    Ok((kind.trim(), params.split(',').collect()))
}

/// Structured domain schema accepted in JSON config files.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSchema {
    /// Disk `{ |z - center| < radius }`.
    Disk {
        /// Center as `[re, im]`; defaults to the origin.
        #[serde(default)]
        center: [f64; 2],
        /// Radius, strictly positive.
        radius: f64,
    },
    /// Axis-aligned ellipse with semi-axes `semi_a ≥ semi_b`.
    Ellipse {
        /// Semi-axis along the real direction.
        semi_a: f64,
        /// Semi-axis along the imaginary direction.
        semi_b: f64,
    },
    /// Perturbed disk with polar radius `1 + delta·cos(mode·θ)`.
    PerturbedDisk {
        /// Perturbation amplitude.
        delta: f64,
        /// Angular mode of the perturbation.
        mode: u32,
    },
}

/// Domain value in a config file: either the flag grammar string or the
/// structured schema.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DomainValue {
    /// Flag-grammar string such as `"disk:0,0.5"`.
    Text(String),
    /// Structured object such as `{"kind": "ellipse", "semi_a": 2, "semi_b": 1}`.
    Schema(DomainSchema),
}

/// Builds the domain a config value describes.
///
/// # Errors
///
/// Propagates grammar errors from [`parse_domain`] and constructor
/// errors from the geometry module.
pub fn build_domain(value: &DomainValue) -> Result<PlanarDomain<f64>> {
    match value {
        DomainValue::Text(s) => parse_domain(s),
        DomainValue::Schema(DomainSchema::Disk { center, radius }) => {
            make_disk(Complex::new(center[0], center[1]), *radius)
        }
        DomainValue::Schema(DomainSchema::Ellipse { semi_a, semi_b }) => {
            make_ellipse(*semi_a, *semi_b)
        }
        DomainValue::Schema(DomainSchema::PerturbedDisk { delta, mode }) => {
            make_perturbed_disk(*delta, *mode)
        }
    }
}

/// Parses a domain spec in the flag grammar.
///
/// Accepted shapes: `disk:r`, `disk:c,r` (real center), `disk:cx,cy,r`,
/// `ellipse:a,b`, and `perturbed:delta,mode`.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] for an unknown kind or a wrong
/// parameter count, and propagates geometry constructor errors (e.g. a
/// non-positive radius).
pub fn parse_domain(spec: &str) -> Result<PlanarDomain<f64>> {
    let (kind, params) = split_spec(spec, "domain")?;
    match kind {
        "disk" => match params.as_slice() {
            [r] => make_disk(Complex::new(0.0, 0.0), parse_f64(r, "disk radius")?),
            [c, r] => make_disk(
                Complex::new(parse_f64(c, "disk center")?, 0.0),
                parse_f64(r, "disk radius")?,
            ),
            [cx, cy, r] => make_disk(
                Complex::new(parse_f64(cx, "disk center")?, parse_f64(cy, "disk center")?),
                parse_f64(r, "disk radius")?,
            ),
            _ => Err(DbarError::InvalidArgument(format!(
                "domain: disk takes 1-3 parameters (r | c,r | cx,cy,r), got {spec:?}"
            ))),
        },
        "ellipse" => match params.as_slice() {
            [a, b] => make_ellipse(parse_f64(a, "ellipse semi-axis")?, parse_f64(b, "ellipse semi-axis")?),
            _ => Err(DbarError::InvalidArgument(format!(
                "domain: ellipse takes 2 parameters (a,b), got {spec:?}"
            ))),
        },
        "perturbed" => match params.as_slice() {
            [delta, mode] => {
                let m = parse_usize(mode, "perturbation mode")?;
                let m = u32::try_from(m).map_err(|_| {
                    DbarError::InvalidArgument(format!("perturbation mode too large: {m}"))
                })?;
                make_perturbed_disk(parse_f64(delta, "perturbation amplitude")?, m)
            }
            _ => Err(DbarError::InvalidArgument(format!(
                "domain: perturbed takes 2 parameters (delta,mode), got {spec:?}"
            ))),
        },
        other => Err(DbarError::InvalidArgument(format!(
            "domain: unknown kind {other:?} (expected disk, ellipse, or perturbed)"
        ))),
    }
}

/// Parses a scalar-field spec in the flag grammar.
///
/// Accepted shapes: `f_nu:NU`, `u_nu:NU`, `const:re[,im]`, and
/// `poly:re,im,p,q[;re,im,p,q…]` for `Σ (re+i·im)·z^p·z̄^q`.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] for an unknown kind or a wrong
/// parameter count.
pub fn parse_field(spec: &str) -> Result<ScalarField<f64>> {
    let (kind, params) = split_spec(spec, "field")?;
    match kind {
        "f_nu" => match params.as_slice() {
            [nu] => Ok(field_f_nu(parse_f64(nu, "field order")?)),
            _ => Err(DbarError::InvalidArgument(format!(
                "field: f_nu takes 1 parameter (the order), got {spec:?}"
            ))),
        },
        "u_nu" => match params.as_slice() {
            [nu] => Ok(field_u_nu(parse_f64(nu, "field order")?)),
            _ => Err(DbarError::InvalidArgument(format!(
                "field: u_nu takes 1 parameter (the order), got {spec:?}"
            ))),
        },
        "const" => match params.as_slice() {
            [re] => Ok(field_constant(Complex::new(parse_f64(re, "constant")?, 0.0))),
            [re, im] => Ok(field_constant(Complex::new(
                parse_f64(re, "constant")?,
                parse_f64(im, "constant")?,
            ))),
            _ => Err(DbarError::InvalidArgument(format!(
                "field: const takes 1-2 parameters (re[,im]), got {spec:?}"
            ))),
        },
        "poly" => {
            let joined = params.join(",");
            let mut terms = Vec::new();
            for term in joined.split(';') {
                let parts: Vec<&str> = term.split(',').collect();
                let [re, im, p, q] = parts.as_slice() else {
                    return Err(DbarError::InvalidArgument(format!(
                        "field: each poly term takes 4 parameters (re,im,p,q), got {term:?}"
                    )));
                };
                let p = u32::try_from(parse_usize(p, "poly power")?).map_err(|_| {
                    DbarError::InvalidArgument(format!("poly power too large in {term:?}"))
                })?;
                let q = u32::try_from(parse_usize(q, "poly power")?).map_err(|_| {
                    DbarError::InvalidArgument(format!("poly power too large in {term:?}"))
                })?;
                terms.push((
                    Complex::new(parse_f64(re, "poly coefficient")?, parse_f64(im, "poly coefficient")?),
                    p,
                    q,
                ));
            }
            Ok(field_polynomial(&terms))
        }
        other => Err(DbarError::InvalidArgument(format!(
            "field: unknown kind {other:?} (expected f_nu, u_nu, const, or poly)"
        ))),
    }
}

/// Parses a point `re[,im]`; a single number is a point on the real axis.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] for a wrong component count or
/// non-numeric components.
pub fn parse_point(spec: &str) -> Result<Complex<f64>> {
    let parts: Vec<&str> = spec.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex::new(parse_f64(re, "point")?, 0.0)),
        [re, im] => Ok(Complex::new(parse_f64(re, "point")?, parse_f64(im, "point")?)),
        _ => Err(DbarError::InvalidArgument(format!(
            "point: expected re[,im], got {spec:?}"
        ))),
    }
}

/// Parses a semicolon-separated list of points.
///
/// # Errors
///
/// As [`parse_point`], plus an error on an empty list.
pub fn parse_points(spec: &str) -> Result<Vec<Complex<f64>>> {
    let pts: Result<Vec<_>> = spec.split(';').map(parse_point).collect();
    let pts = pts?;
    if pts.is_empty() {
        return Err(DbarError::InvalidArgument("points: empty list".into()));
    }
    Ok(pts)
}

/// Parses grid dimensions `NxM`; a single `N` means `NxN`.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when either dimension is
/// missing, zero, or not an integer.
pub fn parse_grid(spec: &str) -> Result<(usize, usize)> {
    let (n, m) = match spec.split_once('x') {
        Some((n, m)) => (parse_usize(n, "grid")?, parse_usize(m, "grid")?),
        None => {
            let n = parse_usize(spec, "grid")?;
            (n, n)
        }
    };
    if n == 0 || m == 0 {
        return Err(DbarError::InvalidArgument(format!(
            "grid: dimensions must be positive, got {spec:?}"
        )));
    }
    Ok((n, m))
}

/// Partial quadrature parameters: only the named keys are overridden.
///
/// Flags use `key=value,…`; config files use a JSON object with the same
/// keys. `epsilon_schedule` is accepted in config files only.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadOverrides {
    /// Trapezoid nodes for boundary integrals.
    pub boundary_nodes: Option<usize>,
    /// Minimum radial cells of the polar mesh.
    pub radial_cells: Option<usize>,
    /// Geometric grading ratio of the radial mesh.
    pub grading: Option<f64>,
    /// Angular trapezoid nodes at refinement level 0.
    pub angular_nodes: Option<usize>,
    /// Inner radius of the polar mesh.
    pub cutoff: Option<f64>,
    /// Relative convergence target.
    pub tol: Option<f64>,
    /// Maximum refinement levels beyond level 0.
    pub max_refinements: Option<usize>,
    /// Shrinking principal-value radii, descending.
    pub epsilon_schedule: Option<Vec<f64>>,
}

impl QuadOverrides {
    /// Applies the overridden keys onto `spec`, then validates the
    /// combined parameters.
    ///
    /// # Errors
    ///
    /// Propagates [`QuadratureSpec::validate`] failures.
    pub fn apply(&self, spec: &mut QuadratureSpec<f64>) -> Result<()> {
        if let Some(v) = self.boundary_nodes {
            spec.boundary_nodes = v;
        }
        if let Some(v) = self.radial_cells {
            spec.radial_cells = v;
        }
        if let Some(v) = self.grading {
            spec.grading = v;
        }
        if let Some(v) = self.angular_nodes {
            spec.angular_nodes = v;
        }
        if let Some(v) = self.cutoff {
            spec.cutoff = v;
        }
        if let Some(v) = self.tol {
            spec.tol = v;
        }
        if let Some(v) = self.max_refinements {
            spec.max_refinements = v;
        }
        if let Some(v) = &self.epsilon_schedule {
            spec.epsilon_schedule = v.clone();
        }
        spec.validate()
    }

    /// Fieldwise precedence merge: keys set on `self` win, the rest fall
    /// back to `lower`.
    pub fn over(self, lower: QuadOverrides) -> QuadOverrides {
        QuadOverrides {
            boundary_nodes: self.boundary_nodes.or(lower.boundary_nodes),
            radial_cells: self.radial_cells.or(lower.radial_cells),
            grading: self.grading.or(lower.grading),
            angular_nodes: self.angular_nodes.or(lower.angular_nodes),
            cutoff: self.cutoff.or(lower.cutoff),
            tol: self.tol.or(lower.tol),
            max_refinements: self.max_refinements.or(lower.max_refinements),
            epsilon_schedule: self.epsilon_schedule.or(lower.epsilon_schedule),
        }
    }
}

/// Parses quadrature overrides in the `key=value,…` flag grammar.
///
/// Recognized keys: `boundary_nodes`, `radial_cells`, `grading`,
/// `angular_nodes`, `cutoff`, `tol`, `max_refinements`.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] for an unknown key, a repeated
/// key, or an unparsable value.
pub fn parse_quad(spec: &str) -> Result<QuadOverrides> {
    let mut over = QuadOverrides::default();
    for pair in spec.split(',') {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            DbarError::InvalidArgument(format!(
                "quad: expected key=value, got {pair:?}"
            ))
        })?;
        let key = key.trim();
        let repeated = match key {
            "boundary_nodes" => over
                .boundary_nodes
                .replace(parse_usize(value, "quad boundary_nodes")?)
                .is_some(),
            "radial_cells" => over
                .radial_cells
                .replace(parse_usize(value, "quad radial_cells")?)
                .is_some(),
            "grading" => over.grading.replace(parse_f64(value, "quad grading")?).is_some(),
            "angular_nodes" => over
                .angular_nodes
                .replace(parse_usize(value, "quad angular_nodes")?)
                .is_some(),
            "cutoff" => over.cutoff.replace(parse_f64(value, "quad cutoff")?).is_some(),
            "tol" => over.tol.replace(parse_f64(value, "quad tol")?).is_some(),
            "max_refinements" => over
                .max_refinements
                .replace(parse_usize(value, "quad max_refinements")?)
                .is_some(),
            other => {
                return Err(DbarError::InvalidArgument(format!(
                    "quad: unknown key {other:?} (expected boundary_nodes, radial_cells, \
                     grading, angular_nodes, cutoff, tol, or max_refinements)"
                )))
            }
        };
        if repeated {
            return Err(DbarError::InvalidArgument(format!(
                "quad: key {key:?} given twice"
            )));
        }
    }
    Ok(over)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dbar_core::geometry::DomainKind;

    #[test]
    fn domain_grammar_covers_all_arities() {
        let d1 = parse_domain("disk:0.5").unwrap();
        let d2 = parse_domain("disk:0,0.5").unwrap();
        let d3 = parse_domain("disk:1,1,2").unwrap();
        for (d, want_c, want_r) in [
            (&d1, Complex::new(0.0, 0.0), 0.5),
            (&d2, Complex::new(0.0, 0.0), 0.5),
            (&d3, Complex::new(1.0, 1.0), 2.0),
        ] {
            match d.kind {
                DomainKind::Disk { center, radius } => {
                    assert_eq!(center, want_c);
                    assert_eq!(radius, want_r);
                }
                _ => panic!("expected a disk"),
            }
        }
        assert!(matches!(
            parse_domain("ellipse:2,1").unwrap().kind,
            DomainKind::Ellipse { .. }
        ));
        assert!(matches!(
            parse_domain("perturbed:0.1,5").unwrap().kind,
            DomainKind::PerturbedDisk { .. }
        ));
        for bad in ["disk", "disk:", "disk:a", "square:1", "ellipse:1", "disk:1,2,3,4"] {
            assert!(parse_domain(bad).is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn structured_domain_schema_round_trips() {
        let v: DomainValue =
            serde_json::from_str(r#"{"kind": "disk", "center": [1.0, 1.0], "radius": 2.0}"#)
                .unwrap();
        match build_domain(&v).unwrap().kind {
            DomainKind::Disk { center, radius } => {
                assert_eq!(center, Complex::new(1.0, 1.0));
                assert_eq!(radius, 2.0);
            }
            _ => panic!("expected a disk"),
        }
        let v: DomainValue = serde_json::from_str(r#""ellipse:2,1""#).unwrap();
        assert!(matches!(
            build_domain(&v).unwrap().kind,
            DomainKind::Ellipse { .. }
        ));
        let v: DomainValue =
            serde_json::from_str(r#"{"kind": "perturbed_disk", "delta": 0.1, "mode": 5}"#)
                .unwrap();
        assert!(matches!(
            build_domain(&v).unwrap().kind,
            DomainKind::PerturbedDisk { .. }
        ));
    }

    #[test]
    fn field_grammar_evaluates_expected_values() {
        let z = Complex::new(0.3, 0.1);
        let f = parse_field("const:2,1").unwrap();
        assert_eq!(f.value(z), Complex::new(2.0, 1.0));
        // z·z̄ + (0+2i)·z²
        let p = parse_field("poly:1,0,1,1;0,2,2,0").unwrap();
        let want = z * z.conj() + Complex::new(0.0, 2.0) * z * z;
        assert!((p.value(z) - want).norm() < 1e-15);
        let f2 = parse_field("f_nu:2").unwrap();
        assert!(f2.value(z).norm() > 0.0);
        assert!(parse_field("f_nu:2,3").is_err());
        assert!(parse_field("poly:1,0,1").is_err());
        assert!(parse_field("gauss:1").is_err());
    }

    #[test]
    fn point_grid_and_quad_grammars_parse() {
        assert_eq!(parse_point("0.5,-1").unwrap(), Complex::new(0.5, -1.0));
        assert_eq!(parse_point("2").unwrap(), Complex::new(2.0, 0.0));
        assert!(parse_point("1,2,3").is_err());
        assert_eq!(parse_points("0,0;1,0").unwrap().len(), 2);
        assert_eq!(parse_grid("9x9").unwrap(), (9, 9));
        assert_eq!(parse_grid("3x5").unwrap(), (3, 5));
        assert_eq!(parse_grid("4").unwrap(), (4, 4));
        assert!(parse_grid("0x3").is_err());
        assert!(parse_grid("3x").is_err());

        let over = parse_quad("tol=1e-4,boundary_nodes=2048").unwrap();
        let mut spec = QuadratureSpec::default();
        over.apply(&mut spec).unwrap();
        assert_eq!(spec.tol, 1e-4);
        assert_eq!(spec.boundary_nodes, 2048);
        assert_eq!(spec.radial_cells, QuadratureSpec::<f64>::default().radial_cells);
        assert!(parse_quad("tol=1e-4,tol=1e-5").is_err());
        assert!(parse_quad("nodes=12").is_err());
        assert!(parse_quad("tol").is_err());
        // Overrides must still satisfy the structural invariants.
        let bad = parse_quad("boundary_nodes=2").unwrap();
        assert!(bad.apply(&mut QuadratureSpec::default()).is_err());
    }

    #[test]
    fn quad_merge_prefers_upper_layer() {
        let flag = parse_quad("tol=1e-4").unwrap();
        let config = parse_quad("tol=1e-2,grading=2").unwrap();
        let merged = flag.over(config);
        assert_eq!(merged.tol, Some(1e-4));
        assert_eq!(merged.grading, Some(2.0));
    }
}
