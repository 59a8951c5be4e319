//! Convergence tables and operator-norm ratio studies.
//!
//! Two instruments live here. [`convergence_table`] re-evaluates one
//! operator at one point across a ladder of quadrature resolutions and
//! reports, per rung, the evaluation cost, the value, the error against
//! the richest rung, and the observed convergence order — the raw
//! material for cost/accuracy plots. [`norm_ratio_study`] estimates the
//! inverse-log norm of a datum and the first-order inverse-log norm of
//! its potential across several sampling depths `k_max`, reporting the
//! seminorm-over-norm ratios whose stability is the *empirical witness*
//! (explicitly not a proof) that the solution operator is bounded
//! between the corresponding spaces.
//!
//! Both instruments are deterministic given their inputs and a seed;
//! tables render to CSV with 17-significant-digit floats so reruns are
//! byte-identical.

use dbar_core::geometry::PlanarDomain;
use dbar_core::logspace::{log_norm, modulus_profile, ModulusProfile};
use dbar_core::operators::{op_2t, op_phi, op_t, Operator};
use dbar_core::quadrature::QuadratureSpec;
use dbar_core::testfields::{field_constant, field_f_nu, field_polynomial, field_u_nu, ScalarField};
use dbar_core::{DbarError, Result};
use num_complex::Complex;

use crate::report::full_precision;

/// Smallest dyadic scale exponent used by the norm study: pairs start
/// at separation `2^-4`, the coarsest scale that keeps every sampled
/// pair inside the half-disk fixtures.
const STUDY_K_MIN: u32 = 4;

/// One rung of a [`convergence_table`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// Number of integrand evaluations the rung spent (cost proxy).
    pub cost: usize,
    /// Operator value at this resolution.
    pub value: Complex<f64>,
    /// `|value - richest value|`; `None` on the richest rung itself.
    pub error_vs_richest: Option<f64>,
    /// Observed order `ln(e_{i-1}/e_i) / ln(cost_i/cost_{i-1})` between
    /// this rung and the previous one; `None` where undefined.
    pub observed_order: Option<f64>,
    /// Convergence flag reported by the quadrature at this rung.
    pub converged: bool,
}

/// Evaluates `operator` at `z` across a resolution ladder.
///
/// Supported operators are [`Operator::T`], [`Operator::TwoT`] (both
/// need `field`) and [`Operator::Phi`] (ignores `field`). Resolutions
/// are typically single-shot specs (`max_refinements = 0`) so that each
/// rung measures a fixed mesh; the per-rung `converged` flag then
/// honestly reports `false` and the table's error column carries the
/// actual study.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when fewer than three
/// resolutions are supplied, when a needed `field` is missing, or when
/// the measured costs fail to increase strictly (the ladder must be
/// monotone in cost); [`DbarError::UnsupportedKind`] for operators
/// without a single-point evaluation; and any evaluation error from the
/// operator itself.
pub fn convergence_table(
    domain: &PlanarDomain<f64>,
    operator: Operator,
    field: Option<&ScalarField<f64>>,
    z: Complex<f64>,
    resolutions: &[QuadratureSpec<f64>],
) -> Result<Vec<ConvergenceRow>> {
    if resolutions.len() < 3 {
        return Err(DbarError::InvalidArgument(format!(
            "a convergence table needs at least 3 resolutions, got {}",
            resolutions.len()
        )));
    }
    let need_field = || {
        field.ok_or_else(|| {
            DbarError::InvalidArgument(format!(
                "operator {operator:?} needs a field for a convergence table"
            ))
        })
    };
    let mut evals = Vec::with_capacity(resolutions.len());
    for spec in resolutions {
        let ev = match operator {
            Operator::T => op_t(domain, need_field()?, z, spec)?,
            Operator::TwoT => op_2t(domain, need_field()?, z, spec)?,
            Operator::Phi => op_phi(domain, z, spec)?,
            other => {
                return Err(DbarError::UnsupportedKind(format!(
                    "no single-point convergence study for operator {other:?}"
                )))
            }
        };
        evals.push(ev);
    }
    for pair in evals.windows(2) {
        if pair[1].quadrature.evaluations <= pair[0].quadrature.evaluations {
            return Err(DbarError::InvalidArgument(
                "resolutions must be strictly monotone in evaluation cost".into(),
            ));
        }
    }
    let richest = evals.last().expect("at least three rungs").value;
    let n = evals.len();
    let errors: Vec<Option<f64>> = evals
        .iter()
        .enumerate()
        .map(|(i, ev)| (i + 1 < n).then(|| (ev.value - richest).norm()))
        .collect();
    let rows = evals
        .iter()
        .enumerate()
        .map(|(i, ev)| {
            let observed_order = if i == 0 {
                None
            } else {
                match (errors[i - 1], errors[i]) {
                    (Some(prev), Some(cur)) if prev > 0.0 && cur > 0.0 => {
                        let cost_ratio = ev.quadrature.evaluations as f64
                            / evals[i - 1].quadrature.evaluations as f64;
                        Some((prev / cur).ln() / cost_ratio.ln())
                    }
                    _ => None,
                }
            };
            ConvergenceRow {
                cost: ev.quadrature.evaluations,
                value: ev.value,
                error_vs_richest: errors[i],
                observed_order,
                converged: ev.quadrature.converged,
            }
        })
        .collect();
    Ok(rows)
}

/// Renders a convergence table as CSV (header included, empty cells
/// for undefined entries, 17 significant digits).
///
/// # Examples
///
/// ```
/// use dbar_verify::{convergence_csv, ConvergenceRow};
/// use num_complex::Complex;
///
/// let richest = ConvergenceRow {
///     cost: 96,
///     value: Complex::new(1.0 / 3.0, 0.0),
///     error_vs_richest: None,
///     observed_order: None,
///     converged: true,
/// };
/// let csv = convergence_csv(&[richest]);
/// let mut lines = csv.lines();
/// assert_eq!(
///     lines.next(),
///     Some("cost,value_re,value_im,error_vs_richest,observed_order,converged"),
/// );
/// assert_eq!(lines.next(), Some("96,3.3333333333333331e-1,0.0000000000000000e0,,,true"));
/// ```
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("cost,value_re,value_im,error_vs_richest,observed_order,converged\n");
    for r in rows {
        let err = r.error_vs_richest.map(full_precision).unwrap_or_default();
        let ord = r.observed_order.map(full_precision).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.cost,
            full_precision(r.value.re),
            full_precision(r.value.im),
            err,
            ord,
            r.converged
        ));
    }
    out
}

/// One row of a [`norm_ratio_study`].
#[derive(Clone, Debug, PartialEq)]
pub struct NormRatioRow {
    /// Inverse-log order of the datum's space.
    pub nu: f64,
    /// Label of the datum/potential pair.
    pub field: String,
    /// Deepest dyadic scale `2^-k_max` entering the estimates.
    pub k_max: u32,
    /// Sampled norm estimate of the datum at order `nu`.
    pub input_norm: f64,
    /// Sampled first-order norm estimate of the potential at order
    /// `nu - 1` (sup of the potential plus both derivative norms).
    pub output_norm: f64,
    /// Derivative-seminorm sum of the potential divided by the input
    /// norm — the quantity whose stability across `k_max` is the
    /// boundedness witness. Identically `0` for constant data, whose
    /// potential has constant derivatives.
    pub ratio: f64,
}

/// A datum/potential pair with closed-form derivatives, plus the
/// profiles sampled once at the deepest `k_max` (truncated later).
struct StudyPair {
    label: String,
    f_profile: ModulusProfile<f64>,
    u_sup: f64,
    dz_profile: ModulusProfile<f64>,
    dzbar_profile: ModulusProfile<f64>,
}

/// Keeps the first `keep` scales of a profile. The recorded `sup_norm`
/// stays that of the full sample — the sup is a scale-independent
/// quantity and reusing it keeps every truncation on the same footing.
fn truncate(p: &ModulusProfile<f64>, keep: usize) -> ModulusProfile<f64> {
    ModulusProfile::from_parts(
        p.scales[..keep].to_vec(),
        p.omega[..keep].to_vec(),
        p.pair_count[..keep].to_vec(),
        p.sup_norm,
    )
    .expect("a prefix of a valid profile is a valid profile")
}

/// Wraps a field's closed-form derivative as a standalone field so it
/// can be profiled; the singular location is inherited so the profile
/// keeps its deterministic segment pairs.
fn derivative_field(u: &ScalarField<f64>, dz: bool) -> ScalarField<f64> {
    let inner = u.clone();
    let label = format!("{}_{}", u.label, if dz { "dz" } else { "dzbar" });
    let mut g = ScalarField::new(label, move |z| {
        if dz {
            inner.derivative_dz(z)
        } else {
            inner.derivative_dzbar(z)
        }
    });
    g.declared_singularity = u.declared_singularity;
    g
}

fn study_pair(
    domain: &PlanarDomain<f64>,
    label: &str,
    f: &ScalarField<f64>,
    u: &ScalarField<f64>,
    k_max_deep: u32,
    pairs_per_scale: usize,
    seed: u64,
) -> Result<StudyPair> {
    let f_profile = modulus_profile(domain, f, STUDY_K_MIN, k_max_deep, pairs_per_scale, seed)?;
    let u_profile = modulus_profile(domain, u, STUDY_K_MIN, k_max_deep, pairs_per_scale, seed)?;
    let dz_profile = modulus_profile(
        domain,
        &derivative_field(u, true),
        STUDY_K_MIN,
        k_max_deep,
        pairs_per_scale,
        seed,
    )?;
    let dzbar_profile = modulus_profile(
        domain,
        &derivative_field(u, false),
        STUDY_K_MIN,
        k_max_deep,
        pairs_per_scale,
        seed,
    )?;
    Ok(StudyPair {
        label: label.to_string(),
        f_profile,
        u_sup: u_profile.sup_norm,
        dz_profile,
        dzbar_profile,
    })
}

/// Boundedness-witness study: sampled norm ratios of potential against
/// datum across several dyadic sampling depths.
///
/// For each order `nu` three datum/potential pairs are studied on
/// `domain`: the log-singular model pair, a polynomial pair, and a
/// constant pair (whose ratio is exactly zero — the potential of a
/// constant has constant derivatives). All profiles are sampled once
/// at the deepest requested `k_max` and truncated to the shallower
/// windows, so rows for different `k_max` differ only by how many
/// scales enter the estimates.
///
/// The ratio column divides the potential's derivative-seminorm sum at
/// order `nu - 1` by the datum's full norm at order `nu`. Stability of
/// that ratio across `k_max` is an empirical witness of operator
/// boundedness, explicitly *not* a proof: the sampled seminorms are
/// lower estimates from finitely many pairs.
///
/// # Errors
///
/// Returns [`DbarError::Rejected`] when any `nu` is at or below 1 (the
/// potential's gradient need not be bounded there), and
/// [`DbarError::InvalidArgument`] for an empty or non-increasing
/// `k_maxes` list, a `k_max` too shallow to fit four scales, or an
/// undersized pair budget. Sampling errors from the profile machinery
/// propagate.
pub fn norm_ratio_study(
    domain: &PlanarDomain<f64>,
    nu_values: &[f64],
    k_maxes: &[u32],
    pairs_per_scale: usize,
    seed: u64,
) -> Result<Vec<NormRatioRow>> {
    for &nu in nu_values {
        if !(nu > 1.0) {
            return Err(DbarError::Rejected(format!(
                "norm ratios are studied for orders above 1, got nu = {nu}; at or below \
                 that order the potential's derivative seminorm is not finite"
            )));
        }
    }
    if nu_values.is_empty() || k_maxes.is_empty() {
        return Err(DbarError::InvalidArgument(
            "the study needs at least one order and one k_max".into(),
        ));
    }
    for pair in k_maxes.windows(2) {
        if pair[1] <= pair[0] {
            return Err(DbarError::InvalidArgument(
                "k_maxes must be strictly increasing".into(),
            ));
        }
    }
    if k_maxes[0] < STUDY_K_MIN + 3 {
        return Err(DbarError::InvalidArgument(format!(
            "k_max must be at least {} so four scales enter each estimate",
            STUDY_K_MIN + 3
        )));
    }
    let deep = *k_maxes.last().expect("k_maxes is non-empty");

    // Polynomial pair: u = z·z̄² has ∂̄u = 2·z·z̄ and ∂u = z̄², all entire.
    let one = Complex::new(1.0, 0.0);
    let poly_u = field_polynomial(&[(one, 1, 2)]);
    let poly_f = field_polynomial(&[(one + one, 1, 1)]);
    // Constant pair: u = c·z̄ solves ∂̄u = c with constant derivatives.
    let const_f = field_constant(one);
    let const_u = field_polynomial(&[(one, 0, 1)]);
    let shared = [
        study_pair(domain, "polynomial", &poly_f, &poly_u, deep, pairs_per_scale, seed)?,
        study_pair(domain, "constant", &const_f, &const_u, deep, pairs_per_scale, seed)?,
    ];

    let mut rows = Vec::new();
    for &nu in nu_values {
        let f = field_f_nu(nu);
        let u = field_u_nu(nu);
        let model = study_pair(
            domain,
            &format!("f_nu({nu})"),
            &f,
            &u,
            deep,
            pairs_per_scale,
            seed,
        )?;
        for pair in std::iter::once(&model).chain(shared.iter()) {
            for &k_max in k_maxes {
                let keep = (k_max - STUDY_K_MIN + 1) as usize;
                let f_prof = truncate(&pair.f_profile, keep);
                let dz_prof = truncate(&pair.dz_profile, keep);
                let dzbar_prof = truncate(&pair.dzbar_profile, keep);
                let input_norm = log_norm(&f_prof, nu)?;
                let dz_norm = log_norm(&dz_prof, nu - 1.0)?;
                let dzbar_norm = log_norm(&dzbar_prof, nu - 1.0)?;
                let seminorms =
                    (dz_norm - dz_prof.sup_norm) + (dzbar_norm - dzbar_prof.sup_norm);
                rows.push(NormRatioRow {
                    nu,
                    field: pair.label.clone(),
                    k_max,
                    input_norm,
                    output_norm: pair.u_sup + dz_norm + dzbar_norm,
                    ratio: seminorms / input_norm,
                });
            }
        }
    }
    Ok(rows)
}

/// Renders a norm-ratio study as CSV (header included, 17 significant
/// digits).
pub fn norm_ratio_csv(rows: &[NormRatioRow]) -> String {
    let mut out = String::from("nu,field,k_max,input_norm,output_norm,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            full_precision(r.nu),
            crate::report::csv_quote(&r.field),
            r.k_max,
            full_precision(r.input_norm),
            full_precision(r.output_norm),
            full_precision(r.ratio)
        ));
    }
    out
}
