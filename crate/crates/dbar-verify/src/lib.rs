//! Named verification suites for the dbar workspace.
//!
//! Each [`Suite`] packages one mathematical statement about the
//! Cauchy–Pompeiu transform, its singular derivative operators, or the
//! inverse-log modulus machinery into a runnable check producing a
//! structured [`VerificationReport`]. The suites are:
//!
//! | suite | statement under test |
//! |-------|----------------------|
//! | `phi_disk` | the boundary functional Φ vanishes identically on disks, and equals the axis-ratio constant inside an ellipse |
//! | `pompeiu_dbar` | the area transform solves ∂̄u = f: `T1 = z̄` on disks and `∂̄(Tf) = f` by finite differences |
//! | `h_identity` | the derivative operator agrees with its regularized form minus the boundary correction, across domains, fields, and points |
//! | `disk_specialization` | on disks the correction vanishes, so the direct and regularized routes coincide |
//! | `nw_bound_disk` | the annular residual is uniformly bounded by 8π on the unit disk, and the bound is active |
//! | `nw_bound_general` | on an ellipse the residual is bounded by 8π plus the largest boundary term |
//! | `radial_log_bounds` | the 1-D radial model integrals: the first-power closed form cross-checks against quadrature; the constant-free second-power inequality is tabulated cell by cell |
//! | `twot_divergence` | the regularized operator has a closed-form value at the singular point for order 2 and genuinely diverges at order 1, at the documented iterated-log rate |
//! | `twot_boundedness` | norm-ratio stability witness for boundedness between inverse-log classes (explicitly an empirical witness, not a proof) |
//! | `solve_and_certify` | the end-to-end solver: residual checks, norm report, and cross-grid stability |
//! | `sharpness_examples` | log-order recovery by the mandated modulus estimator, and the radial gradient dichotomy at the critical order |
//! | `loss_optimality` | the one-log loss of the regularized transform is sharp: its profile decays at the lost order and no faster |
//!
//! Reports are deterministic given a [`SuiteConfig`] (which carries the
//! seed); with [`SuiteConfig::canonical`] set, reruns are byte-identical.
//! Any upstream error — a rejected argument, a quadrature that failed
//! to converge, a divergence where none was expected — converts into a
//! failed measurement, never a crash, and a non-converged quadrature
//! can only produce a failed report.

use std::path::PathBuf;
use std::time::Instant;

use dbar_core::quadrature::QuadratureSpec;
use dbar_core::{DbarError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub mod report;
mod suites;
pub mod tables;

pub use report::{Measurement, MeasurementKind, VerificationReport};
pub use tables::{
    convergence_csv, convergence_table, norm_ratio_csv, norm_ratio_study, ConvergenceRow,
    NormRatioRow,
};

/// The verification suites, one per statement under test.
///
/// The discriminant order is the canonical report order: [`run_all`]
/// sorts its output by it regardless of input order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Φ ≡ 0 on disks; the axis-ratio constant on the ellipse.
    PhiDisk,
    /// T solves the ∂̄ problem: conjugation oracle and residual check.
    PompeiuDbar,
    /// Direct singular route equals regularized route minus correction.
    HIdentity,
    /// On disks the two routes coincide outright.
    DiskSpecialization,
    /// Annular residual bound 8π on the unit disk, non-vacuously.
    NwBoundDisk,
    /// Annular residual bound with the boundary-term constant on the ellipse.
    NwBoundGeneral,
    /// 1-D radial model integrals: closed form and inequality table.
    RadialLogBounds,
    /// Closed-form value at order 2; genuine divergence at order 1.
    TwotDivergence,
    /// Norm-ratio stability witness across sampling depths.
    TwotBoundedness,
    /// End-to-end solver certification on small grids.
    SolveAndCertify,
    /// Log-order recovery and the radial gradient dichotomy.
    SharpnessExamples,
    /// Sharpness of the one-log loss for the regularized transform.
    LossOptimality,
}

impl Suite {
    /// Every suite, in canonical report order.
    pub const ALL: [Suite; 12] = [
        Suite::PhiDisk,
        Suite::PompeiuDbar,
        Suite::HIdentity,
        Suite::DiskSpecialization,
        Suite::NwBoundDisk,
        Suite::NwBoundGeneral,
        Suite::RadialLogBounds,
        Suite::TwotDivergence,
        Suite::TwotBoundedness,
        Suite::SolveAndCertify,
        Suite::SharpnessExamples,
        Suite::LossOptimality,
    ];

    /// The stable token used in CLI arguments, report JSON, and file
    /// names.
    ///
    /// # Examples
    ///
    /// ```
    /// use dbar_verify::Suite;
    ///
    /// assert_eq!(Suite::PhiDisk.token(), "phi_disk");
    /// // Tokens round-trip through `FromStr` and `Display`.
    /// let parsed: Suite = "nw_bound_disk".parse().unwrap();
    /// assert_eq!(parsed.to_string(), "nw_bound_disk");
    /// assert!("no_such_suite".parse::<Suite>().is_err());
    /// ```
    pub fn token(self) -> &'static str {
        match self {
            Suite::PhiDisk => "phi_disk",
            Suite::PompeiuDbar => "pompeiu_dbar",
            Suite::HIdentity => "h_identity",
            Suite::DiskSpecialization => "disk_specialization",
            Suite::NwBoundDisk => "nw_bound_disk",
            Suite::NwBoundGeneral => "nw_bound_general",
            Suite::RadialLogBounds => "radial_log_bounds",
            Suite::TwotDivergence => "twot_divergence",
            Suite::TwotBoundedness => "twot_boundedness",
            Suite::SolveAndCertify => "solve_and_certify",
            Suite::SharpnessExamples => "sharpness_examples",
            Suite::LossOptimality => "loss_optimality",
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for Suite {
    type Err = DbarError;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.token() == s)
            .ok_or_else(|| {
                DbarError::InvalidArgument(format!(
                    "unknown suite '{s}'; expected one of: {}",
                    Suite::ALL.map(Suite::token).join(", ")
                ))
            })
    }
}

/// Configuration of one suite run.
///
/// The domains and fields each suite exercises are part of the
/// statement it verifies and are therefore fixed inside the suite; the
/// config carries the knobs that do not change what is being claimed:
/// quadrature resolution, the sampling seed, a global tolerance scale,
/// and output plumbing.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Which suite to run.
    pub suite: Suite,
    /// Quadrature parameters for every operator evaluation inside the
    /// suite. [`SuiteConfig::new`] picks per-suite defaults that keep
    /// at least an order of magnitude of headroom between the
    /// quadrature error and every asserted bound.
    pub quad: QuadratureSpec<f64>,
    /// Seed of the deterministic sampling streams.
    pub seed: u64,
    /// Positive multiplier applied to every asserted tolerance and
    /// bound slack; `1.0` reproduces the documented acceptance bounds.
    pub tol_scale: f64,
    /// When set, `runtime_seconds` is reported as `0.0` so reruns with
    /// the same seed produce byte-identical reports.
    pub canonical: bool,
    /// Directory for CSV artifacts; `None` suppresses artifact output.
    pub artifact_dir: Option<PathBuf>,
}

impl SuiteConfig {
    /// Default configuration for `suite`: seed 0, unit tolerance
    /// scale, no artifacts, real timings.
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            suite,
            quad: default_quad(suite),
            seed: 0,
            tol_scale: 1.0,
            canonical: false,
            artifact_dir: None,
        }
    }

    /// Checks the structural invariants of the configuration.
    ///
    /// # Errors
    ///
    /// Returns [`DbarError::InvalidArgument`] when `tol_scale` is not
    /// a positive finite number, alongside any quadrature-spec
    /// violation.
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(DbarError::InvalidArgument(format!(
                "tol_scale must be positive and finite, got {}",
                self.tol_scale
            )));
        }
        self.quad.validate()
    }
}

/// Per-suite default quadrature parameters.
///
/// Suites asserting absolute bounds in the 1e-8..1e-10 range run at the
/// default tolerance 1e-6 (their integrands are smooth and converge far
/// past it); suites asserting order-of-magnitude bounds over many
/// evaluations run coarser so the whole roster stays at desk scale.
fn default_quad(suite: Suite) -> QuadratureSpec<f64> {
    let base = QuadratureSpec::default();
    match suite {
        Suite::PhiDisk => base,
        Suite::PompeiuDbar
        | Suite::DiskSpecialization
        | Suite::SolveAndCertify
        | Suite::TwotDivergence => QuadratureSpec {
            tol: 1e-5,
            max_refinements: 4,
            ..base
        },
        Suite::HIdentity | Suite::NwBoundDisk | Suite::NwBoundGeneral => QuadratureSpec {
            tol: 1e-4,
            max_refinements: 4,
            ..base
        },
        Suite::LossOptimality => QuadratureSpec {
            tol: 1e-4,
            max_refinements: 4,
            ..base
        },
        // Sampling-only suites: the spec is passed through but barely
        // used (1-D integrals and modulus profiles dominate).
        Suite::RadialLogBounds | Suite::TwotBoundedness | Suite::SharpnessExamples => base,
    }
}

/// Runs one suite to a report.
///
/// Never panics on upstream failures: any error from the operators,
/// the quadrature, or the sampling machinery is converted into a
/// failed measurement whose note carries the error text, and a
/// quadrature that did not converge can only yield `passed = false`.
pub fn run_suite(config: &SuiteConfig) -> VerificationReport {
    let started = Instant::now();
    let body = config.validate().and_then(|()| suites::dispatch(config));
    let (measurements, artifacts) = match body {
        Ok(out) => out,
        Err(e) => (
            vec![Measurement::flag("suite-completed-without-upstream-errors", false)
                .with_note(e.to_string())],
            Vec::new(),
        ),
    };
    let runtime_seconds = if config.canonical {
        0.0
    } else {
        started.elapsed().as_secs_f64()
    };
    VerificationReport::new(config.suite, measurements, artifacts, runtime_seconds)
}

/// Runs several suites in parallel and returns the reports in
/// canonical enum order (stable under the input order).
pub fn run_all(configs: &[SuiteConfig]) -> Vec<VerificationReport> {
    let mut reports: Vec<VerificationReport> =
        configs.par_iter().map(run_suite).collect();
    reports.sort_by_key(|r| r.suite);
    reports
}
