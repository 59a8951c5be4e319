//! The four subcommands behind the `dbar` binary.
//!
//! Each command resolves its inputs in three layers — command-line flags
//! override the optional JSON config file, which overrides built-in
//! defaults — then drives the library and serializes the result:
//!
//! | Command | Output | Shape |
//! |---------|--------|-------|
//! | `eval-op` | one operator evaluation | JSON record (or one CSV row) |
//! | `solve` | `∂̄u = f` on a grid | CSV `z_re,…,dbar_check_abs` (or JSON rows) |
//! | `verify` | suite reports | one JSON report per suite |
//! | `converge` | resolution ladder | CSV `cost,…,converged` (or JSON rows) |
//!
//! All floating-point CSV cells use 17 significant digits, so re-parsing
//! an emitted table reproduces every bit of the computed values, and
//! identical invocations produce byte-identical outputs (`verify`
//! additionally needs `--canonical` to zero its wall-clock fields).
//! Commands print the payload to standard output unless `--out` is
//! given, in which case the payload goes to the file and a one-line
//! summary goes to standard output.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use dbar_core::error::{DbarError, Result};
use dbar_core::geometry::{DomainKind, PlanarDomain};
use dbar_core::operators::{
    nw_residual, op_2t, op_h, op_phi, op_s, op_t, HMethod, Operator, OperatorEvaluation,
};
use dbar_core::quadrature::QuadratureSpec;
use dbar_core::testfields::ScalarField;
use dbar_verify::{
    convergence_csv, convergence_table, report::full_precision, run_all, Suite, SuiteConfig,
};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::grammar::{
    build_domain, parse_domain, parse_field, parse_grid, parse_point, parse_points, parse_quad,
    DomainValue, QuadOverrides,
};

/// Central-difference step for the `dbar_check_abs` column of `solve`.
/// Matches the solver's internal spot check: large enough that the
/// differenced potentials differ by far more than the quadrature
/// tolerance, small enough that the truncation term stays near 1e-3
/// even close to a datum's singularity.
const DBAR_CHECK_STEP: f64 = 1e-3;

/// Default solve grid when neither `--grid` nor `--points` is given.
/// A 3×3 grid keeps the default invocation at a few seconds: every
/// grid point costs four extra area integrals for its ∂̄ check.
const DEFAULT_GRID: (usize, usize) = (3, 3);

/// Default fraction of the inscribed radius kept clear of the boundary
/// when building solve grids.
const DEFAULT_GRID_MARGIN: f64 = 0.3;

/// Rung-count limits for `converge`. Below 3 rungs no observed order
/// can be formed; above 8 the area ladders reach millions of nodes.
const MIN_LEVELS: usize = 3;
/// Upper rung-count limit; see [`MIN_LEVELS`].
const MAX_LEVELS: usize = 8;

/// Default rung count for the boundary ladder (16 → 64 nodes).
const DEFAULT_PHI_LEVELS: usize = 3;

/// Default rung count for area ladders (16×32 → 128×256 cells).
const DEFAULT_AREA_LEVELS: usize = 4;

/// Grading of the single-shot area-ladder mesh. A steep ratio keeps
/// the graded-cell count small so the rung cost is controlled by
/// `radial_cells`/`angular_nodes` alone.
const AREA_LADDER_GRADING: f64 = 8.0;

/// Inner cutoff of the area-ladder mesh, coarse enough that the cell
/// counts of the ladder dominate the cost at every rung.
const AREA_LADDER_CUTOFF: f64 = 1e-8;

/// Operator selector for `eval-op`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpChoice {
    /// Area transform `Tf`.
    T,
    /// Boundary functional `Φ` (no field).
    Phi,
    /// Boundary transform `Sf` (the field is sampled on the boundary).
    S,
    /// Regularized transform `²Tf`.
    Twot,
    /// Derivative operator `Hf` through the identity route.
    H,
    /// `Hf` as a direct principal value, cross-checked internally.
    HDirect,
    /// Annular residual (needs `--radius`, ignores `--field`).
    Nw,
}

/// Ladder selector for `converge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LadderKind {
    /// Boundary functional `Φ` under boundary-node doubling.
    Phi,
    /// Area transform `Tf` under polar-mesh doubling.
    Cauchy,
    /// Regularized transform `²Tf` under polar-mesh doubling.
    Regularized,
}

/// Output shape for commands that support both table encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatChoice {
    /// Comma-separated table with a header row.
    Csv,
    /// JSON document (a record or an array of row objects).
    Json,
}

/// Quadrature value in a config file: flag grammar or a partial object.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum QuadValue {
    /// Flag-grammar string such as `"tol=1e-4,boundary_nodes=2048"`.
    Text(String),
    /// Partial object such as `{"tol": 1e-4}`.
    Overrides(QuadOverrides),
}

/// Optional JSON config file: every key mirrors a flag and sits below
/// it in precedence. Unknown keys are rejected so typos surface as
/// usage errors instead of silently restoring defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Domain spec: flag grammar or structured schema.
    pub domain: Option<DomainValue>,
    /// Field spec in the flag grammar.
    pub field: Option<String>,
    /// Evaluation point `re[,im]`.
    pub point: Option<String>,
    /// Explicit solve points `re,im;re,im;…`.
    pub points: Option<String>,
    /// Exclusion radius for the annular residual.
    pub radius: Option<f64>,
    /// Quadrature overrides.
    pub quad: Option<QuadValue>,
    /// Inverse-log order for `solve`.
    pub nu: Option<f64>,
    /// Solve grid `NxM`.
    pub grid: Option<String>,
    /// Solve grid margin in `(0, 1)`.
    pub margin: Option<f64>,
    /// Suite list for `verify`.
    pub suite: Option<String>,
    /// Sampling seed for `verify`.
    pub seed: Option<u64>,
    /// Tolerance scale for `verify`.
    pub tol_scale: Option<f64>,
    /// Canonical (timing-free) reports for `verify`.
    pub canonical: Option<bool>,
    /// Rung count for `converge`.
    pub levels: Option<usize>,
    /// Output format `csv` or `json`.
    pub format: Option<String>,
    /// Output path.
    pub out: Option<PathBuf>,
    /// Artifact directory for `verify`.
    pub artifact_dir: Option<PathBuf>,
}

/// Loads the config file when given, or an empty config.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when the file cannot be read
/// or does not match the schema.
fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| {
        DbarError::InvalidArgument(format!("config {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        DbarError::InvalidArgument(format!("config {}: {e}", path.display()))
    })
}

/// Resolves the domain from flag or config.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when neither layer provides
/// one, and propagates grammar/constructor errors.
fn resolve_domain(flag: Option<&str>, cfg: Option<&DomainValue>, command: &str) -> Result<PlanarDomain<f64>> {
    match (flag, cfg) {
        (Some(s), _) => parse_domain(s),
        (None, Some(v)) => build_domain(v),
        (None, None) => Err(DbarError::InvalidArgument(format!(
            "{command} needs a domain; pass --domain or set \"domain\" in the config"
        ))),
    }
}

/// Resolves the field from flag or config.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when neither layer provides
/// one, and propagates grammar errors.
fn resolve_field(flag: Option<&str>, cfg: Option<&str>, what: &str) -> Result<ScalarField<f64>> {
    flag.or(cfg)
        .map(parse_field)
        .transpose()?
        .ok_or_else(|| {
            DbarError::InvalidArgument(format!(
                "{what} needs a field; pass --field or set \"field\" in the config"
            ))
        })
}

/// Resolves the merged quadrature overrides (flag over config).
///
/// # Errors
///
/// Propagates flag-grammar parse errors.
fn resolve_quad_overrides(flag: Option<&str>, cfg: Option<&QuadValue>) -> Result<QuadOverrides> {
    let from_flag = flag.map(parse_quad).transpose()?.unwrap_or_default();
    let from_cfg = match cfg {
        None => QuadOverrides::default(),
        Some(QuadValue::Text(s)) => parse_quad(s)?,
        Some(QuadValue::Overrides(o)) => o.clone(),
    };
    Ok(from_flag.over(from_cfg))
}

/// Applies the merged overrides onto `base` and validates the result.
///
/// # Errors
///
/// Propagates parse and validation errors.
fn resolve_quad(
    flag: Option<&str>,
    cfg: Option<&QuadValue>,
    base: QuadratureSpec<f64>,
) -> Result<QuadratureSpec<f64>> {
    let mut spec = base;
    resolve_quad_overrides(flag, cfg)?.apply(&mut spec)?;
    Ok(spec)
}

/// Resolves the output format from flag or config, defaulting to `default`.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] for an unknown format name in
/// the config.
fn resolve_format(
    flag: Option<FormatChoice>,
    cfg: Option<&str>,
    default: FormatChoice,
) -> Result<FormatChoice> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match cfg {
        Some(s) => FormatChoice::from_str(s, true)
            .map_err(|_| DbarError::InvalidArgument(format!("config format: expected csv or json, got {s:?}"))),
        None => Ok(default),
    }
}

/// Writes `payload` to `out` and summarizes on stdout, or prints the
/// payload itself when no output path is set.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when the file cannot be
/// written.
fn emit(out: Option<&Path>, payload: &str, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| {
                    DbarError::InvalidArgument(format!("cannot create {}: {e}", parent.display()))
                })?;
            }
            fs::write(path, payload).map_err(|e| {
                DbarError::InvalidArgument(format!("cannot write {}: {e}", path.display()))
            })?;
            println!("wrote {}: {summary}", path.display());
        }
        None => print!("{payload}"),
    }
    Ok(())
}

/// Stable token for an operator in emitted records; `eval-op` echoes
/// the `--op` vocabulary so records name the route that produced them.
fn op_token(op: Operator) -> &'static str {
    match op {
        Operator::T => "t",
        Operator::Phi => "phi",
        Operator::S => "s",
        Operator::TwoT => "twot",
        Operator::HIdentity => "h",
        Operator::HDirect => "h-direct",
        Operator::NwResidual => "nw",
    }
}

/// One serialized operator evaluation.
#[derive(Serialize)]
struct EvalRecord<'a> {
    operator: &'a str,
    z: [f64; 2],
    value_re: f64,
    value_im: f64,
    error_estimate: f64,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<&'a str>,
}

/// Flags of `eval-op`.
#[derive(Debug, Args)]
pub struct EvalOpArgs {
    /// Operator to evaluate.
    #[arg(long, value_enum)]
    pub op: OpChoice,
    /// Domain spec, e.g. disk:0,0.5 | ellipse:2,1 | perturbed:0.1,5.
    #[arg(long)]
    pub domain: Option<String>,
    /// Field spec, e.g. f_nu:2 | const:1 | poly:1,0,1,1 (t, s, twot, h).
    #[arg(long)]
    pub field: Option<String>,
    /// Interior evaluation point re[,im].
    #[arg(long)]
    pub point: Option<String>,
    /// Exclusion radius of the annular residual (nw only).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Quadrature overrides key=value,… .
    #[arg(long)]
    pub quad: Option<String>,
    /// Output shape (default json).
    #[arg(long, value_enum)]
    pub format: Option<FormatChoice>,
    /// JSON config file supplying defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the record here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs `eval-op`: one operator, one point, one record.
///
/// # Errors
///
/// Usage errors for missing/unparsable inputs; numerical errors from
/// the operator evaluation.
pub fn eval_op(args: &EvalOpArgs) -> Result<i32> {
    let cfg = load_config(args.config.as_deref())?;
    let domain = resolve_domain(args.domain.as_deref(), cfg.domain.as_ref(), "eval-op")?;
    let spec = resolve_quad(args.quad.as_deref(), cfg.quad.as_ref(), QuadratureSpec::default())?;
    let z = args
        .point
        .as_deref()
        .or(cfg.point.as_deref())
        .map(parse_point)
        .transpose()?
        .ok_or_else(|| {
            DbarError::InvalidArgument(
                "eval-op needs a point; pass --point or set \"point\" in the config".into(),
            )
        })?;

    let needs_field = |what: &str| resolve_field(args.field.as_deref(), cfg.field.as_deref(), what);
    let ev: OperatorEvaluation<f64> = match args.op {
        OpChoice::T => op_t(&domain, &needs_field("--op t")?, z, &spec)?,
        OpChoice::Phi => op_phi(&domain, z, &spec)?,
        OpChoice::S => {
            let f = needs_field("--op s")?;
            op_s(&domain, move |zeta| f.value(zeta), z, &spec)?
        }
        OpChoice::Twot => op_2t(&domain, &needs_field("--op twot")?, z, &spec)?,
        OpChoice::H => op_h(&domain, &needs_field("--op h")?, z, &spec, HMethod::Identity)?,
        OpChoice::HDirect => {
            op_h(&domain, &needs_field("--op h-direct")?, z, &spec, HMethod::DirectPv)?
        }
        OpChoice::Nw => {
            let r = args.radius.or(cfg.radius).ok_or_else(|| {
                DbarError::InvalidArgument(
                    "eval-op --op nw needs --radius (or \"radius\" in the config)".into(),
                )
            })?;
            nw_residual(&domain, z, r, &spec)?
        }
    };

    let record = EvalRecord {
        operator: op_token(ev.operator),
        z: [ev.point.re, ev.point.im],
        value_re: ev.value.re,
        value_im: ev.value.im,
        error_estimate: ev.quadrature.err_estimate,
        converged: ev.quadrature.converged,
        warning: ev.warning.as_deref(),
    };
    let payload = match resolve_format(args.format, cfg.format.as_deref(), FormatChoice::Json)? {
        FormatChoice::Json => {
            let mut s = serde_json::to_string_pretty(&record).map_err(|e| {
                DbarError::InvalidArgument(format!("serialization failed: {e}"))
            })?;
            s.push('\n');
            s
        }
        FormatChoice::Csv => format!(
            "operator,z_re,z_im,value_re,value_im,error_estimate,converged\n{},{},{},{},{},{},{}\n",
            record.operator,
            full_precision(record.z[0]),
            full_precision(record.z[1]),
            full_precision(record.value_re),
            full_precision(record.value_im),
            full_precision(record.error_estimate),
            record.converged,
        ),
    };
    let summary = format!(
        "{} at ({}, {}) value = {} + {}i, error estimate {:.2e}, converged = {}",
        record.operator,
        record.z[0],
        record.z[1],
        record.value_re,
        record.value_im,
        record.error_estimate,
        record.converged,
    );
    emit(args.out.as_deref().or(cfg.out.as_deref()), &payload, &summary)?;
    Ok(0)
}

/// One serialized solution sample; field order is the CSV column order.
#[derive(Serialize)]
struct SolveRow {
    z_re: f64,
    z_im: f64,
    u_re: f64,
    u_im: f64,
    du_dz_re: f64,
    du_dz_im: f64,
    dbar_check_abs: f64,
}

/// Flags of `solve`.
#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Domain spec, e.g. disk:0,0.5.
    #[arg(long)]
    pub domain: Option<String>,
    /// Datum spec, e.g. f_nu:2.
    #[arg(long)]
    pub field: Option<String>,
    /// Inverse-log order of the datum's continuity class (must be > 1).
    #[arg(long)]
    pub nu: Option<f64>,
    /// Sample grid NxM on a centered square well inside the domain.
    #[arg(long)]
    pub grid: Option<String>,
    /// Explicit sample points re,im;re,im;… (overrides --grid).
    #[arg(long)]
    pub points: Option<String>,
    /// Fraction of the inscribed radius kept clear of the boundary.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Quadrature overrides key=value,… .
    #[arg(long)]
    pub quad: Option<String>,
    /// Output shape (default csv).
    #[arg(long, value_enum)]
    pub format: Option<FormatChoice>,
    /// JSON config file supplying defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Builds an `n × m` grid on the axis-aligned square inscribed in the
/// disk of radius `(1 - margin) · boundary_distance(center)` around the
/// domain's natural center.
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] when `margin` leaves no room
/// for interior points.
fn square_grid(
    domain: &PlanarDomain<f64>,
    n: usize,
    m: usize,
    margin: f64,
) -> Result<Vec<Complex<f64>>> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(DbarError::InvalidArgument(format!(
            "grid margin must lie in (0, 1), got {margin}"
        )));
    }
    let center = match domain.kind {
        DomainKind::Disk { center, .. } => center,
        _ => Complex::new(0.0, 0.0),
    };
    let half = (1.0 - margin) * domain.boundary_distance(center) / std::f64::consts::SQRT_2;
    let coord = |count: usize, index: usize, offset: f64| {
        if count == 1 {
            offset
        } else {
            let step = 2.0 * half / (count as f64 - 1.0);
            offset - half + step * index as f64
        }
    };
    let mut grid = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            grid.push(Complex::new(
                coord(n, i, center.re),
                coord(m, j, center.im),
            ));
        }
    }
    Ok(grid)
}

/// Runs `solve`: potential, derivative pair, and per-point ∂̄ check on
/// a grid.
///
/// # Errors
///
/// Usage errors for missing/unparsable inputs; `Rejected` when the
/// order is not above 1; numerical errors from the solver or the
/// finite-difference checks.
pub fn solve(args: &SolveArgs) -> Result<i32> {
    let cfg = load_config(args.config.as_deref())?;
    let domain = resolve_domain(args.domain.as_deref(), cfg.domain.as_ref(), "solve")?;
    let field = resolve_field(args.field.as_deref(), cfg.field.as_deref(), "solve")?;
    let spec = resolve_quad(args.quad.as_deref(), cfg.quad.as_ref(), QuadratureSpec::default())?;
    let nu = args.nu.or(cfg.nu).ok_or_else(|| {
        DbarError::InvalidArgument(
            "solve needs the datum's inverse-log order; pass --nu or set \"nu\" in the config"
                .into(),
        )
    })?;

    let grid = match args.points.as_deref().or(cfg.points.as_deref()) {
        Some(list) => parse_points(list)?,
        None => {
            let (n, m) = args
                .grid
                .as_deref()
                .or(cfg.grid.as_deref())
                .map(parse_grid)
                .transpose()?
                .unwrap_or(DEFAULT_GRID);
            let margin = args.margin.or(cfg.margin).unwrap_or(DEFAULT_GRID_MARGIN);
            square_grid(&domain, n, m, margin)?
        }
    };

    let solution = dbar_core::operators::solve_dbar(&domain, &field, &grid, nu, &spec)?;

    let mut rows = Vec::with_capacity(solution.grid.len());
    let potential = |w: Complex<f64>| op_t(&domain, &field, w, &spec).map(|ev| ev.value);
    for (idx, &z) in solution.grid.iter().enumerate() {
        let h = DBAR_CHECK_STEP;
        let fx = (potential(z + Complex::new(h, 0.0))? - potential(z - Complex::new(h, 0.0))?)
            / (2.0 * h);
        let fy = (potential(z + Complex::new(0.0, h))? - potential(z - Complex::new(0.0, h))?)
            / (2.0 * h);
        let dzbar = (fx + Complex::new(0.0, 1.0) * fy) * 0.5;
        rows.push(SolveRow {
            z_re: z.re,
            z_im: z.im,
            u_re: solution.values[idx].re,
            u_im: solution.values[idx].im,
            du_dz_re: solution.dz_values[idx].re,
            du_dz_im: solution.dz_values[idx].im,
            dbar_check_abs: (dzbar - solution.dzbar_values[idx]).norm(),
        });
    }

    let payload = match resolve_format(args.format, cfg.format.as_deref(), FormatChoice::Csv)? {
        FormatChoice::Csv => {
            let mut out =
                String::from("z_re,z_im,u_re,u_im,du_dz_re,du_dz_im,dbar_check_abs\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    full_precision(r.z_re),
                    full_precision(r.z_im),
                    full_precision(r.u_re),
                    full_precision(r.u_im),
                    full_precision(r.du_dz_re),
                    full_precision(r.du_dz_im),
                    full_precision(r.dbar_check_abs),
                ));
            }
            out
        }
        FormatChoice::Json => {
            let mut s = serde_json::to_string_pretty(&rows).map_err(|e| {
                DbarError::InvalidArgument(format!("serialization failed: {e}"))
            })?;
            s.push('\n');
            s
        }
    };

    let worst_check = rows.iter().map(|r| r.dbar_check_abs).fold(0.0f64, f64::max);
    let summary = format!(
        "{} points, first-order norm estimate {} (grid-limited), max dbar check {:.2e}",
        rows.len(),
        solution.norm_report.c1_norm_estimate,
        worst_check,
    );
    emit(args.out.as_deref().or(cfg.out.as_deref()), &payload, &summary)?;
    Ok(0)
}

/// Flags of `verify`.
#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated suite names, or "all".
    #[arg(long)]
    pub suite: Option<String>,
    /// Accepted for script compatibility; suites run fixed domain
    /// rosters, so this only validates and is otherwise unused.
    #[arg(long)]
    pub domain: Option<String>,
    /// Seed of the suites' deterministic sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scale factor applied to every tolerance.
    #[arg(long)]
    pub tol_scale: Option<f64>,
    /// Quadrature overrides applied on top of each suite's defaults.
    #[arg(long)]
    pub quad: Option<String>,
    /// Zero wall-clock fields so identical runs are byte-identical.
    #[arg(long)]
    pub canonical: bool,
    /// Directory for CSV measurement tables (none written otherwise).
    #[arg(long)]
    pub artifact_dir: Option<PathBuf>,
    /// Report file (one suite) or directory (several suites); default
    /// prints reports to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file supplying defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses the suite list, expanding `all` and dropping duplicates
/// (roster order is kept).
///
/// # Errors
///
/// Returns [`DbarError::InvalidArgument`] naming the valid tokens when
/// a name is unknown or the list is empty.
fn parse_suites(list: &str) -> Result<Vec<Suite>> {
    if list.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut suites = Vec::new();
    for token in list.split(',') {
        let suite = Suite::from_str(token.trim())?;
        if !suites.contains(&suite) {
            suites.push(suite);
        }
    }
    if suites.is_empty() {
        return Err(DbarError::InvalidArgument("suite list is empty".into()));
    }
    Ok(suites)
}

/// Runs `verify`: the selected suites, their JSON reports, and a pass
/// or fail summary.
///
/// Exit code 1 when any suite fails, with the failing measurements
/// named on standard error.
///
/// # Errors
///
/// Usage errors for unknown suites or unwritable outputs. Numerical
/// failures inside a suite do not error here — they surface as failed
/// measurements in the suite's report.
pub fn verify(args: &VerifyArgs) -> Result<i32> {
    let cfg = load_config(args.config.as_deref())?;
    if let Some(domain) = &args.domain {
        parse_domain(domain)?;
        eprintln!(
            "note: --domain is accepted for script compatibility; suites run fixed domain rosters"
        );
    }
    let suites = parse_suites(
        args.suite
            .as_deref()
            .or(cfg.suite.as_deref())
            .unwrap_or("all"),
    )?;
    let overrides = resolve_quad_overrides(args.quad.as_deref(), cfg.quad.as_ref())?;
    let artifact_dir = args.artifact_dir.clone().or(cfg.artifact_dir.clone());
    let out = args.out.clone().or(cfg.out.clone());

    let mut configs = Vec::with_capacity(suites.len());
    for suite in suites {
        let mut sc = SuiteConfig::new(suite);
        overrides.apply(&mut sc.quad)?;
        if let Some(seed) = args.seed.or(cfg.seed) {
            sc.seed = seed;
        }
        if let Some(scale) = args.tol_scale.or(cfg.tol_scale) {
            sc.tol_scale = scale;
        }
        sc.canonical = args.canonical || cfg.canonical.unwrap_or(false);
        sc.artifact_dir = artifact_dir.clone();
        configs.push(sc);
    }

    let reports = run_all(&configs);

    match &out {
        Some(path) if reports.len() == 1 => {
            emit(Some(path), &reports[0].to_json(), "1 report")?;
        }
        Some(dir) => {
            if dir.extension().is_some() {
                return Err(DbarError::InvalidArgument(format!(
                    "--out {} looks like a file; several suites need a directory",
                    dir.display()
                )));
            }
            fs::create_dir_all(dir).map_err(|e| {
                DbarError::InvalidArgument(format!("cannot create {}: {e}", dir.display()))
            })?;
            for report in &reports {
                let path = dir.join(format!("{}.json", report.suite));
                fs::write(&path, report.to_json()).map_err(|e| {
                    DbarError::InvalidArgument(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            println!("wrote {}: {} reports", dir.display(), reports.len());
        }
        None => {
            for report in &reports {
                print!("{}", report.to_json());
            }
        }
    }

    let mut failed = false;
    for report in &reports {
        println!(
            "{}: {} ({} measurements)",
            report.suite,
            if report.passed { "pass" } else { "FAIL" },
            report.measurements.len(),
        );
        if !report.passed {
            failed = true;
            let names: Vec<&str> = report
                .measurements
                .iter()
                .filter(|m| !m.passed)
                .map(|m| m.name.as_str())
                .collect();
            eprintln!(
                "verification failed: {}: {}",
                report.suite,
                names.join(", ")
            );
        }
    }
    Ok(if failed { 1 } else { 0 })
}

/// One serialized convergence rung; field order is the CSV column order.
#[derive(Serialize)]
struct ConvergeRow {
    cost: usize,
    value_re: f64,
    value_im: f64,
    error_vs_richest: Option<f64>,
    observed_order: Option<f64>,
    converged: bool,
}

/// Flags of `converge`.
#[derive(Debug, Args)]
pub struct ConvergeArgs {
    /// Which resolution ladder to run.
    #[arg(long, value_enum)]
    pub kind: LadderKind,
    /// Domain spec, e.g. ellipse:2,1.
    #[arg(long)]
    pub domain: Option<String>,
    /// Field spec (cauchy and regularized; phi ignores it).
    #[arg(long)]
    pub field: Option<String>,
    /// Interior evaluation point re[,im].
    #[arg(long)]
    pub point: Option<String>,
    /// Number of rungs (3-8; default 3 for phi, 4 otherwise).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Quadrature overrides for the non-resolution parameters.
    #[arg(long)]
    pub quad: Option<String>,
    /// Output shape (default csv).
    #[arg(long, value_enum)]
    pub format: Option<FormatChoice>,
    /// JSON config file supplying defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs `converge`: evaluates one operator across a doubling resolution
/// ladder and tabulates cost against error.
///
/// The ladder owns the resolution parameters (`boundary_nodes` for
/// phi; `radial_cells` and `angular_nodes` for the area kinds) and runs
/// each rung single-shot; `--quad` tunes the remaining parameters.
///
/// # Errors
///
/// Usage errors for missing/unparsable inputs; numerical errors from
/// the underlying evaluations.
pub fn converge(args: &ConvergeArgs) -> Result<i32> {
    let cfg = load_config(args.config.as_deref())?;
    let domain = resolve_domain(args.domain.as_deref(), cfg.domain.as_ref(), "converge")?;
    let z = args
        .point
        .as_deref()
        .or(cfg.point.as_deref())
        .map(parse_point)
        .transpose()?
        .ok_or_else(|| {
            DbarError::InvalidArgument(
                "converge needs a point; pass --point or set \"point\" in the config".into(),
            )
        })?;
    let levels = args.levels.or(cfg.levels).unwrap_or(match args.kind {
        LadderKind::Phi => DEFAULT_PHI_LEVELS,
        _ => DEFAULT_AREA_LEVELS,
    });
    if !(MIN_LEVELS..=MAX_LEVELS).contains(&levels) {
        return Err(DbarError::InvalidArgument(format!(
            "levels must lie in {MIN_LEVELS}..={MAX_LEVELS}, got {levels}"
        )));
    }

    let mut base = QuadratureSpec::default();
    if args.kind != LadderKind::Phi {
        base.grading = AREA_LADDER_GRADING;
        base.cutoff = AREA_LADDER_CUTOFF;
    }
    resolve_quad_overrides(args.quad.as_deref(), cfg.quad.as_ref())?.apply(&mut base)?;

    let rungs: Vec<QuadratureSpec<f64>> = (0..levels)
        .map(|i| {
            let mut spec = base.clone();
            spec.max_refinements = 0;
            match args.kind {
                LadderKind::Phi => spec.boundary_nodes = 16 << i,
                _ => {
                    spec.radial_cells = 16 << i;
                    spec.angular_nodes = 32 << i;
                }
            }
            spec
        })
        .collect();

    let (operator, field) = match args.kind {
        LadderKind::Phi => (Operator::Phi, None),
        LadderKind::Cauchy => (
            Operator::T,
            Some(resolve_field(args.field.as_deref(), cfg.field.as_deref(), "converge --kind cauchy")?),
        ),
        LadderKind::Regularized => (
            Operator::TwoT,
            Some(resolve_field(
                args.field.as_deref(),
                cfg.field.as_deref(),
                "converge --kind regularized",
            )?),
        ),
    };
    let rows = convergence_table(&domain, operator, field.as_ref(), z, &rungs)?;

    let payload = match resolve_format(args.format, cfg.format.as_deref(), FormatChoice::Csv)? {
        FormatChoice::Csv => convergence_csv(&rows),
        FormatChoice::Json => {
            let rows: Vec<ConvergeRow> = rows
                .iter()
                .map(|r| ConvergeRow {
                    cost: r.cost,
                    value_re: r.value.re,
                    value_im: r.value.im,
                    error_vs_richest: r.error_vs_richest,
                    observed_order: r.observed_order,
                    converged: r.converged,
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).map_err(|e| {
                DbarError::InvalidArgument(format!("serialization failed: {e}"))
            })?;
            s.push('\n');
            s
        }
    };
    let summary = format!("{} rungs, richest cost {}", rows.len(), rows.last().map_or(0, |r| r.cost));
    emit(args.out.as_deref().or(cfg.out.as_deref()), &payload, &summary)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_grid_is_interior_and_ordered() {
        let disk = parse_domain("disk:1,1,2").unwrap();
        let grid = square_grid(&disk, 3, 2, 0.3).unwrap();
        assert_eq!(grid.len(), 6);
        for z in &grid {
            assert!(disk.contains(*z));
            assert!(disk.boundary_distance(*z) >= 0.3 * 2.0 / 2.0_f64.sqrt() - 1e-12);
        }
        // Row-major: the first row shares its imaginary part.
        assert_eq!(grid[0].im, grid[1].im);
        assert!(grid[0].re < grid[1].re);
        assert!(grid[0].im < grid[3].im);
        // A 1x1 grid is the center itself.
        let single = square_grid(&disk, 1, 1, 0.5).unwrap();
        assert_eq!(single, vec![Complex::new(1.0, 1.0)]);
        assert!(square_grid(&disk, 2, 2, 0.0).is_err());
        assert!(square_grid(&disk, 2, 2, 1.0).is_err());
    }

    #[test]
    fn suite_lists_expand_and_deduplicate() {
        assert_eq!(parse_suites("all").unwrap().len(), 12);
        let picked = parse_suites("phi_disk, phi_disk,loss_optimality").unwrap();
        assert_eq!(picked, vec![Suite::PhiDisk, Suite::LossOptimality]);
        assert!(parse_suites("phi").is_err());
        assert!(parse_suites("").is_err());
    }

    #[test]
    fn config_layers_keep_flag_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(
            &path,
            r#"{"domain": {"kind": "disk", "radius": 0.5}, "nu": 3.0, "quad": {"tol": 0.01}}"#,
        )
        .unwrap();
        let cfg = load_config(Some(&path)).unwrap();
        assert_eq!(cfg.nu, Some(3.0));
        let domain = resolve_domain(None, cfg.domain.as_ref(), "test").unwrap();
        assert!(matches!(domain.kind, DomainKind::Disk { .. }));
        // Flag layer wins over the config layer.
        let spec = resolve_quad(Some("tol=1e-4"), cfg.quad.as_ref(), QuadratureSpec::default())
            .unwrap();
        assert_eq!(spec.tol, 1e-4);
        // Config layer applies when no flag is given.
        let spec = resolve_quad(None, cfg.quad.as_ref(), QuadratureSpec::default()).unwrap();
        assert_eq!(spec.tol, 0.01);
        // Unknown keys are usage errors, not silent defaults.
        std::fs::write(&path, r#"{"tolx": 1}"#).unwrap();
        assert!(load_config(Some(&path)).is_err());
    }
}
