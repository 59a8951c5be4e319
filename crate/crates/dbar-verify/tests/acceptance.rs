//! Acceptance harness: one test per acceptance criterion, each
//! printing a single `[PASS]`/`[FAIL]` line before asserting.
//!
//! The roster of verification suites runs once (in canonical mode, so
//! reports are byte-stable) and is shared across criteria; the
//! determinism criterion reruns the full roster from scratch and
//! compares encodings byte for byte.
//!
//! Two criteria are expected to fail and are left failing on purpose
//! rather than weakened:
//!
//! * criterion 6 — the second-power radial inequality with constant 1
//!   is genuinely false on part of its parameter grid (it is
//!   equivalent near `h → 0` to `li(x) ≤ x/ln x`, which fails for
//!   large `x`); the suite tabulates the violating cells.
//! * criterion 8 — the finite-window modulus estimator recovers the
//!   potential-derivative order but overestimates the datum orders 2
//!   and 3: the sampled sup at each scale is dominated by segment
//!   pairs straddling the singularity, which steepens the fitted
//!   slope. The fitted values are reproducible (3.4607 and 5.3804)
//!   and reported as-is.
//!
//! See the README for the full discussion.

use std::sync::OnceLock;

use dbar_verify::{run_all, Measurement, Suite, SuiteConfig, VerificationReport};

fn canonical_configs() -> Vec<SuiteConfig> {
    Suite::ALL
        .iter()
        .map(|&suite| {
            let mut config = SuiteConfig::new(suite);
            config.canonical = true;
            config
        })
        .collect()
}

/// The shared roster run; computed once per test-binary process.
fn roster() -> &'static [VerificationReport] {
    static ROSTER: OnceLock<Vec<VerificationReport>> = OnceLock::new();
    ROSTER.get_or_init(|| run_all(&canonical_configs()))
}

fn report(suite: Suite) -> &'static VerificationReport {
    roster()
        .iter()
        .find(|r| r.suite == suite)
        .expect("the roster covers every suite")
}

fn measurement(suite: Suite, name: &str) -> &'static Measurement {
    report(suite)
        .measurements
        .iter()
        .find(|m| m.name == name)
        .unwrap_or_else(|| panic!("suite {suite} has no measurement named '{name}'"))
}

fn passes(suite: Suite, names: &[&str]) -> bool {
    names.iter().all(|name| measurement(suite, name).passed)
}

/// Prints the single verdict line for a criterion and returns `ok`.
fn verdict(number: u32, ok: bool, statement: &str) -> bool {
    println!(
        "[{}] criterion {number:02}: {statement}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

#[test]
fn acceptance_01_phi_vanishes_on_disks() {
    let ok = passes(
        Suite::PhiDisk,
        &["max-abs-phi-on-disk(0,0.5)", "max-abs-phi-on-disk(1+i,2)"],
    );
    let worst = measurement(Suite::PhiDisk, "max-abs-phi-on-disk(0,0.5)")
        .value
        .max(measurement(Suite::PhiDisk, "max-abs-phi-on-disk(1+i,2)").value);
    assert!(
        verdict(
            1,
            ok,
            &format!(
                "the boundary functional vanishes on disks: max |phi| = {worst:.2e} < 1e-10 \
                 over 50 seeded interior points per disk at 1024 boundary nodes"
            )
        ),
        "phi must vanish identically on disks"
    );
}

#[test]
fn acceptance_02_phi_ellipse_constant() {
    let m = measurement(Suite::PhiDisk, "axis-ratio-constant-error-on-ellipse(2,1)");
    let ok = m.passed;
    assert!(
        verdict(
            2,
            ok,
            &format!(
                "on ellipse(2,1) the boundary functional equals the axis-ratio constant \
                 1/3: |phi(0) - 1/3| = {:.2e} < 1e-8",
                m.value
            )
        ),
        "the ellipse constant must match the closed form"
    );
}

#[test]
fn acceptance_03_transform_solves_dbar() {
    let t1 = measurement(Suite::PompeiuDbar, "max-error-of-unit-potential");
    let fd = measurement(Suite::PompeiuDbar, "max-dbar-residual-of-potential");
    let ok = t1.passed && fd.passed;
    assert!(
        verdict(
            3,
            ok,
            &format!(
                "the transform solves the dbar problem: |T1 - conj(z)| = {:.2e} < 1e-4 at \
                 25 points, finite-difference dbar residual = {:.2e} < 1e-3 at 9 points",
                t1.value, fd.value
            )
        ),
        "both solution-property checks must hold"
    );
}

#[test]
fn acceptance_04_derivative_identity_and_disk_specialization() {
    let identity_ok = passes(
        Suite::HIdentity,
        &[
            "triples-evaluated",
            "route-inconsistencies",
            "max-route-gap-in-gate-units",
            "unconverged-evaluations",
        ],
    );
    let disk = measurement(
        Suite::DiskSpecialization,
        "max-gap-direct-vs-regularized-on-disks",
    );
    let ok = identity_ok && disk.passed;
    assert!(
        verdict(
            4,
            ok,
            &format!(
                "the direct principal value agrees with the regularized route minus the \
                 boundary correction over 50 (domain, field, point) triples within 10x \
                 combined error estimates; on disks the two routes coincide to {:.2e} < 1e-5",
                disk.value
            )
        ),
        "the derivative identity must hold along both routes"
    );
}

#[test]
fn acceptance_05_annular_residual_bounds() {
    let disk_ok = passes(
        Suite::NwBoundDisk,
        &["max-abs-residual-on-disk", "samples-above-one"],
    );
    let general_ok = passes(
        Suite::NwBoundGeneral,
        &["max-abs-residual-on-ellipse(2,1)", "samples-above-one"],
    );
    let disk_max = measurement(Suite::NwBoundDisk, "max-abs-residual-on-disk").value;
    let ell_max = measurement(Suite::NwBoundGeneral, "max-abs-residual-on-ellipse(2,1)").value;
    let ok = disk_ok && general_ok;
    assert!(
        verdict(
            5,
            ok,
            &format!(
                "the annular residual is uniformly bounded: max {disk_max:.3} <= 8*pi*1.001 \
                 over a 20x20 sweep of the unit disk (non-vacuously), and max {ell_max:.3} \
                 <= 8*pi + max boundary term + 1e-2 on ellipse(2,1)"
            )
        ),
        "the residual bounds must hold on the disk and the ellipse"
    );
}

#[test]
fn acceptance_06_radial_model_integrals() {
    let closed_ok = passes(
        Suite::RadialLogBounds,
        &[
            "first-power-closed-form-max-relative-mismatch-nu-1.5",
            "first-power-closed-form-max-relative-mismatch-nu-2",
            "first-power-closed-form-max-relative-mismatch-nu-3",
        ],
    );
    let ratio = measurement(Suite::RadialLogBounds, "second-power-max-ratio-to-model");
    let cells = measurement(Suite::RadialLogBounds, "second-power-violating-cells");
    let ok = closed_ok && ratio.passed && cells.passed;
    assert!(
        verdict(
            6,
            ok,
            &format!(
                "radial model integrals: the first-power closed form cross-checks to 1e-8 \
                 relative; the second-power inequality with constant 1 holds on the full \
                 grid (measured max ratio {:.4}, {} violating cells — the constant-1 \
                 inequality is genuinely false there; see README)",
                ratio.value, cells.value
            )
        ),
        "expected failure: the constant-1 second-power inequality does not hold on the grid"
    );
}

#[test]
fn acceptance_07_regularized_value_and_divergence() {
    let ok = passes(
        Suite::TwotDivergence,
        &[
            "regularized-value-error-at-origin",
            "divergence-detected",
            "divergence-partial-count",
            "partials-strictly-increasing",
            "divergence-slope-on-iterated-log-axis",
        ],
    );
    let err = measurement(Suite::TwotDivergence, "regularized-value-error-at-origin").value;
    let slope = measurement(Suite::TwotDivergence, "divergence-slope-on-iterated-log-axis").value;
    assert!(
        verdict(
            7,
            ok,
            &format!(
                "the regularized transform hits its closed value at the order-2 singular \
                 point (error {err:.1e} < 1e-4) and diverges at order 1 with increasing \
                 partial sums growing on the iterated-log axis (slope {slope:.3}, within 20%)"
            )
        ),
        "the closed value and the divergence detection must both hold"
    );
}

#[test]
fn acceptance_08_log_order_recovery() {
    let two = measurement(Suite::SharpnessExamples, "estimated-order-model-field-two");
    let three = measurement(Suite::SharpnessExamples, "estimated-order-model-field-three");
    let derivative = measurement(
        Suite::SharpnessExamples,
        "estimated-order-potential-derivative",
    );
    let ok = two.passed && three.passed && derivative.passed;
    assert!(
        verdict(
            8,
            ok,
            &format!(
                "log-order recovery at 10^4 pairs/scale, k = 4..14: datum orders fitted to \
                 {:.4} (wanted 2 +/- 0.15) and {:.4} (wanted 3 +/- 0.15), potential \
                 derivative fitted to {:.4} (wanted 1 +/- 0.2) — the model-field fits land \
                 outside their windows; see README for the finite-window analysis",
                two.value, three.value, derivative.value
            )
        ),
        "expected failure: finite-window fits overestimate the datum orders"
    );
}

#[test]
fn acceptance_09_radial_gradient_dichotomy() {
    let ok = passes(
        Suite::SharpnessExamples,
        &[
            "radial-derivative-grows-nu-0.5",
            "radial-derivative-grows-nu-1",
            "radial-derivative-bounded-nu-2",
        ],
    );
    let spread = measurement(Suite::SharpnessExamples, "radial-derivative-spread-nu-2").value;
    assert!(
        verdict(
            9,
            ok,
            &format!(
                "the radial gradient of the model potential grows strictly toward the \
                 singularity at orders 0.5 and 1 over k = 4..20, and stays within a factor \
                 2 of its first sample at order 2 (the sequence is decreasing; its full \
                 max/min spread {spread:.3} is recorded informationally)"
            )
        ),
        "the gradient dichotomy must hold"
    );
}

#[test]
fn acceptance_10_boundedness_witness() {
    let names: Vec<String> = [1.2, 1.5, 2.0, 3.0]
        .iter()
        .map(|nu| format!("ratio-spread-model-nu-{nu}"))
        .collect();
    let spread_ok = names
        .iter()
        .all(|name| measurement(Suite::TwotBoundedness, name).passed);
    let labeled = names.iter().all(|name| {
        measurement(Suite::TwotBoundedness, name)
            .note
            .as_deref()
            .is_some_and(|n| n.contains("not a proof"))
    });
    let ok = spread_ok && labeled;
    assert!(
        verdict(
            10,
            ok,
            "norm-ratio stability: the model-field seminorm-to-datum ratios vary by less \
             than a factor 50 across sampling depths k_max in {10, 12, 14} for orders \
             {1.2, 1.5, 2, 3}, and every such measurement is labeled an empirical \
             witness, not a proof"
        ),
        "the boundedness witness must hold and be labeled as a witness"
    );
}

#[test]
fn acceptance_11_reports_are_byte_deterministic() {
    let first: Vec<String> = roster().iter().map(VerificationReport::to_json).collect();
    let rerun: Vec<String> = run_all(&canonical_configs())
        .iter()
        .map(VerificationReport::to_json)
        .collect();
    let ok = first == rerun;
    assert!(
        verdict(
            11,
            ok,
            "rerunning every suite with the same seed and canonical timing produces \
             byte-identical report encodings"
        ),
        "reports must be byte-deterministic under fixed seeds"
    );
}
