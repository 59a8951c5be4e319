//! Structured verification reports.
//!
//! Every suite produces a [`VerificationReport`]: a list of named
//! [`Measurement`]s, each carrying the measured value, the bound or
//! target it is checked against, and an explicit pass verdict. The
//! report as a whole passes exactly when every measurement passes —
//! there is no other pathway to a green report, so an upstream failure
//! (a quadrature that did not converge, an operator that returned an
//! error) can only ever surface as a failed measurement.
//!
//! Reports serialize to JSON through [`serde`]; measurement tables can
//! also be rendered as CSV with full-precision decimal floats so that
//! downstream plotting reproduces every value bit-for-bit. When a
//! report is produced in *canonical* mode the `runtime_seconds` field
//! is written as `0.0`, making reruns with a fixed seed byte-identical;
//! default runs record real wall-clock timings.

use serde::{Deserialize, Serialize};

use crate::Suite;

/// How a measurement's `value` is compared against `bound_or_target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementKind {
    /// Passes when `|value - bound_or_target| <= tolerance`.
    Target,
    /// Passes when `value <= bound_or_target + tolerance`.
    UpperBound,
    /// Passes when `value >= bound_or_target - tolerance`.
    LowerBound,
    /// Boolean check: `value` is `1.0` (pass) or `0.0` (fail).
    Flag,
    /// Recorded for transparency only; always passes. Used for
    /// quantities the suite reports without asserting a bound.
    Info,
}

/// One named check inside a verification report.
///
/// The `passed` verdict is computed by the constructor from `kind`,
/// never set directly, and a non-finite value fails every kind except
/// [`MeasurementKind::Info`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Stable, human-readable identifier of the check.
    pub name: String,
    /// The measured value.
    pub value: f64,
    /// The bound or target the value is compared against.
    pub bound_or_target: f64,
    /// Allowed slack around the bound or target.
    pub tolerance: f64,
    /// Comparison semantics.
    pub kind: MeasurementKind,
    /// Verdict implied by the fields above.
    pub passed: bool,
    /// Optional free-form context (error text, methodology caveats).
    pub note: Option<String>,
}

impl Measurement {
    fn build(name: impl Into<String>, value: f64, bound_or_target: f64, tolerance: f64, kind: MeasurementKind) -> Self {
        let passed = match kind {
            MeasurementKind::Target => value.is_finite() && (value - bound_or_target).abs() <= tolerance,
            MeasurementKind::UpperBound => value.is_finite() && value <= bound_or_target + tolerance,
            MeasurementKind::LowerBound => value.is_finite() && value >= bound_or_target - tolerance,
            MeasurementKind::Flag => value == 1.0,
            MeasurementKind::Info => true,
        };
        Measurement {
            name: name.into(),
            value,
            bound_or_target,
            tolerance,
            kind,
            passed,
            note: None,
        }
    }

    /// Check that `value` lies within `tolerance` of `target`.
    ///
    /// # Examples
    ///
    /// ```
    /// use dbar_verify::Measurement;
    ///
    /// let near = Measurement::target("fitted-slope", 1.02, 1.0, 0.2);
    /// assert!(near.passed);
    /// // Non-finite values never pass, whatever the tolerance.
    /// let bad = Measurement::target("fitted-slope", f64::NAN, 1.0, f64::INFINITY);
    /// assert!(!bad.passed);
    /// ```
    pub fn target(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::build(name, value, target, tolerance, MeasurementKind::Target)
    }

    /// Check that `value` does not exceed `bound` (plus `tolerance`).
    pub fn upper_bound(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::build(name, value, bound, tolerance, MeasurementKind::UpperBound)
    }

    /// Check that `value` is at least `bound` (minus `tolerance`).
    pub fn lower_bound(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::build(name, value, bound, tolerance, MeasurementKind::LowerBound)
    }

    /// Boolean check; `ok = true` records value `1.0` and passes.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::build(name, f64::from(u8::from(ok)), 1.0, 0.0, MeasurementKind::Flag)
    }

    /// Informational record: always passes, asserts nothing.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self::build(name, value, value, 0.0, MeasurementKind::Info)
    }

    /// Attaches a free-form note (methodology caveat, error text).
    #[must_use]
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// The outcome of one verification suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Which suite produced this report.
    pub suite: Suite,
    /// True exactly when every measurement passed.
    pub passed: bool,
    /// The individual checks, in the order the suite emitted them.
    pub measurements: Vec<Measurement>,
    /// Paths of CSV tables emitted alongside the report, if any.
    pub artifacts: Vec<String>,
    /// Wall-clock runtime; written as `0.0` in canonical mode.
    pub runtime_seconds: f64,
}

impl VerificationReport {
    /// Assembles a report; `passed` is derived, never supplied.
    pub fn new(
        suite: Suite,
        measurements: Vec<Measurement>,
        artifacts: Vec<String>,
        runtime_seconds: f64,
    ) -> Self {
        let passed = !measurements.is_empty() && measurements.iter().all(|m| m.passed);
        VerificationReport {
            suite,
            passed,
            measurements,
            artifacts,
            runtime_seconds,
        }
    }

    /// Names of the measurements that failed, in emission order.
    pub fn failed_names(&self) -> Vec<&str> {
        self.measurements
            .iter()
            .filter(|m| !m.passed)
            .map(|m| m.name.as_str())
            .collect()
    }

    /// Pretty-printed JSON encoding, terminated by a newline.
    ///
    /// Serialization of this type cannot fail (no maps with non-string
    /// keys, no non-finite floats are stored by the suites), so the
    /// encoder's error is converted to a panic rather than propagated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization is infallible");
        s.push('\n');
        s
    }

    /// Parses a report back from its JSON encoding.
    ///
    /// # Errors
    ///
    /// Returns the underlying decoder error when the text is not a
    /// valid report document.
    pub fn from_json(text: &str) -> serde_json::Result<VerificationReport> {
        serde_json::from_str(text)
    }

    /// Measurement table as CSV with 17 significant digits per float.
    pub fn measurements_csv(&self) -> String {
        let mut out = String::from("name,value,bound_or_target,tolerance,kind,passed\n");
        for m in &self.measurements {
            let kind = match m.kind {
                MeasurementKind::Target => "target",
                MeasurementKind::UpperBound => "upper-bound",
                MeasurementKind::LowerBound => "lower-bound",
                MeasurementKind::Flag => "flag",
                MeasurementKind::Info => "info",
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_quote(&m.name),
                full_precision(m.value),
                full_precision(m.bound_or_target),
                full_precision(m.tolerance),
                kind,
                m.passed
            ));
        }
        out
    }
}

/// Formats a float with 17 significant digits (scientific notation),
/// enough for exact round-trips of any `f64`.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// Quotes a CSV cell when it contains a delimiter, quote, or newline.
pub fn csv_quote(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measurement_kinds_compare_as_documented() {
        assert!(Measurement::target("t", 1.0005, 1.0, 1e-3).passed);
        assert!(!Measurement::target("t", 1.01, 1.0, 1e-3).passed);
        assert!(Measurement::upper_bound("u", 0.9, 1.0, 0.0).passed);
        assert!(!Measurement::upper_bound("u", 1.1, 1.0, 0.0).passed);
        assert!(Measurement::lower_bound("l", 1.1, 1.0, 0.0).passed);
        assert!(!Measurement::lower_bound("l", 0.9, 1.0, 0.0).passed);
        assert!(Measurement::flag("f", true).passed);
        assert!(!Measurement::flag("f", false).passed);
        assert!(Measurement::info("i", 5.696).passed);
    }

    #[test]
    fn non_finite_values_never_pass_asserting_kinds() {
        assert!(!Measurement::target("t", f64::NAN, 0.0, 1e9).passed);
        assert!(!Measurement::upper_bound("u", f64::INFINITY, f64::MAX, 0.0).passed);
        assert!(!Measurement::lower_bound("l", f64::NAN, f64::MIN, 0.0).passed);
    }

    #[test]
    fn report_passes_iff_every_measurement_passes() {
        let good = Measurement::flag("a", true);
        let bad = Measurement::flag("b", false);
        let r = VerificationReport::new(Suite::PhiDisk, vec![good.clone()], vec![], 0.0);
        assert!(r.passed);
        let r = VerificationReport::new(Suite::PhiDisk, vec![good, bad], vec![], 0.0);
        assert!(!r.passed);
        assert_eq!(r.failed_names(), vec!["b"]);
        let empty = VerificationReport::new(Suite::PhiDisk, vec![], vec![], 0.0);
        assert!(!empty.passed, "an empty report must not count as verified");
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let m = Measurement::target("max-abs-phi", 3.2e-11, 0.0, 1e-10).with_note("50 points");
        let r = VerificationReport::new(Suite::PhiDisk, vec![m], vec!["phi.csv".into()], 1.25);
        let text = r.to_json();
        let back = VerificationReport::from_json(&text).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn csv_cells_quote_delimiters_and_round_trip_floats() {
        assert_eq!(csv_quote("plain"), "plain");
        assert_eq!(csv_quote("a,b"), "\"a,b\"");
        assert_eq!(csv_quote("q\"q"), "\"q\"\"q\"");
        let x = 0.1 + 0.2;
        let parsed: f64 = full_precision(x).parse().unwrap();
        assert_eq!(parsed, x);
    }
}
