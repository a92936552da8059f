//! Check reports and the tolerance set every check is graded against.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Between the pass tolerance and the fail threshold; rerun with a finer schedule.
    Gray,
    Skipped,
}

impl Verdict {
    /// `residual ≤ tol` passes, `residual > max(tol, fail_threshold)` fails.
    pub fn grade(residual: f64, tol: f64, fail_threshold: f64) -> Self {
        if residual.is_nan() {
            Verdict::Fail
        } else if residual <= tol {
            Verdict::Pass
        } else if residual > fail_threshold.max(tol) {
            Verdict::Fail
        } else {
            Verdict::Gray
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Gray => "gray",
            Verdict::Skipped => "skipped",
        })
    }
}

/// Outcome of one law or identity check at one witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cause: Option<String>,
    pub residual: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub sample: u64,
    pub witness: Value,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn graded(check: &str, residual: f64, tolerance: f64, fail_threshold: f64) -> Self {
        CheckReport {
            check: check.to_string(),
            verdict: Verdict::grade(residual, tolerance, fail_threshold),
            cause: None,
            residual,
            tolerance,
            seed: 0,
            sample: 0,
            witness: Value::Null,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn skipped(check: &str, cause: impl Into<String>, tolerance: f64) -> Self {
        CheckReport {
            verdict: Verdict::Skipped,
            cause: Some(cause.into()),
            ..Self::graded(check, 0.0, tolerance, tolerance)
        }
    }

    pub fn with_seed(mut self, seed: u64, sample: u64) -> Self {
        self.seed = seed;
        self.sample = sample;
        self
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = witness;
        self
    }

    pub fn metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Forces a fail regardless of the residual, keeping the stated cause.
    pub fn fail_because(mut self, cause: impl Into<String>) -> Self {
        self.verdict = Verdict::Fail;
        self.cause = Some(cause.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Canonical order: by check name, then sample index.
pub fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by(|a, b| a.check.cmp(&b.check).then(a.sample.cmp(&b.sample)));
}

/// Tolerances used across the crate. Every report records the value it was
/// graded against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identities that hold up to rounding (similarity, unitary, intertwining).
    pub algebraic: f64,
    /// Checks that depend on finite-difference derivatives.
    pub fd: f64,
    /// Residuals above this are failures; between tolerance and this, gray.
    pub fail_threshold: f64,
    pub direct_sum: f64,
    pub block_identity: f64,
    /// Similarity residual, already divided by `max(1, cond S)`, for
    /// Hermitian-preserving witnesses.
    pub real_similarity: f64,
    pub block_derivative: f64,
    pub fdiff_final: f64,
    /// Relative agreement of the block derivative at `r = 1` and `r = ½`.
    pub r_consistency: f64,
    /// Cauchy–Riemann residual when both sides are taken algebraically.
    pub cr_algebraic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-8,
            fd: 1e-5,
            fail_threshold: 1e-4,
            direct_sum: 1e-9,
            block_identity: 1e-9,
            real_similarity: 1e-7,
            block_derivative: 1e-6,
            fdiff_final: 1e-4,
            r_consistency: 1e-10,
            cr_algebraic: 1e-9,
        }
    }
}
