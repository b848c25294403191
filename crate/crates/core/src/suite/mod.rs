//! Seeded randomized property checks.
//!
//! Every check is a function of one trial: it draws inputs from the trial's
//! RNG, evaluates both sides of a claim and records the signed slack
//! (`margin`). Inequalities `lhs ≤ rhs` get `tol + rhs − lhs`, equalities get
//! `tol − |lhs − rhs|`. A check passes iff the worst margin over all trials is
//! nonnegative. A trial that errors counts as `−∞`.
//!
//! Each trial's stream is derived from `(suite seed, check id, trial index)`,
//! so results do not depend on scheduling. Counterexamples are captured by
//! replaying the worst trial with input recording switched on.

mod effects;
mod models;
mod observables;
mod registry;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::ensembles::{RngSeed, SeededRng};
use crate::error::{QmeError, Result};
use crate::linalg::ComplexMatrix;

pub use registry::{lookup, registry, suite_ids, CheckSpec};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_DIMS: [usize; 4] = [2, 3, 4, 5];
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: RngSeed = RngSeed(42);

/// A registered check together with its run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub id: String,
    pub description: String,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub tolerance: f64,
}

impl PropertyCheck {
    pub fn new(id: &str, trials: usize, dims: Vec<usize>, tolerance: f64) -> Result<Self> {
        let spec = lookup(id)?;
        validate_config(trials, &dims, tolerance)?;
        Ok(PropertyCheck {
            id: spec.id.to_string(),
            description: spec.description.to_string(),
            trials,
            dims,
            tolerance,
        })
    }

    pub fn with_defaults(id: &str) -> Result<Self> {
        Self::new(id, DEFAULT_TRIALS, DEFAULT_DIMS.to_vec(), DEFAULT_TOLERANCE)
    }
}

fn validate_config(trials: usize, dims: &[usize], tolerance: f64) -> Result<()> {
    if trials == 0 {
        return Err(QmeError::Config("trials must be at least 1".into()));
    }
    if dims.is_empty() {
        return Err(QmeError::Config("dims must not be empty".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(QmeError::Config(format!("dimensions must be at least 2, got {d}")));
    }
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(QmeError::Config(format!("tolerance must be positive, got {tolerance}")));
    }
    Ok(())
}

/// Outcome of one check.
///
/// `worst_margin` serializes as `null` when a trial errored (margin `−∞`) or
/// every trial was skipped (`+∞`).
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub passed: bool,
    pub worst_margin: f64,
    pub counterexample: Option<Value>,
    /// Wall time in seconds.
    pub elapsed: f64,
    pub trials: usize,
    pub skipped: usize,
}

impl CheckReport {
    /// Equality of everything except timing.
    pub fn same_outcome(&self, other: &CheckReport) -> bool {
        self.id == other.id
            && self.passed == other.passed
            && self.worst_margin.to_bits() == other.worst_margin.to_bits()
            && self.counterexample == other.counterexample
            && self.trials == other.trials
            && self.skipped == other.skipped
    }
}

/// Per-trial context handed to check functions.
pub struct Trial {
    rng: SeededRng,
    pub dim: usize,
    pub tol: f64,
    pub index: usize,
    margin: f64,
    skipped: Option<String>,
    recording: Option<Recording>,
}

#[derive(Default)]
struct Recording {
    inputs: Map<String, Value>,
    assertions: Vec<Value>,
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

impl Trial {
    fn new(seed: RngSeed, dim: usize, tol: f64, index: usize, recording: bool) -> Self {
        Trial {
            rng: seed.rng(),
            dim,
            tol,
            index,
            margin: f64::INFINITY,
            skipped: None,
            recording: recording.then(Recording::default),
        }
    }

    pub fn rng(&mut self) -> &mut SeededRng {
        &mut self.rng
    }

    /// Stores an input for the counterexample. No-op outside replay.
    pub fn record<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) {
        if let Some(rec) = &mut self.recording {
            let v = serde_json::to_value(value).unwrap_or_else(|e| json!(format!("<unserializable: {e}>")));
            rec.inputs.insert(name.to_string(), v);
        }
    }

    fn push(&mut self, what: &str, margin: f64, lhs: f64, rhs: f64) {
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.margin = self.margin.min(margin);
        if let Some(rec) = &mut self.recording {
            rec.assertions.push(json!({
                "assertion": what,
                "lhs": finite_or_null(lhs),
                "rhs": finite_or_null(rhs),
                "margin": finite_or_null(margin),
            }));
        }
    }

    /// `lhs ≤ rhs` with slack `tol`.
    pub fn le(&mut self, what: &str, lhs: f64, rhs: f64) {
        self.push(what, self.tol + (rhs - lhs), lhs, rhs);
    }

    /// `lhs ≥ rhs` with slack `tol`.
    pub fn ge(&mut self, what: &str, lhs: f64, rhs: f64) {
        self.push(what, self.tol + (lhs - rhs), lhs, rhs);
    }

    /// `|lhs − rhs| ≤ tol`.
    pub fn eq(&mut self, what: &str, lhs: f64, rhs: f64) {
        self.eq_within(what, lhs, rhs, self.tol);
    }

    pub fn eq_within(&mut self, what: &str, lhs: f64, rhs: f64, tol: f64) {
        self.push(what, tol - (lhs - rhs).abs(), lhs, rhs);
    }

    /// `lhs < rhs` by more than `tol`.
    pub fn gt_strict(&mut self, what: &str, lhs: f64, rhs: f64) {
        self.push(what, (lhs - rhs) - self.tol, lhs, rhs);
    }

    /// `max |lhs − rhs| ≤ tol` entrywise.
    pub fn close(&mut self, what: &str, lhs: &ComplexMatrix, rhs: &ComplexMatrix, tol: f64) {
        let d = if lhs.dim() == rhs.dim() {
            lhs.max_abs_diff(rhs)
        } else {
            f64::INFINITY
        };
        self.push(what, tol - d, d, 0.0);
    }

    /// `m ≥ 0` up to `tol` on the smallest eigenvalue.
    pub fn psd(&mut self, what: &str, m: &ComplexMatrix) -> Result<()> {
        let min = m.hermitian_part().hermitian_eig()?.min_eigenvalue();
        self.push(what, self.tol + min, min, 0.0);
        Ok(())
    }

    /// Records a raw margin (`≥ 0` means the claim holds).
    pub fn require(&mut self, what: &str, margin: f64) {
        self.push(what, margin, margin, 0.0);
    }

    /// Marks the trial as not applicable. Margins already recorded still count.
    pub fn skip(&mut self, reason: impl Into<String>) {
        let reason = reason.into();
        log::debug!("trial {} skipped: {reason}", self.index);
        self.skipped = Some(reason);
    }
}

struct TrialResult {
    margin: f64,
    skipped: bool,
}

fn trial_seed(seed: RngSeed, id: &str, index: usize) -> RngSeed {
    seed.derive(id, index as u64)
}

fn run_trial(spec: &CheckSpec, check: &PropertyCheck, seed: RngSeed, index: usize, recording: bool) -> (Trial, Option<QmeError>) {
    let dim = check.dims[index % check.dims.len()];
    let mut t = Trial::new(trial_seed(seed, spec.id, index), dim, check.tolerance, index, recording);
    let err = (spec.run)(&mut t).err();
    if err.is_some() {
        t.margin = f64::NEG_INFINITY;
    }
    (t, err)
}

/// Runs one check. Deterministic in `(check, seed)` apart from `elapsed`.
pub fn run_check(check: &PropertyCheck, seed: RngSeed) -> Result<CheckReport> {
    let spec = lookup(&check.id)?;
    validate_config(check.trials, &check.dims, check.tolerance)?;
    let start = Instant::now();
    let results: Vec<TrialResult> = (0..check.trials)
        .into_par_iter()
        .map(|i| {
            let (t, _) = run_trial(spec, check, seed, i, false);
            TrialResult {
                margin: t.margin,
                skipped: t.skipped.is_some() && t.margin == f64::INFINITY,
            }
        })
        .collect();

    let skipped = results.iter().filter(|r| r.skipped).count();
    let (worst_index, worst_margin) = results
        .iter()
        .enumerate()
        .fold((None, f64::INFINITY), |(wi, wm), (i, r)| {
            if r.margin < wm {
                (Some(i), r.margin)
            } else {
                (wi, wm)
            }
        });
    let passed = worst_margin >= 0.0;
    let counterexample = match (passed, worst_index) {
        (false, Some(i)) => Some(counterexample(spec, check, seed, i)),
        _ => None,
    };
    if !passed {
        log::warn!("{} failed with worst margin {worst_margin:e}", check.id);
    }
    Ok(CheckReport {
        id: check.id.clone(),
        passed,
        worst_margin,
        counterexample,
        elapsed: start.elapsed().as_secs_f64(),
        trials: check.trials,
        skipped,
    })
}

fn counterexample(spec: &CheckSpec, check: &PropertyCheck, seed: RngSeed, index: usize) -> Value {
    let (t, err) = run_trial(spec, check, seed, index, true);
    let rec = t.recording.unwrap_or_default();
    let mut v = json!({
        "trial": index,
        "dim": t.dim,
        "trial_seed": trial_seed(seed, spec.id, index).0,
        "inputs": Value::Object(rec.inputs),
        "assertions": rec.assertions,
    });
    if let Some(e) = err {
        v["error"] = json!(e.to_string());
    }
    v
}

/// Configuration shared by every check in a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub trials: usize,
    pub dims: Vec<usize>,
    pub tolerance: f64,
    pub seed: RngSeed,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: DEFAULT_TRIALS,
            dims: DEFAULT_DIMS.to_vec(),
            tolerance: DEFAULT_TOLERANCE,
            seed: DEFAULT_SEED,
        }
    }
}

impl SuiteConfig {
    pub fn check(&self, id: &str) -> Result<PropertyCheck> {
        PropertyCheck::new(id, self.trials, self.dims.clone(), self.tolerance)
    }
}

/// Runs the full registry (excluding the canary) in registry order.
pub fn run_all(trials: usize, dims: &[usize], seed: RngSeed) -> Result<Vec<CheckReport>> {
    run_suite(&SuiteConfig {
        trials,
        dims: dims.to_vec(),
        tolerance: DEFAULT_TOLERANCE,
        seed,
    })
}

pub fn run_suite(config: &SuiteConfig) -> Result<Vec<CheckReport>> {
    validate_config(config.trials, &config.dims, config.tolerance)?;
    let checks = suite_ids().map(|id| config.check(id)).collect::<Result<Vec<_>>>()?;
    checks.par_iter().map(|c| run_check(c, config.seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_ids_are_rejected() {
        assert!(matches!(PropertyCheck::with_defaults("no-such-id"), Err(QmeError::UnknownCheck(_))));
        let mut check = PropertyCheck::with_defaults("thm-2.2").unwrap();
        check.id = "no-such-id".into();
        assert!(matches!(run_check(&check, RngSeed(1)), Err(QmeError::UnknownCheck(_))));
    }

    #[test]
    fn empty_dims_are_rejected() {
        assert!(matches!(run_all(1, &[], RngSeed(1)), Err(QmeError::Config(_))));
        assert!(matches!(PropertyCheck::new("thm-2.2", 0, vec![2], 1e-9), Err(QmeError::Config(_))));
        assert!(matches!(PropertyCheck::new("thm-2.2", 1, vec![2], 0.0), Err(QmeError::Config(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let check = PropertyCheck::new("thm-2.2", 50, vec![2, 3], 1e-9).unwrap();
        let a = run_check(&check, RngSeed(7)).unwrap();
        let b = run_check(&check, RngSeed(7)).unwrap();
        assert!(a.same_outcome(&b));
        assert!(a.passed);
    }

    #[test]
    fn canary_fails_with_counterexample() {
        let check = PropertyCheck::new("canary", 20, vec![2, 3], 1e-9).unwrap();
        let report = run_check(&check, RngSeed(1)).unwrap();
        assert!(!report.passed);
        let cx = report.counterexample.expect("failing check carries a counterexample");
        assert!(cx["inputs"].get("a").is_some() && cx["inputs"].get("rho").is_some());
    }
}
