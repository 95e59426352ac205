//! The acceptance suite: eleven numbered criteria, each reported as one
//! pass/fail line.

mod criteria;
mod oracle;
mod properties;

use std::fmt;

use serde::Serialize;

use crate::report::Check;

pub use oracle::NormOracle;
pub use properties::MIN_CASES;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(passed: bool, detail: String) -> Self {
        Outcome { passed, detail }
    }

    fn from_check(check: &Check, summary: String) -> Self {
        let detail = match check.witnesses.first() {
            Some(w) => format!("{summary}; {} of {} failed, e.g. {w}", check.failures, check.cases),
            None => summary,
        };
        Outcome { passed: check.passed(), detail }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} [{verdict}] {}: {}", self.id, self.title, self.detail)
    }
}

type Runner = fn(u64) -> crate::Result<Outcome>;

const CRITERIA: [(u8, &str, Runner); 11] = [
    (1, "cylinder norm formula", criteria::cylinder_norm_formula),
    (2, "entropy of the generating partition", criteria::entropy_generating_partition),
    (3, "entropy of the coarse partition", criteria::entropy_coarse_partition),
    (4, "shift invariance", criteria::shift_invariance),
    (5, "point norms and negligible points", criteria::negligible_points),
    (6, "measure entropy below topological entropy", criteria::measure_below_topological),
    (7, "interval function decay", criteria::pathology_decay),
    (8, "norm oracle equivalence", criteria::norm_oracle),
    (9, "isomorphy and conjugacy round trip", criteria::iso_conjugacy_round_trip),
    (10, "spectral condition extraction", criteria::spectral_extraction),
    (11, "axiom and property suites", properties::outcome),
];

pub const CRITERION_COUNT: u8 = CRITERIA.len() as u8;

/// Run criterion `id` (1-based); errors count as failures.
pub fn run_criterion(id: u8, seed: u64) -> Option<CriterionResult> {
    let &(id, title, run) = CRITERIA.iter().find(|c| c.0 == id)?;
    let (passed, detail) = match run(seed) {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CriterionResult { id, title, passed, detail })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, seed)).collect()
}

/// The property suites in full, for callers wanting per-suite counts.
pub fn property_report(seed: u64) -> crate::Result<crate::report::Report> {
    properties::run(seed)
}
