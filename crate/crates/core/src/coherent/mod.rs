//! Coherent LQG and H∞ analysis for annihilation-operator plants: Kalman
//! filter construction, the zero-gain property of physically realizable
//! plants, static LQG optimality and trivial-controller H∞ optimality.

mod kalman;
mod suite;
mod verify;

pub use kalman::{kalman_design, KalmanResult};
pub use suite::{
    corollary1_suite, random_challenger, random_pr_plant, random_unitary, theorem5_suite, theorem6_suite, SuiteSpec,
    SuiteSummary,
};
pub use verify::{
    lqg_cost, physical_loop, verify_static_lqg, verify_static_lqg_with, verify_trivial_hinf, verify_zero_gain,
    PhysicalLoop, StaticLqgOptions, ZERO_GAIN_TOL,
};

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremTag {
    /// Static controllers are LQG optimal.
    T5,
    /// The Kalman gain of a realizable plant is zero.
    C1,
    /// The trivial controller is H∞ optimal.
    T6,
}

impl TheoremTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremTag::T5 => "T5",
            TheoremTag::C1 => "C1",
            TheoremTag::T6 => "T6",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T5" => Some(TheoremTag::T5),
            "C1" => Some(TheoremTag::C1),
            "T6" => Some(TheoremTag::T6),
            _ => None,
        }
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
    /// The instance does not satisfy the theorem's hypotheses, so no
    /// verdict is given.
    HypothesisViolated,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::HypothesisViolated => "hypothesis-violated",
        }
    }
}

/// A named scalar. With a tolerance it is a deviation that must not exceed
/// it; without one it is informational.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
}

impl Evidence {
    pub fn bound(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance: Some(tolerance) }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, tolerance: None }
    }

    pub fn within(&self) -> bool {
        self.tolerance.is_none_or(|t| self.value <= t)
    }
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub theorem: TheoremTag,
    pub outcome: Outcome,
    pub evidence: Vec<Evidence>,
    /// Instances left out of the verdict, with the reason.
    pub skipped: Vec<String>,
    pub narrative: String,
}

impl TheoremReport {
    /// Report whose outcome follows from its evidence.
    pub(crate) fn from_evidence(
        theorem: TheoremTag,
        evidence: Vec<Evidence>,
        skipped: Vec<String>,
        narrative: String,
    ) -> Self {
        let outcome = if evidence.iter().all(Evidence::within) { Outcome::Holds } else { Outcome::Fails };
        Self { theorem, outcome, evidence, skipped, narrative }
    }

    pub(crate) fn violated(theorem: TheoremTag, narrative: impl Into<String>) -> Self {
        Self {
            theorem,
            outcome: Outcome::HypothesisViolated,
            evidence: Vec::new(),
            skipped: Vec::new(),
            narrative: narrative.into(),
        }
    }

    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn evidence(&self, name: &str) -> Option<f64> {
        self.evidence.iter().find(|e| e.name == name).map(|e| e.value)
    }
}
