//! Runnable pass/fail verification scenarios assembled from the other modules.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::ConstantReport;

pub mod counterexamples;
pub mod lemmas;
pub mod registry;
pub mod samples;
pub mod three_point;

pub use counterexamples::{run_counterexamples, CounterexampleOptions};
pub use lemmas::{run_boundary_bounds, run_diam_lemma, run_invariant_suites, run_local_ratio, InvariantOptions};
pub use registry::{list_scenarios, run_request, RunDefaults, ScenarioRequest, SCENARIOS};
pub use samples::SampleSpec;
pub use three_point::{run_boundary_three_point, run_three_point_necessity, run_three_point_pair, run_three_point_sufficiency};

/// How a check compares its computed value with its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Le,
    Lt,
    Ge,
    Gt,
}

/// One numeric assertion of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Stable key, used for tolerance overrides.
    pub id: String,
    pub description: String,
    pub computed: f64,
    pub bound: f64,
    pub comparator: Comparator,
    /// Absolute slack added on the side of the bound.
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(id: &str, description: &str, computed: f64, comparator: Comparator, bound: f64, tolerance: f64) -> Self {
        let mut c = Self { id: id.into(), description: description.into(), computed, bound, comparator, tolerance, pass: false };
        c.evaluate();
        c
    }

    fn evaluate(&mut self) {
        let (v, b, t) = (self.computed, self.bound, self.tolerance);
        self.pass = match self.comparator {
            Comparator::Le => v <= b + t,
            Comparator::Lt => v < b + t,
            Comparator::Ge => v >= b - t,
            Comparator::Gt => v > b - t,
        };
    }

    pub fn set_tolerance(&mut self, t: f64) {
        self.tolerance = t;
        self.evaluate();
    }
}

/// Result of one scenario run: every check with both sides, and the conjunction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Human-readable descriptions of the domain, map and parameters used.
    pub bindings: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Set when some check ran on an empty data set and passed vacuously.
    pub no_data: bool,
    pub notes: Vec<String>,
    pub flags: Vec<String>,
    pub reports: Vec<ConstantReport>,
}

impl Scenario {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            bindings: BTreeMap::new(),
            checks: Vec::new(),
            pass: false,
            no_data: false,
            notes: Vec::new(),
            flags: Vec::new(),
            reports: Vec::new(),
        }
    }

    pub fn bind(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.bindings.insert(key.into(), value.to_string());
        self
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Applies tolerance overrides by check id and recomputes the pass flag.
    pub fn finish(mut self, tolerances: &BTreeMap<String, f64>) -> Self {
        for c in &mut self.checks {
            if let Some(&t) = tolerances.get(&c.id) {
                c.set_tolerance(t);
            }
        }
        if self.checks.is_empty() {
            self.no_data = true;
        }
        if self.no_data && !self.flags.iter().any(|f| f == "no data") {
            self.flags.push("no data".into());
        }
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
