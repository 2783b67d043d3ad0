//! Scenario names, descriptions and dispatch from declarative requests.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::analysis::ScanOptions;
use crate::error::{Error, Result};
use crate::geometry::{sample_net, Bounds, DomainSpec, MapSpec, Point};
use crate::ratio::ControlFunction;

use super::counterexamples::{run_counterexamples, CounterexampleOptions};
use super::lemmas::{run_boundary_bounds, run_diam_lemma, run_invariant_suites, run_local_ratio, InvariantOptions};
use super::samples::SampleSpec;
use super::three_point::{run_boundary_three_point, run_three_point_necessity, run_three_point_pair, run_three_point_sufficiency};
use super::Scenario;

/// Registered scenarios with one-line descriptions, sorted by name.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("run_boundary_bounds", "boundary distance bounds M1, M2 from fitted L, C, theta1, with the boundary witness search"),
    ("run_counterexamples", "disk inversion, radial squaring and arc-complement inversion: identity boundary values without control"),
    ("run_diam_lemma", "diameter of a bounded domain equals that of its boundary; a third boundary point at diam/6"),
    ("run_invariant_suites", "k >= j >= |log d(x)/d(y)|, local quasihyperbolic sandwich, cross-ratio bound, visual metametric sandwich"),
    ("run_local_ratio", "local distance-to-boundary ratio constant, finite and stable under refinement"),
    ("run_three_point_boundary", "quasimobius to quasisymmetric with the three-point constant taken over boundary triples"),
    ("run_three_point_necessity", "quasisymmetric to quasimobius, three-point constant and diam/6 image separation"),
    ("run_three_point_pair", "necessity and sufficiency on one sample with a shared three-point constant"),
    ("run_three_point_sufficiency", "quasimobius plus three-point condition to quasisymmetric"),
];

/// One line per registered scenario: name, two spaces, description.
pub fn list_scenarios() -> String {
    SCENARIOS.iter().map(|(n, d)| format!("{n}  {d}\n")).collect()
}

/// Values used when a request leaves them out.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RunDefaults {
    pub seed: u64,
    pub mesh: Option<f64>,
    pub budget: Option<u64>,
}

/// A scenario invocation; absent fields take scenario-specific defaults.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioRequest {
    pub name: String,
    pub domain: Option<DomainSpec<f64>>,
    /// Domains for the diameter scenario.
    pub domains: Option<Vec<DomainSpec<f64>>>,
    pub image_domain: Option<DomainSpec<f64>>,
    pub map: Option<MapSpec<f64>>,
    pub samples: Option<SampleSpec>,
    /// Second, finer sample for refinement comparisons.
    pub fine_samples: Option<SampleSpec>,
    pub boundary: Option<SampleSpec>,
    pub eta: Option<ControlFunction<f64>>,
    pub theta: Option<ControlFunction<f64>>,
    /// Sampling window for nets of unbounded domains.
    pub window: Option<Bounds<f64>>,
    pub mesh: Option<f64>,
    pub budget: Option<u64>,
    pub seed: Option<u64>,
    pub levels: Option<u32>,
    pub refine_levels: Option<usize>,
    pub growth_factor: Option<f64>,
    pub mu: Option<f64>,
    pub invariants: Option<InvariantOptions>,
    /// Tolerance overrides keyed by check id.
    pub tolerances: BTreeMap<String, f64>,
}

impl ScenarioRequest {
    pub fn named(name: &str) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.iter().any(|(n, _)| *n == self.name) {
            return Err(Error::Argument(format!("unknown scenario `{}`", self.name)));
        }
        for (what, v) in [("mesh", self.mesh), ("growth_factor", self.growth_factor), ("mu", self.mu)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Argument(format!("{what} must be positive, got {v}")));
                }
            }
        }
        if let Some(d) = &self.domain {
            d.validate()?;
        }
        if let Some(d) = &self.image_domain {
            d.validate()?;
        }
        if let Some(m) = &self.map {
            m.validate()?;
        }
        for f in self.eta.iter().chain(&self.theta) {
            f.validate()?;
        }
        Ok(())
    }
}

fn unit_square() -> DomainSpec<f64> {
    DomainSpec::Rectangle { lo: Point::new2(0.0, 0.0), hi: Point::new2(1.0, 1.0) }
}

fn disk(r: f64) -> DomainSpec<f64> {
    DomainSpec::Ball { center: Point::new2(0.0, 0.0), radius: r }
}

fn exterior(r: f64) -> DomainSpec<f64> {
    DomainSpec::BallExterior { center: Point::new2(0.0, 0.0), radius: r }
}

fn window_for(req: &ScenarioRequest, domain: &DomainSpec<f64>) -> Result<Bounds<f64>> {
    req.window
        .or_else(|| domain.bounding_box())
        .ok_or_else(|| Error::Argument(format!("{} is unbounded; give a sampling window", domain.label())))
}

/// Runs a request and applies its tolerance overrides; multi-part scenarios return several results.
pub fn run_request(req: &ScenarioRequest, defaults: &RunDefaults) -> Result<Vec<Scenario>> {
    req.validate()?;
    let seed = req.seed.unwrap_or(defaults.seed);
    let mesh = req.mesh.or(defaults.mesh);
    let budget = req.budget.or(defaults.budget);
    let scan = ScanOptions { budget: budget.unwrap_or(ScanOptions::default().budget), seed };
    let map = req.map.clone().unwrap_or(MapSpec::Identity);
    let samples = |default: SampleSpec| req.samples.clone().unwrap_or(default).generate(seed);
    let square_boundary = || SampleSpec::Boundary { domain: unit_square(), h: mesh.unwrap_or(0.05) };

    let out = match req.name.as_str() {
        "run_three_point_necessity" => vec![run_three_point_necessity(&map, &samples(square_boundary())?, req.eta.as_ref(), scan, None)?],
        "run_three_point_sufficiency" => vec![run_three_point_sufficiency(&map, &samples(square_boundary())?, req.theta.as_ref(), scan, None)?],
        "run_three_point_pair" => run_three_point_pair(&map, &samples(square_boundary())?, req.eta.as_ref(), req.theta.as_ref(), scan)?,
        "run_three_point_boundary" => {
            let one = Complex::new(1.0, 0.0);
            let c = Complex::new(0.2, 0.0);
            let map = req.map.clone().unwrap_or(MapSpec::MobiusPlane { a: one, b: c, c, d: one });
            let interior = samples(SampleSpec::annulus(0.2, 0.9, 30))?;
            let boundary = req.boundary.clone().unwrap_or(SampleSpec::circle(1.0, 60)).generate(seed)?;
            vec![run_boundary_three_point(&map, &interior, &boundary, req.theta.as_ref(), scan)?]
        }
        "run_diam_lemma" => {
            let needle = DomainSpec::Rectangle { lo: Point::new2(0.0, 0.0), hi: Point::new2(1.0, 1e-3) };
            let domains = req.domains.clone().or_else(|| req.domain.clone().map(|d| vec![d])).unwrap_or_else(|| vec![disk(1.0), unit_square(), needle]);
            let levels = req.refine_levels.unwrap_or(5);
            let mut v = Vec::new();
            for d in &domains {
                d.validate()?;
                let b = d.bounding_box().ok_or_else(|| Error::Argument(format!("{} is unbounded", d.label())))?;
                let short = (0..b.dim()).map(|i| b.extent(i)).fold(f64::INFINITY, f64::min);
                let h = mesh.unwrap_or(0.02).min(short);
                v.push(run_diam_lemma(d, h, levels, seed)?);
            }
            v
        }
        "run_counterexamples" => {
            let base = CounterexampleOptions::default();
            let o = CounterexampleOptions {
                h: mesh.unwrap_or(base.h),
                levels: req.levels.unwrap_or(base.levels),
                growth_factor: req.growth_factor.unwrap_or(base.growth_factor),
                budget: budget.unwrap_or(base.budget),
                seed,
            };
            run_counterexamples(&o)?
        }
        "run_invariant_suites" => {
            let domain = req.domain.clone().unwrap_or_else(|| disk(1.0));
            let net = sample_net(&domain, mesh.unwrap_or(0.05), &window_for(req, &domain)?, seed)?;
            let mut o = req.invariants.unwrap_or_default();
            o.seed = seed;
            if let Some(b) = budget {
                o.delta_budget = b;
            }
            vec![run_invariant_suites(&net, &o)?]
        }
        "run_boundary_bounds" => {
            let map = req.map.clone().unwrap_or(MapSpec::inversion_at_origin(2));
            let domain = req.domain.clone().unwrap_or_else(|| exterior(2.0));
            let image = req.image_domain.clone().unwrap_or_else(|| disk(0.5));
            let interior = samples(SampleSpec::annulus(2.05, 3.5, 60))?;
            let boundary = req.boundary.clone().unwrap_or(SampleSpec::circle(2.0, 200)).generate(seed)?;
            vec![run_boundary_bounds(&map, &domain, &image, &interior, &boundary, scan)?]
        }
        "run_local_ratio" => {
            let map = req.map.clone().unwrap_or(MapSpec::inversion_at_origin(2));
            let domain = req.domain.clone().unwrap_or_else(|| exterior(1.0));
            let image = req.image_domain.clone().unwrap_or_else(|| disk(1.0));
            let h = mesh.unwrap_or(0.2);
            let lattice = |h: f64| -> Result<Vec<Point<f64>>> {
                let pts = SampleSpec::Lattice { domain: disk(3.0), h }.generate(seed)?;
                Ok(pts.into_iter().filter(|p| domain.boundary_distance(p).map_or(false, |d| d >= h / 4.0)).collect())
            };
            let coarse = match &req.samples {
                Some(s) => s.generate(seed)?,
                None => lattice(h)?,
            };
            let fine = match &req.fine_samples {
                Some(s) => s.generate(seed)?,
                None => lattice(h / 2.0)?,
            };
            vec![run_local_ratio(&map, &domain, &image, &coarse, &fine, req.mu.unwrap_or(0.25), req.growth_factor.unwrap_or(2.0))?]
        }
        other => return Err(Error::Argument(format!("unknown scenario `{other}`"))),
    };
    Ok(out.into_iter().map(|s| s.bind("seed", seed).finish(&req.tolerances)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_is_sorted_and_complete() {
        let names: Vec<&str> = SCENARIOS.iter().map(|s| s.0).collect();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        assert_eq!(names, sorted);
        let text = list_scenarios();
        assert!(text.contains("run_diam_lemma") && text.contains("run_three_point_necessity"));
        assert_eq!(text, list_scenarios());
    }

    #[test]
    fn requests_validate_and_dispatch() {
        assert!(run_request(&ScenarioRequest::named("nope"), &RunDefaults::default()).is_err());
        let bad = ScenarioRequest { mesh: Some(-1.0), ..ScenarioRequest::named("run_diam_lemma") };
        assert!(run_request(&bad, &RunDefaults::default()).is_err());
        let req = ScenarioRequest { domains: Some(vec![DomainSpec::unit_disk()]), mesh: Some(0.05), ..ScenarioRequest::named("run_diam_lemma") };
        let a = run_request(&req, &RunDefaults { seed: 4, ..RunDefaults::default() }).unwrap();
        let b = run_request(&req, &RunDefaults { seed: 4, ..RunDefaults::default() }).unwrap();
        assert_eq!(a, b);
        assert!(a[0].pass);
    }

    #[test]
    fn request_parses_from_json() {
        let s = r#"{"name":"run_three_point_pair","map":{"kind":"similarity","scale":2.0,"rotation":0.0,"translation":null},
                   "eta":{"kind":"linear_scale","params":1.0},"theta":{"kind":"linear_scale","params":1.0},"tolerances":{"lambda":0.0}}"#;
        let r: ScenarioRequest = serde_json::from_str(s).unwrap();
        let v = run_request(&r, &RunDefaults::default()).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|s| s.pass));
        assert!(serde_json::from_str::<ScenarioRequest>(r#"{"name":"x","bogus":1}"#).is_err());
    }
}
