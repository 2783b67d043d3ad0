//! Maps with identity boundary values that fail quasisymmetry or bilipschitz control.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::analysis::{bilipschitz_constant, qh_map_constants, qs_scan, resolved_ratio, DistortionEnvelope, QhOptions, ScanOptions};
use crate::error::Result;
use crate::geometry::{sample_net, Bounds, DomainSpec, MapSpec, Point};

use super::samples::SampleSpec;
use super::{Check, Comparator, Scenario};

/// Parameters shared by the three counterexamples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CounterexampleOptions {
    /// Base spacing of boundary and lattice samples.
    pub h: f64,
    /// Number of halvings of `h` for the divergence check.
    pub levels: u32,
    /// Minimal growth per level that counts as divergence, and maximal growth that counts as stable.
    pub growth_factor: f64,
    pub budget: u64,
    pub seed: u64,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self { h: 0.2, levels: 3, growth_factor: 2.0, budget: 20_000_000, seed: 0 }
    }
}

fn boundary_residual(f: &MapSpec<f64>, pts: &[Point<f64>]) -> Result<f64> {
    let y = f.apply_all(pts)?;
    Ok(pts.iter().zip(&y).map(|(a, b)| a.dist(b)).fold(0.0, f64::max))
}

/// Envelope growth over the ratios resolved by the coarser sample.
fn growth(fine: &(DistortionEnvelope<f64>, f64), coarse: &(DistortionEnvelope<f64>, f64)) -> f64 {
    fine.0.growth_within(&coarse.0, 1.0 / coarse.1, coarse.1).unwrap_or(f64::NAN)
}

fn circle_count(radius: f64, h: f64) -> usize {
    ((std::f64::consts::TAU * radius / h).ceil() as usize).max(8)
}

/// Inversion of the unit disk onto the exterior: identity on the circle while
/// triple ratios near the center blow up as the sample is refined.
pub fn inversion_of_disk(o: &CounterexampleOptions) -> Result<Scenario> {
    let f = MapSpec::inversion_at_origin(2);
    let mut sc = Scenario::new("counterexample_disk_inversion").bind("map", "x/|x|²").bind("domain", "ball(0, 1)").bind("h", o.h).bind("levels", o.levels);
    let n0 = circle_count(1.0, o.h);
    let finest = SampleSpec::circle(1.0, n0 << o.levels).generate(0)?;
    sc.check(Check::new("boundary_identity", "max |u(z) - z| on the unit circle", boundary_residual(&f, &finest)?, Comparator::Le, 1e-12, 0.0));

    let opts = ScanOptions { budget: o.budget, seed: o.seed };
    let mut envs = Vec::new();
    for l in 0..=o.levels {
        // probes approach the center, whose image is the point at infinity
        let r = 0.5 * 0.25f64.powi(l as i32);
        let mut pts = SampleSpec::circle(1.0, n0 << l).generate(0)?;
        pts.extend(SampleSpec::circle(r, 4).generate(0)?);
        let env = qs_scan(&f, &pts, None, opts)?;
        envs.push((env, resolved_ratio(&pts)?));
    }
    let mut min_growth = f64::INFINITY;
    for (l, w) in envs.windows(2).enumerate() {
        let g = growth(&w[1], &w[0]);
        sc.notes.push(format!("growth from level {l} to {}: {g:.4}", l + 1));
        min_growth = min_growth.min(g);
    }
    sc.check(Check::new("growth_per_level", "smallest envelope growth between consecutive levels", min_growth, Comparator::Ge, o.growth_factor, 0.0));
    let total = growth(&envs[envs.len() - 1], &envs[0]);
    sc.check(Check::new("growth_total", "envelope growth from the coarsest to the finest level", total, Comparator::Ge, 50.0, 0.0));
    Ok(sc)
}

/// The radial squaring map of the disk: identity on the circle, stable triple
/// ratios, unbounded bilipschitz constant at the center.
pub fn radial_power(o: &CounterexampleOptions) -> Result<Scenario> {
    let f = MapSpec::RadialPower { alpha: 2.0 };
    let mut sc = Scenario::new("counterexample_radial_power").bind("map", "|x| x").bind("domain", "ball(0, 1)").bind("h", o.h);
    let circle = SampleSpec::circle(1.0, circle_count(1.0, o.h / 8.0)).generate(0)?;
    sc.check(Check::new("boundary_identity", "max |f(z) - z| on the unit circle", boundary_residual(&f, &circle)?, Comparator::Le, 1e-12, 0.0));

    let disk = DomainSpec::unit_disk();
    let opts = ScanOptions { budget: o.budget, seed: o.seed };
    let coarse = SampleSpec::Lattice { domain: disk.clone(), h: o.h }.generate(0)?;
    let fine = SampleSpec::Lattice { domain: disk, h: o.h / 2.0 }.generate(0)?;
    let ec = (qs_scan(&f, &coarse, None, opts)?, resolved_ratio(&coarse)?);
    let ef = (qs_scan(&f, &fine, None, opts)?, resolved_ratio(&fine)?);
    sc.check(Check::new("envelope_finite", "largest triple-ratio image over all buckets", ef.0.max_sup().unwrap_or(f64::NAN), Comparator::Lt, f64::INFINITY, 0.0));
    let g = growth(&ef, &ec);
    sc.check(Check::new("envelope_stable", "envelope growth under h → h/2", g, Comparator::Lt, o.growth_factor, 0.0));

    let mut pts = coarse;
    pts.extend(SampleSpec::circle(1e-2, 16).generate(0)?);
    let l = bilipschitz_constant(&f, &pts)?;
    sc.check(Check::new("bilipschitz_blowup", "bilipschitz constant with inner radius 1e-2", l.value, Comparator::Ge, 50.0, 0.0));
    sc.reports.push(l);
    Ok(sc)
}

/// Inversion on the complement of the upper unit semicircle: the arc is fixed,
/// quasihyperbolic distortion stays finite, but distances near the center are not bilipschitz.
pub fn inversion_of_arc_complement(o: &CounterexampleOptions) -> Result<Scenario> {
    let f = MapSpec::inversion_at_origin(2);
    let (start, end) = (0.0, std::f64::consts::PI);
    let domain = DomainSpec::ArcComplement { start, end };
    let mut sc = Scenario::new("counterexample_arc_inversion").bind("map", "x/|x|²").bind("domain", domain.label()).bind("h", o.h);
    let window = Bounds::new(Point::new2(-3.0, -3.0), Point::new2(3.0, 3.0))?;
    let arc = domain.boundary_samples(o.h / 8.0, &window);
    sc.check(Check::new("arc_fixed", "max |u(s) - s| on the arc", boundary_residual(&f, &arc)?, Comparator::Le, 1e-12, 0.0));
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let recip = MapSpec::MobiusPlane { a: zero, b: one, c: one, d: zero };
    let moved = boundary_residual(&recip, &arc)?;
    sc.notes.push(format!("z ↦ 1/z moves arc points by up to {moved:.6}; the fixed-arc check uses x/|x|²"));
    if moved > 1e-12 {
        sc.flags.push("reciprocal map does not fix the arc".into());
    }

    let net = sample_net(&domain, o.h, &window, o.seed)?;
    let q = qh_map_constants(&f, &net, &net, QhOptions { probes: 80, seed: o.seed, cqh_slack: 1.0 })?;
    sc.check(Check::new("qh_finite", "quasihyperbolic distortion M̂ on net probes", q.value, Comparator::Lt, f64::INFINITY, 0.0));
    sc.reports.push(q);

    let inner = SampleSpec::circle(0.08, 16).generate(0)?;
    let l = bilipschitz_constant(&f, &inner)?;
    sc.check(Check::new("bilipschitz_blowup", "bilipschitz constant on a circle of radius 0.08 about the center", l.value, Comparator::Ge, 100.0, 0.0));
    sc.reports.push(l);
    Ok(sc)
}

/// The three counterexamples in a fixed order.
pub fn run_counterexamples(o: &CounterexampleOptions) -> Result<Vec<Scenario>> {
    Ok(vec![inversion_of_disk(o)?, radial_power(o)?, inversion_of_arc_complement(o)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn all_three_pass_with_defaults() {
        let v = run_counterexamples(&CounterexampleOptions::default()).unwrap();
        assert_eq!(v.len(), 3);
        for s in v {
            let s = s.finish(&BTreeMap::new());
            assert!(s.pass, "{}: {:?} {:?}", s.name, s.failing().collect::<Vec<_>>(), s.notes);
        }
    }
}
