//! Scenarios for diameters, metric inequalities and boundary distance control.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    bilipschitz_constant, boundary_distance_bounds, local_ratio_scan, qs_scan, uniformly_perfect_estimate, BoundaryConstants, PerfectOptions,
    ScanOptions,
};
use crate::error::{Error, Result};
use crate::geometry::{diameter, sample_net_with, separated_third_point, DomainSpec, MapSpec, NetOptions, Point, SampledDomain};
use crate::metrics::{delta_at_base, delta_estimate, j_distance, visual_data, visual_epsilon, QhGraph};
use crate::ratio::{bk_ratio, theta0, Tuple4};

use super::{Check, Comparator, Scenario};

/// Diameter equalities and the `diam/6` separation on a bounded domain.
pub fn run_diam_lemma(domain: &DomainSpec<f64>, h: f64, refine_levels: usize, seed: u64) -> Result<Scenario> {
    let bounds = domain.bounding_box().ok_or_else(|| Error::Precondition(format!("{} is unbounded", domain.label())))?;
    let opts = NetOptions { refine_levels, ..NetOptions::default() };
    let net = sample_net_with(domain, h, &bounds, seed, &opts)?;
    let bd = &net.boundary_samples;
    let db = diameter(bd)?;
    let dn = diameter(&net.net)?;
    let mut sc = Scenario::new("run_diam_lemma").bind("domain", domain.label()).bind("h", h).bind("net_points", net.len()).bind("seed", seed);
    sc.check(Check::new("diameter_gap", "|diam(boundary samples) - diam(net)| within 4h", (db - dn).abs(), Comparator::Le, 4.0 * h, 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = 100;
    let mut ok = 0usize;
    let mut worst = f64::INFINITY;
    for _ in 0..pairs {
        let a = rng.gen_range(0..bd.len());
        let mut b = rng.gen_range(0..bd.len() - 1);
        if b >= a {
            b += 1;
        }
        let z3 = separated_third_point(bd, &bd[a], &bd[b])?;
        let m = z3.dist(&bd[a]).min(z3.dist(&bd[b]));
        worst = worst.min(m / db);
        if m >= db / 6.0 - 2.0 * h {
            ok += 1;
        }
    }
    sc.check(Check::new("separation_pairs", "boundary pairs with a third point at ≥ diam/6 - 2h", ok as f64, Comparator::Ge, pairs as f64, 0.0));
    sc.notes.push(format!("smallest separation over diameter: {worst:.6}"));
    Ok(sc)
}

/// Sizes for [`run_invariant_suites`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InvariantOptions {
    /// Net points used as probes.
    pub probes: usize,
    /// Extra points placed within `d(x)/2` of the first probes.
    pub partners: usize,
    /// Random quadruples for the cross-ratio inequality; 0 disables the check.
    pub quadruples: u64,
    /// Four-point scan budget for the hyperbolicity estimate.
    pub delta_budget: u64,
    pub seed: u64,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        Self { probes: 100, partners: 100, quadruples: 100_000, delta_budget: 2_000_000, seed: 0 }
    }
}

/// Probe points of a net together with near partners, all attachable to the graph.
fn probes_with_partners(net: &SampledDomain<f64>, opts: &InvariantOptions) -> Result<(Vec<Point<f64>>, Vec<(usize, usize)>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let k = opts.probes.min(net.len());
    let mut idx = rand::seq::index::sample(&mut rng, net.len(), k).into_vec();
    idx.sort_unstable();
    let mut pts: Vec<Point<f64>> = idx.iter().map(|&i| net.net[i]).collect();
    let mut local = Vec::new();
    for p in 0..opts.partners.min(k) {
        let x = pts[p];
        let d = net.source.boundary_distance(&x)?;
        let t: f64 = rng.gen_range(0.05..=0.5);
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let y = x + Point::new2(a.cos(), a.sin()) * (t * d);
        if net.source.contains_point(&y) && (net.find(&y).is_some() || !net.attachment(&y)?.is_empty()) {
            local.push((p, pts.len()));
            pts.push(y);
        }
    }
    Ok((pts, local))
}

/// Metric inequalities on a connected net: `k ≥ j ≥ |log(d(x)/d(y))|`, the local
/// sandwich, the cross-ratio bound `⟨Q⟩ ≤ θ₀(τ(Q))` and the visual metametric sandwich.
pub fn run_invariant_suites(net: &SampledDomain<f64>, opts: &InvariantOptions) -> Result<Scenario> {
    let mut sc = Scenario::new("run_invariant_suites").bind("domain", net.source.label()).bind("h", net.mesh).bind("net_points", net.len()).bind("seed", opts.seed);
    let (pts, local) = probes_with_partners(net, opts)?;
    let table = QhGraph::new(net).table(&pts)?;
    let d: Vec<f64> = pts.iter().map(|p| net.source.boundary_distance(p)).collect::<Result<_>>()?;
    let n = pts.len();
    let (mut kj, mut jl) = (f64::INFINITY, f64::INFINITY);
    let mut pairs = 0u64;
    for i in 0..n {
        for k in i + 1..n {
            let j = j_distance(&net.source, &pts[i], &pts[k])?;
            kj = kj.min(table.get(i, k) - j);
            jl = jl.min(j - (d[i] / d[k]).ln().abs());
            pairs += 1;
        }
    }
    if pairs == 0 {
        sc.no_data = true;
    } else {
        sc.check(Check::new("k_ge_j", "min over pairs of k̂ - j", kj, Comparator::Ge, 0.0, 0.0));
        sc.check(Check::new("j_ge_log", "min over pairs of j - |log(d(x)/d(y))|", jl, Comparator::Ge, 0.0, 0.0));
    }
    sc.notes.push(format!("{pairs} probe pairs"));

    // every pair with |x - y| ≤ d(x)/2, in either order
    let (mut lower, mut upper, mut near) = (f64::INFINITY, 0.0f64, 0usize);
    for i in 0..n {
        for k in 0..n {
            let r = pts[i].dist(&pts[k]);
            if i == k || r == 0.0 || r > 0.5 * d[i] {
                continue;
            }
            near += 1;
            let t = r / d[i];
            let kk = table.get(i, k);
            lower = lower.min(kk / (0.5 * t));
            upper = upper.max(kk / (2.0 * t * (1.0 + 4.0 * net.mesh / d[i])));
        }
    }
    if near == 0 {
        sc.no_data = true;
    } else {
        sc.check(Check::new("local_lower", "min k̂ / (|x-y| / 2d(x)) over near pairs", lower, Comparator::Gt, 1.0, 0.0));
        sc.check(Check::new("local_upper", "max k̂ / (2|x-y|/d(x) · (1 + 4h/d(x))) over near pairs", upper, Comparator::Le, 1.0, 0.0));
    }
    sc.notes.push(format!("{near} near pairs from {} partners", local.len()));

    if opts.quadruples == 0 {
        sc.no_data = true;
        sc.notes.push("quadruple budget is zero".into());
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
        let mut worst = 0.0f64;
        let mut used = 0u64;
        for _ in 0..opts.quadruples {
            let q: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..net.len()));
            let Ok(t) = Tuple4::finite(net.net[q[0]], net.net[q[1]], net.net[q[2]], net.net[q[3]]) else { continue };
            let (Ok(b), Ok(tau)) = (bk_ratio(&t), crate::ratio::cross_ratio(&t)) else { continue };
            worst = worst.max(b / theta0(tau));
            used += 1;
        }
        if used == 0 {
            sc.no_data = true;
        } else {
            sc.check(Check::new("bk_theta0", "max ⟨Q⟩ / θ₀(τ(Q)) over random quadruples", worst, Comparator::Le, 1.0, 1e-12));
        }
        sc.notes.push(format!("{used} nondegenerate quadruples"));
    }

    if n >= 4 {
        let est = delta_estimate(&table, opts.delta_budget, opts.seed)?;
        let (dp, _) = delta_at_base(&table, 0);
        let delta = est.delta.max(dp);
        let eps = visual_epsilon(delta);
        let v = visual_data(&table, 0, eps)?;
        let (lo, hi) = v.sandwich_ratios();
        sc.check(Check::new("visual_lower", "max d/ρ over pairs", lo, Comparator::Le, 1.0, 1e-12));
        sc.check(Check::new("visual_upper", "max ρ/(2d) over pairs", hi, Comparator::Le, 1.0, 1e-12));
        sc = sc.bind("delta_hat", delta).bind("epsilon", eps);
    } else {
        sc.no_data = true;
    }
    Ok(sc)
}

/// Largest distance from a sample to its nearest neighbour.
fn spacing(points: &[Point<f64>]) -> f64 {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.dist(p)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Boundary distance bounds against `M₁ = 6Lθ₁(4C)` and `M₂`, with `L̂`, `Ĉ`, `θ̂₁`
/// fitted from the samples, plus the boundary witness search.
pub fn run_boundary_bounds(
    f: &MapSpec<f64>,
    domain: &DomainSpec<f64>,
    image_domain: &DomainSpec<f64>,
    interior: &[Point<f64>],
    boundary: &[Point<f64>],
    opts: ScanOptions,
) -> Result<Scenario> {
    let mut sc = Scenario::new("run_boundary_bounds")
        .bind("domain", domain.label())
        .bind("image_domain", image_domain.label())
        .bind("map", serde_json::to_string(f).unwrap_or_default())
        .bind("interior_points", interior.len())
        .bind("boundary_points", boundary.len());
    let l = bilipschitz_constant(f, boundary)?;
    let perfect = PerfectOptions { min_radius: Some(2.0 * spacing(boundary)), ..PerfectOptions::default() };
    let c = uniformly_perfect_estimate(boundary, &perfect)?;
    if !c.value.is_finite() {
        return Err(Error::Precondition("boundary samples are not uniformly perfect at the sampled scales".into()));
    }
    let all: Vec<Point<f64>> = interior.iter().chain(boundary).copied().collect();
    let a: Vec<usize> = (interior.len()..all.len()).collect();
    let theta1 = qs_scan(f, &all, Some(&a), opts)?.fit()?;
    let k = BoundaryConstants { l: l.value, c: c.value, theta1 };
    let r = boundary_distance_bounds(f, domain, image_domain, interior, boundary, Some(&k))?;
    let det = |key: &str| r.details.get(key).copied().unwrap_or(f64::NAN);
    sc.check(Check::new("m1", "M̂₁ against 6Lθ₁(4C)", det("M1_hat"), Comparator::Le, det("M1_bound"), 0.0));
    sc.check(Check::new("m2", "M̂₂ against the two-sided formula", det("M2_hat"), Comparator::Le, det("M2_bound"), 0.0));
    sc.check(Check::new("claim", "interior points with a boundary witness in [d/2C, 6d]", det("claim_found"), Comparator::Ge, det("claim_total"), 0.0));
    sc.flags.extend(r.flags.iter().cloned());
    sc.reports.extend([l, c, r]);
    Ok(sc)
}

/// The local ratio constant at two resolutions: finite at both, growth below `growth_factor`.
pub fn run_local_ratio(
    f: &MapSpec<f64>,
    domain: &DomainSpec<f64>,
    image_domain: &DomainSpec<f64>,
    coarse: &[Point<f64>],
    fine: &[Point<f64>],
    mu: f64,
    growth_factor: f64,
) -> Result<Scenario> {
    let a = local_ratio_scan(f, domain, image_domain, coarse, mu)?;
    let b = local_ratio_scan(f, domain, image_domain, fine, mu)?;
    let mut sc = Scenario::new("run_local_ratio").bind("domain", domain.label()).bind("image_domain", image_domain.label()).bind("mu", mu);
    sc.check(Check::new("finite", "local ratio constant at the finer resolution", b.value, Comparator::Lt, f64::INFINITY, 0.0));
    sc.check(Check::new("stable", "growth of the constant under refinement", b.value / a.value, Comparator::Lt, growth_factor, 0.0));
    sc.reports.extend([a, b]);
    Ok(sc)
}
