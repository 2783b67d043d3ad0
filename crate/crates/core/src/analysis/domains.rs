//! Constants that depend on domain geometry: QH/CQH, uniformity, uniform
//! perfectness and boundary distance bounds.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::envelope::ConstantReport;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, MapSpec, Point, SampledDomain};
use crate::metrics::graph::{dijkstra_with_parents, path_to};
use crate::metrics::QhGraph;
use crate::ratio::{m1_bound, m2_bound, ControlFunction};
use crate::real::Real;

/// Settings for [`qh_map_constants`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QhOptions {
    /// Number of net points used as probes.
    pub probes: usize,
    pub seed: u64,
    /// Additive slack accepted when fitting `(M, C)`.
    pub cqh_slack: f64,
}

impl Default for QhOptions {
    fn default() -> Self {
        Self { probes: 120, seed: 0, cqh_slack: 1.0 }
    }
}

/// `M̂` and a fitted `(M, C)` pair comparing `k_{D'}(f x, f y)` with `k_D(x, y)` on probes of `net`.
///
/// Probes whose images leave `D'` or cannot be attached to `net_image` are dropped and counted.
pub fn qh_map_constants<T: Real>(f: &MapSpec<T>, net: &SampledDomain<T>, net_image: &SampledDomain<T>, opts: QhOptions) -> Result<ConstantReport> {
    if net.is_empty() || net_image.is_empty() {
        return Err(Error::Argument("empty net".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let want = opts.probes.min(net.len());
    let mut picks: Vec<usize> = sample(&mut rng, net.len(), want).into_vec();
    picks.sort_unstable();
    let mut src = Vec::new();
    let mut img = Vec::new();
    let mut snap_max = T::zero();
    let mut dropped = 0usize;
    for &i in &picks {
        let y = f.apply_finite(&net.net[i])?;
        let attachable = net_image.source.contains_point(&y) && (net_image.find(&y).is_some() || !net_image.attachment(&y)?.is_empty());
        if !attachable {
            dropped += 1;
            continue;
        }
        snap_max = snap_max.max(net_image.nearest(&y).1);
        src.push(net.net[i]);
        img.push(y);
    }
    if src.len() < 2 {
        return Err(Error::EmptyScan(format!("{} of {want} probes could not be placed in the image net", dropped)));
    }
    let k = QhGraph::new(net).table(&src)?;
    let kk = QhGraph::new(net_image).table(&img)?;
    let n = src.len();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (k.get(i, j), kk.get(i, j));
            if a > T::zero() && b > T::zero() {
                pairs.push((a.as_f64(), b.as_f64(), i, j));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::Degenerate("all probe pairs coincide".into()));
    }
    let (mut m, mut wi, mut wj) = (1.0f64, pairs[0].2, pairs[0].3);
    for &(a, b, i, j) in &pairs {
        let r = (b / a).max(a / b);
        if r > m {
            (m, wi, wj) = (r, i, j);
        }
    }
    let residual = |mm: f64| pairs.iter().map(|&(a, b, _, _)| (b - mm * a).max(a / mm - b)).fold(f64::NEG_INFINITY, f64::max);
    // geometric grid on [1, M̂]; M̂ itself has zero residual
    let steps = 200;
    let mut fit = (m, residual(m).max(0.0));
    for s in 0..=steps {
        let mm = m.powf(s as f64 / steps as f64);
        let c = residual(mm).max(0.0);
        if c <= opts.cqh_slack {
            fit = (mm, c);
            break;
        }
    }
    let mut rep = ConstantReport::new("qh_M", m)
        .with_witness(&[src[wi], src[wj]])
        .detail("cqh_M", fit.0)
        .detail("cqh_C", fit.1)
        .detail("cqh_slack", opts.cqh_slack)
        .detail("snap_max", snap_max.as_f64())
        .detail("probes_used", n as f64)
        .detail("probes_dropped", dropped as f64);
    rep.budget = want as u64;
    rep.seed = opts.seed;
    rep.mesh_h = Some(net.mesh.as_f64());
    Ok(rep)
}

/// Length and cigar ratios of one arc given as points with their boundary distances.
fn arc_ratios<T: Real>(pts: &[Point<T>], d: &[T]) -> (T, T) {
    let mut cum = vec![T::zero(); pts.len()];
    for k in 1..pts.len() {
        cum[k] = cum[k - 1] + pts[k].dist(&pts[k - 1]);
    }
    let total = cum[pts.len() - 1];
    let chord = pts[0].dist(&pts[pts.len() - 1]);
    let length = if chord > T::zero() { total / chord } else { T::one() };
    let cigar = (0..pts.len()).map(|k| cum[k].min(total - cum[k]) / d[k]).fold(T::zero(), T::max);
    (length, cigar)
}

fn uniform_report<T: Real>(results: Vec<Option<(T, T, Point<T>, Point<T>)>>) -> Result<ConstantReport> {
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let done: Vec<_> = results.into_iter().flatten().collect();
    if done.is_empty() {
        return Err(Error::EmptyScan("no pair could be joined in the net".into()));
    }
    let mut best = (T::zero(), 0usize);
    let (mut lmax, mut cmax) = (T::zero(), T::zero());
    for (k, r) in done.iter().enumerate() {
        lmax = lmax.max(r.0);
        cmax = cmax.max(r.1);
        if r.0.max(r.1) > best.0 {
            best = (r.0.max(r.1), k);
        }
    }
    let w = &done[best.1];
    Ok(ConstantReport::new("uniform_c", best.0.as_f64())
        .with_witness(&[w.2, w.3])
        .detail("length_ratio_max", lmax.as_f64())
        .detail("cigar_ratio_max", cmax.as_f64())
        .detail("pairs_used", done.len() as f64)
        .detail("pairs_skipped", skipped as f64))
}

/// `ĉ` over seeded pairs of net points, using Euclidean-shortest net paths as arcs.
pub fn uniform_constant_estimate<T: Real>(net: &SampledDomain<T>, pairs: usize, seed: u64) -> Result<ConstantReport> {
    if net.len() < 2 {
        return Err(Error::Argument("uniformity needs at least 2 net points".into()));
    }
    let g = QhGraph::euclidean(net);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: Vec<(usize, usize)> = (0..pairs)
        .map(|_| {
            let a = rng.gen_range(0..net.len());
            let mut b = rng.gen_range(0..net.len() - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect();
    let results = chosen
        .par_iter()
        .map(|&(a, b)| {
            let (_, parent) = dijkstra_with_parents(g.graph(), a, &[b]);
            let path = path_to(&parent, a, b)?;
            let pts: Vec<Point<T>> = path.iter().map(|&v| net.net[v]).collect();
            let d: Vec<T> = path.iter().map(|&v| net.dist[v]).collect();
            let (l, c) = arc_ratios(&pts, &d);
            Some((l, c, net.net[a], net.net[b]))
        })
        .collect();
    let mut rep = uniform_report(results)?;
    rep.budget = pairs as u64;
    rep.seed = seed;
    rep.mesh_h = Some(net.mesh.as_f64());
    Ok(rep)
}

/// `ĉ` over explicit pairs of domain points, which are attached to the net when needed.
pub fn uniform_constant_for_pairs<T: Real>(net: &SampledDomain<T>, pairs: &[(Point<T>, Point<T>)]) -> Result<ConstantReport> {
    let g = QhGraph::euclidean(net);
    let results = pairs
        .par_iter()
        .map(|(x, y)| -> Result<Option<(T, T, Point<T>, Point<T>)>> {
            let (_, pts) = match g.path(x, y) {
                Ok(p) => p,
                Err(Error::Unreachable { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let d: Vec<T> = pts.iter().map(|p| net.source.boundary_distance(p)).collect::<Result<_>>()?;
            let (l, c) = arc_ratios(&pts, &d);
            Ok(Some((l, c, *x, *y)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = uniform_report(results)?;
    rep.budget = pairs.len() as u64;
    rep.mesh_h = Some(net.mesh.as_f64());
    Ok(rep)
}

/// Settings for [`uniformly_perfect_estimate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerfectOptions {
    /// Indices of centers to test; all points when absent.
    pub centers: Option<Vec<usize>>,
    /// Smallest radius tested; half the minimal positive pairwise distance when absent.
    pub min_radius: Option<f64>,
    /// Largest `k` in the radii `diam · 2^{-k}`.
    pub max_depth: u32,
}

impl Default for PerfectOptions {
    fn default() -> Self {
        Self { centers: None, min_radius: None, max_depth: 40 }
    }
}

/// `Ĉ = sup r / max{|x - y| : |x - y| < r}` over centers and dyadic radii with points outside `B(x, r)`.
///
/// An empty punctured ball sets the `unbounded` flag; its center and radius are kept as details.
pub fn uniformly_perfect_estimate<T: Real>(points: &[Point<T>], opts: &PerfectOptions) -> Result<ConstantReport> {
    if points.len() < 2 {
        return Err(Error::Degenerate("uniform perfectness needs at least 2 points".into()));
    }
    let n = points.len();
    let pair_min = (0..n)
        .into_par_iter()
        .map(|i| points[i + 1..].iter().map(|q| q.dist(&points[i])).filter(|&d| d > T::zero()).fold(T::infinity(), T::min))
        .reduce(|| T::infinity(), T::min);
    if pair_min.is_infinite() {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let diam = crate::geometry::diameter(points)?;
    let min_radius = opts.min_radius.map(T::lit).unwrap_or(pair_min / T::lit(2.0));
    let centers: Vec<usize> = match &opts.centers {
        Some(c) => {
            if let Some(&bad) = c.iter().find(|&&i| i >= n) {
                return Err(Error::Argument(format!("center index {bad} out of range")));
            }
            c.clone()
        }
        None => (0..n).collect(),
    };
    // (ratio, center, radius, partner); ratio = ∞ marks an empty annulus
    let per_center: Vec<(T, usize, T, usize, u64)> = centers
        .par_iter()
        .map(|&c| {
            let mut dist: Vec<(T, usize)> = (0..n).filter(|&j| j != c).map(|j| (points[j].dist(&points[c]), j)).collect();
            dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            let far = dist.last().map_or(T::zero(), |d| d.0);
            let mut best = (T::zero(), c, T::zero(), c, 0u64);
            for k in 1..=opts.max_depth {
                let r = diam / T::lit(2f64.powi(k as i32));
                if r < min_radius {
                    break;
                }
                if !(far > r) {
                    continue;
                }
                best.4 += 1;
                let inside = dist.partition_point(|d| d.0 < r);
                let (m, j) = if inside == 0 { (T::zero(), c) } else { dist[inside - 1] };
                let ratio = if m > T::zero() { r / m } else { T::infinity() };
                if ratio > best.0 {
                    best = (ratio, c, r, j, best.4);
                }
            }
            best
        })
        .collect();
    let tested: u64 = per_center.iter().map(|b| b.4).sum();
    if tested == 0 {
        return Err(Error::EmptyScan("no center has points outside any tested radius".into()));
    }
    let w = per_center.iter().fold(per_center[0], |a, &b| if b.0 > a.0 { b } else { a });
    let mut rep = ConstantReport::new("uniformly_perfect_C", w.0.as_f64())
        .with_witness(&[points[w.1], points[w.3]])
        .detail("radius_at_witness", w.2.as_f64())
        .detail("min_radius", min_radius.as_f64())
        .detail("balls_tested", tested as f64);
    rep.budget = tested;
    if w.0.is_infinite() {
        rep.flags.push("unbounded".into());
    }
    Ok(rep)
}

/// Boundary data for [`boundary_distance_bounds`]: the fitted constants entering `M₁`, `M₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundaryConstants<T: Real> {
    /// Bilipschitz constant of `f` on the boundary.
    pub l: T,
    /// Uniform perfectness constant of the boundary.
    pub c: T,
    /// Quasisymmetry control of `f` relative to the boundary.
    pub theta1: ControlFunction<T>,
}

/// Empirical `M̂₁`, `M̂₂` for interior points `X` and boundary samples, compared with
/// the formula values when constants are supplied.
///
/// Details: `M1_hat`, `M2_hat`, `M1_bound`, `M2_bound`, `claim_found`, `claim_total`, `skipped`.
pub fn boundary_distance_bounds<T: Real>(
    f: &MapSpec<T>,
    domain: &DomainSpec<T>,
    image_domain: &DomainSpec<T>,
    x: &[Point<T>],
    boundary: &[Point<T>],
    constants: Option<&BoundaryConstants<T>>,
) -> Result<ConstantReport> {
    if boundary.is_empty() || x.is_empty() {
        return Err(Error::Argument("boundary bounds need interior points and boundary samples".into()));
    }
    let bimg = f.apply_all(boundary)?;
    let c_hat = constants.map(|k| k.c);
    let two = T::lit(2.0);
    // (M1 term, M2 term, claim satisfied, witness x, witness b)
    let rows: Vec<Option<(T, T, bool, usize, usize)>> = x
        .par_iter()
        .map(|p| -> Result<_> {
            let d = domain.boundary_distance(p)?;
            let (i0, r0) = boundary.iter().enumerate().map(|(k, b)| (k, b.dist(p))).fold((0, T::infinity()), |a, b| if b.1 < a.1 { b } else { a });
            if !(r0 <= two * d) {
                return Ok(None);
            }
            let y = f.apply_finite(p)?;
            let dy = image_domain.boundary_distance(&y)?;
            let m1 = (d / dy).max(y.dist(&bimg[i0]) / d);
            let mut m2 = (T::one(), i0);
            for (k, b) in boundary.iter().enumerate() {
                let (u, v) = (p.dist(b), y.dist(&bimg[k]));
                if u > T::zero() && v > T::zero() {
                    let q = (v / u).max(u / v);
                    if q > m2.0 {
                        m2 = (q, k);
                    }
                }
            }
            let claim = match c_hat {
                Some(c) => {
                    let lo = d / (two * c);
                    let hi = T::lit(6.0) * d;
                    boundary.iter().any(|b| {
                        let s = b.dist(&boundary[i0]);
                        s >= lo && s <= hi
                    })
                }
                None => true,
            };
            Ok(Some((m1, m2.0, claim, i0, m2.1)))
        })
        .collect::<Result<_>>()?;
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    let used: Vec<(usize, (T, T, bool, usize, usize))> = rows.into_iter().enumerate().filter_map(|(i, r)| r.map(|r| (i, r))).collect();
    if used.is_empty() {
        return Err(Error::EmptyScan("no interior point has a boundary sample within 2 d(x)".into()));
    }
    let (wi, w) = used.iter().fold(used[0], |a, &b| if b.1 .0 > a.1 .0 { b } else { a });
    let m2_hat = used.iter().map(|r| r.1 .1).fold(T::one(), T::max);
    let claim_found = used.iter().filter(|r| r.1 .2).count();
    let mut rep = ConstantReport::new("boundary_M1", w.0.as_f64())
        .with_witness(&[x[wi], boundary[w.3]])
        .detail("M1_hat", w.0.as_f64())
        .detail("M2_hat", m2_hat.as_f64())
        .detail("claim_found", claim_found as f64)
        .detail("claim_total", used.len() as f64)
        .detail("skipped", skipped as f64);
    rep.budget = (x.len() * boundary.len()) as u64;
    if let Some(k) = constants {
        let b1 = m1_bound(k.l, k.c, &k.theta1)?;
        let b2 = m2_bound(k.l, k.c, &k.theta1)?;
        rep = rep.detail("M1_bound", b1.as_f64()).detail("M2_bound", b2.as_f64()).detail("L", k.l.as_f64()).detail("C", k.c.as_f64());
        if w.0 > b1 {
            rep.flags.push("M1_exceeds_bound".into());
        }
        if m2_hat > b2 {
            rep.flags.push("M2_exceeds_bound".into());
        }
    }
    if skipped > 0 {
        rep.flags.push(format!("{skipped} centers without a boundary sample within 2 d(x)"));
    }
    Ok(rep)
}
