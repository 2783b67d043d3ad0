//! Discretization of a domain into a jittered, boundary-graded point net.
//!
//! The net starts from a jittered square grid of spacing `h` over the window.
//! Cells whose center is closer to the boundary than `whitney_ratio` cell sizes
//! are split dyadically (up to `refine_levels` times), so that near the boundary
//! the spacing shrinks in proportion to the distance. Every edge joins points
//! `a`, `b` with `|a - b| <= min(d(a), d(b)) / 4`.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::domain::{Bounds, DomainSpec};
use super::point::Point;
use crate::error::{Error, Result};
use crate::real::Real;

const MAX_NODES: usize = 4_000_000;

/// Tuning of the net construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
#[serde(default, deny_unknown_fields)]
pub struct NetOptions<T: Real> {
    /// A cell of size `s` is kept when its center has `d >= whitney_ratio * s`.
    pub whitney_ratio: T,
    /// Number of dyadic refinements below the base spacing.
    pub refine_levels: usize,
    /// Jitter amplitude as a fraction of the local cell size.
    pub jitter: T,
    /// Longest edge in units of the larger endpoint cell size.
    pub reach: T,
}

impl<T: Real> Default for NetOptions<T> {
    fn default() -> Self {
        Self { whitney_ratio: T::lit(12.0), refine_levels: 3, jitter: T::lit(0.1), reach: T::lit(3.3) }
    }
}

/// A discretized domain: net points, their boundary distances, an adjacency
/// graph and boundary samples.
#[derive(Clone, Debug)]
pub struct SampledDomain<T: Real> {
    pub source: DomainSpec<T>,
    pub bounds: Bounds<T>,
    /// Base spacing `h`.
    pub mesh: T,
    pub seed: u64,
    pub options: NetOptions<T>,
    pub net: Vec<Point<T>>,
    /// `d_D` at every net point.
    pub dist: Vec<T>,
    /// Cell size each net point was generated at.
    pub cell: Vec<T>,
    pub boundary_samples: Vec<Point<T>>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    lengths: Vec<T>,
    index: SpatialIndex<T>,
}

#[derive(Clone, Debug)]
struct SpatialIndex<T: Real> {
    origin: Point<T>,
    /// Bucket edge per level.
    bucket: Vec<T>,
    maps: Vec<HashMap<[i64; 3], Vec<u32>>>,
    level_of: Vec<u8>,
}

impl<T: Real> SpatialIndex<T> {
    fn key(&self, p: &Point<T>, level: usize) -> [i64; 3] {
        let b = self.bucket[level];
        let mut k = [0i64; 3];
        for (i, slot) in k.iter_mut().enumerate().take(p.dim()) {
            *slot = ((p.coord(i) - self.origin.coord(i)) / b).floor().to_i64().unwrap_or(i64::MAX);
        }
        k
    }

    /// Calls `f` with every indexed node of `level` whose bucket lies within `r` of `p`.
    fn scan(&self, p: &Point<T>, r: T, level: usize, mut f: impl FnMut(u32)) {
        let b = self.bucket[level];
        let span = (r / b).ceil().to_i64().unwrap_or(0);
        let k = self.key(p, level);
        let dim = p.dim();
        let z_range = if dim == 3 { -span..=span } else { 0..=0 };
        for dx in -span..=span {
            for dy in -span..=span {
                for dz in z_range.clone() {
                    let key = [k[0] + dx, k[1] + dy, k[2] + dz];
                    if let Some(v) = self.maps[level].get(&key) {
                        v.iter().for_each(|&j| f(j));
                    }
                }
            }
        }
    }
}

struct PendingNode<T: Real> {
    point: Point<T>,
    dist: T,
    level: usize,
}

/// Builds a net with default options; see [`sample_net_with`].
pub fn sample_net<T: Real>(domain: &DomainSpec<T>, h: T, bounds: &Bounds<T>, seed: u64) -> Result<SampledDomain<T>> {
    sample_net_with(domain, h, bounds, seed, &NetOptions::default())
}

pub fn sample_net_with<T: Real>(
    domain: &DomainSpec<T>,
    h: T,
    bounds: &Bounds<T>,
    seed: u64,
    opts: &NetOptions<T>,
) -> Result<SampledDomain<T>> {
    domain.validate()?;
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::Argument(format!("mesh must be positive, got {h}")));
    }
    if let Some(n) = domain.dim() {
        if n != bounds.dim() {
            return Err(Error::Argument(format!("{}-dimensional domain with {}-dimensional bounds", n, bounds.dim())));
        }
    }
    if !(opts.whitney_ratio >= T::lit(4.0)) {
        return Err(Error::Argument("whitney_ratio below 4 leaves same-level neighbours unconnected".into()));
    }
    let dim = bounds.dim();
    let counts: Vec<usize> = (0..dim).map(|i| (bounds.extent(i) / h).ceil().to_usize().unwrap_or(usize::MAX).max(1)).collect();
    let total: usize = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).unwrap_or(usize::MAX);
    if total > MAX_NODES {
        return Err(Error::Discretization(format!("{total} base cells exceed the limit of {MAX_NODES}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pending: Vec<PendingNode<T>> = Vec::new();
    let half = T::lit(0.5);
    let mut idx = vec![0usize; dim];
    'outer: loop {
        let mut c = bounds.lo;
        for i in 0..dim {
            c = c.with_coord(i, bounds.lo.coord(i) + (T::from_usize_lossy(idx[i]) + half) * h);
        }
        visit_cell(domain, bounds, opts, c, h, 0, &mut rng, &mut pending)?;
        for i in (0..dim).rev() {
            idx[i] += 1;
            if idx[i] < counts[i] {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    if pending.is_empty() {
        return Err(Error::Discretization(format!("no net point of spacing {h} fits in {} within the bounds", domain.label())));
    }

    let levels = opts.refine_levels + 1;
    let bucket: Vec<T> = (0..levels).map(|l| T::lit(4.0) * h / T::lit(2f64.powi(l as i32))).collect();
    let mut index = SpatialIndex { origin: bounds.lo, bucket, maps: vec![HashMap::new(); levels], level_of: Vec::with_capacity(pending.len()) };
    let mut net = Vec::with_capacity(pending.len());
    let mut dist = Vec::with_capacity(pending.len());
    let mut cell = Vec::with_capacity(pending.len());
    for (i, p) in pending.iter().enumerate() {
        let key = index.key(&p.point, p.level);
        index.maps[p.level].entry(key).or_default().push(i as u32);
        index.level_of.push(p.level as u8);
        net.push(p.point);
        dist.push(p.dist);
        cell.push(h / T::lit(2f64.powi(p.level as i32)));
    }

    let quarter = T::lit(0.25);
    let mut adjacency: Vec<Vec<(u32, T)>> = vec![Vec::new(); net.len()];
    for i in 0..net.len() {
        let li = index.level_of[i] as usize;
        let lo = li.saturating_sub(2);
        let hi = (li + 2).min(levels - 1);
        for m in lo..=hi {
            let sm = h / T::lit(2f64.powi(m as i32));
            let r = (opts.reach * sm.max(cell[i])).min(dist[i] * quarter);
            index.scan(&net[i], r, m, |j| {
                let j = j as usize;
                if j <= i {
                    return;
                }
                let len = net[i].dist(&net[j]);
                if len <= dist[i].min(dist[j]) * quarter && len <= opts.reach * cell[i].max(cell[j]) && len > T::zero() {
                    adjacency[i].push((j as u32, len));
                    adjacency[j].push((i as u32, len));
                }
            });
        }
    }
    let mut offsets = Vec::with_capacity(net.len() + 1);
    let mut targets = Vec::new();
    let mut lengths = Vec::new();
    offsets.push(0);
    for adj in adjacency.iter_mut() {
        adj.sort_by_key(|&(j, _)| j);
        for &(j, l) in adj.iter() {
            targets.push(j);
            lengths.push(l);
        }
        offsets.push(targets.len());
    }
    drop(adjacency);

    let boundary_samples = domain.boundary_samples(h, bounds);
    let sd = SampledDomain {
        source: domain.clone(),
        bounds: *bounds,
        mesh: h,
        seed,
        options: *opts,
        net,
        dist,
        cell,
        boundary_samples,
        offsets,
        targets,
        lengths,
        index,
    };
    sd.check_connected()?;
    Ok(sd)
}

#[allow(clippy::too_many_arguments)]
fn visit_cell<T: Real>(
    domain: &DomainSpec<T>,
    bounds: &Bounds<T>,
    opts: &NetOptions<T>,
    center: Point<T>,
    s: T,
    level: usize,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<PendingNode<T>>,
) -> Result<()> {
    let dim = center.dim();
    let half_diag = s * T::lit(0.5) * T::from_usize_lossy(dim).sqrt();
    // cells entirely outside the window
    for i in 0..dim {
        if center.coord(i) + s * T::lit(0.5) < bounds.lo.coord(i) || center.coord(i) - s * T::lit(0.5) > bounds.hi.coord(i) {
            return Ok(());
        }
    }
    let inside = domain.contains_point(&center);
    let d = if inside { domain.boundary_distance(&center)? } else { T::zero() };
    if inside && bounds.contains(&center) && d >= opts.whitney_ratio * s {
        let mut p = center;
        for i in 0..dim {
            let u: f64 = rng.gen_range(-1.0..=1.0);
            let v = (center.coord(i) + T::lit(u) * opts.jitter * s).max(bounds.lo.coord(i)).min(bounds.hi.coord(i));
            p = p.with_coord(i, v);
        }
        let dp = domain.boundary_distance(&p)?;
        out.push(PendingNode { point: p, dist: dp, level });
        if out.len() > MAX_NODES {
            return Err(Error::Discretization(format!("net exceeds {MAX_NODES} points; increase the mesh or shrink the bounds")));
        }
        return Ok(());
    }
    if level >= opts.refine_levels {
        return Ok(());
    }
    if !inside {
        // a cell whose center is outside can only meet the domain within its half-diagonal
        let probe = domain_gap(domain, &center);
        if probe > half_diag {
            return Ok(());
        }
    }
    let q = s * T::lit(0.25);
    let children = 1usize << dim;
    for k in 0..children {
        let mut c = center;
        for i in 0..dim {
            let sign = if (k >> (dim - 1 - i)) & 1 == 1 { T::one() } else { -T::one() };
            c = c.with_coord(i, center.coord(i) + sign * q);
        }
        visit_cell(domain, bounds, opts, c, s * T::lit(0.5), level + 1, rng, out)?;
    }
    Ok(())
}

/// Distance from an exterior point to the boundary, computed by shifting the
/// question to the membership-free formula per variant.
fn domain_gap<T: Real>(domain: &DomainSpec<T>, x: &Point<T>) -> T {
    match domain {
        DomainSpec::HalfPlane => x.last().abs(),
        DomainSpec::Ball { center, radius } | DomainSpec::BallExterior { center, radius } => (x.dist(center) - *radius).abs(),
        DomainSpec::PuncturedBall { center, radius } => {
            let r = x.dist(center);
            (*radius - r).abs().min(r)
        }
        DomainSpec::Rectangle { lo, hi } => {
            let mut sq = T::zero();
            for i in 0..x.dim() {
                let v = x.coord(i);
                let e = if v < lo.coord(i) {
                    lo.coord(i) - v
                } else if v > hi.coord(i) {
                    v - hi.coord(i)
                } else {
                    T::zero()
                };
                sq = sq + e * e;
            }
            sq.sqrt()
        }
        // exterior points of the arc complement lie on the arc itself
        DomainSpec::ArcComplement { .. } => T::zero(),
    }
}

impl<T: Real> SampledDomain<T> {
    pub fn len(&self) -> usize {
        self.net.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Neighbours of node `i` with Euclidean edge lengths.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.targets[r.clone()].iter().zip(&self.lengths[r]).map(|(&j, &l)| (j as usize, l))
    }

    /// All undirected edges `(i, j, |x_i - x_j|)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.len()).flat_map(move |i| self.neighbors(i).filter(move |&(j, _)| j > i).map(move |(j, l)| (i, j, l)))
    }

    /// Index of the net point closest to `p` and its distance.
    pub fn nearest(&self, p: &Point<T>) -> (usize, T) {
        let mut best = (0, T::infinity());
        for (i, q) in self.net.iter().enumerate() {
            let d = q.dist(p);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Index of a net point coinciding with `p`, if any.
    pub fn find(&self, p: &Point<T>) -> Option<usize> {
        let tol = self.mesh * T::lit(1e-12);
        for (l, _) in self.index.bucket.iter().enumerate() {
            let mut hit = None;
            self.index.scan(p, tol, l, |j| {
                if hit.is_none() && self.net[j as usize].dist(p) <= tol {
                    hit = Some(j as usize);
                }
            });
            if hit.is_some() {
                return hit;
            }
        }
        None
    }

    /// Net points that may be joined to an extra point `p` under the edge rule,
    /// with Euclidean lengths.
    pub fn attachment(&self, p: &Point<T>) -> Result<Vec<(usize, T)>> {
        let dp = self.source.boundary_distance(p)?;
        let quarter = T::lit(0.25);
        let mut out = Vec::new();
        for (l, _) in self.index.bucket.iter().enumerate() {
            let sl = self.mesh / T::lit(2f64.powi(l as i32));
            let r = (self.options.reach * sl).min(dp * quarter);
            self.index.scan(p, r, l, |j| {
                let j = j as usize;
                let len = self.net[j].dist(p);
                if len > T::zero() && len <= dp.min(self.dist[j]) * quarter && len <= self.options.reach * self.cell[j] {
                    out.push((j, len));
                }
            });
        }
        out.sort_by_key(|&(j, _)| j);
        Ok(out)
    }

    /// Minimum distance from `p` to the boundary samples.
    pub fn sampled_boundary_distance(&self, p: &Point<T>) -> T {
        self.boundary_samples.iter().map(|b| b.dist(p)).fold(T::infinity(), T::min)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            let mut queue = VecDeque::from([s]);
            comp[s] = id;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for (v, _) in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        if sizes.len() > 1 {
            let smallest = (0..sizes.len()).min_by_key(|&c| sizes[c]).unwrap_or(0);
            let example = comp.iter().position(|&c| c == smallest).map(|i| self.net[i].to_string()).unwrap_or_default();
            let mut shown: Vec<usize> = sizes.clone();
            shown.sort_unstable_by(|a, b| b.cmp(a));
            shown.truncate(8);
            return Err(Error::Discretization(format!(
                "net graph has {} components (largest sizes {:?}); a point of the smallest is {}",
                sizes.len(),
                shown,
                example
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new2(x, y)
    }

    fn disk_net(h: f64, seed: u64) -> SampledDomain<f64> {
        let d = DomainSpec::unit_disk();
        let b = d.bounding_box().unwrap();
        sample_net(&d, h, &b, seed).unwrap()
    }

    #[test]
    fn disk_net_postconditions() {
        let s = disk_net(0.05, 1);
        assert!(s.len() > 1000);
        for (i, x) in s.net.iter().enumerate() {
            assert!(s.source.contains_point(x));
            assert!(s.dist[i] > 0.0);
            assert_eq!(s.dist[i], s.source.boundary_distance(x).unwrap());
        }
        for (i, j, l) in s.edges() {
            assert!(l <= s.dist[i].min(s.dist[j]) / 4.0);
        }
    }

    #[test]
    fn sampled_boundary_distance_within_2h() {
        let s = disk_net(0.05, 2);
        for (i, x) in s.net.iter().enumerate() {
            let approx = s.sampled_boundary_distance(x);
            assert!(approx >= s.dist[i] - 1e-12);
            assert!(approx - s.dist[i] <= 2.0 * s.mesh);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = disk_net(0.1, 7);
        let b = disk_net(0.1, 7);
        let c = disk_net(0.1, 8);
        assert_eq!(a.net, b.net);
        assert_eq!(a.targets, b.targets);
        assert_ne!(a.net, c.net);
    }

    #[test]
    fn half_plane_window_covers_vertical_segment() {
        let b = Bounds::new(p(-1.0, 0.0), p(1.0, 3.0)).unwrap();
        let s = sample_net(&DomainSpec::HalfPlane, 0.02, &b, 3).unwrap();
        for k in 0..=20 {
            let y = 1.0 + (std::f64::consts::E - 1.0) * k as f64 / 20.0;
            let (_, d) = s.nearest(&p(0.0, y));
            assert!(d <= 0.02);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let d = DomainSpec::unit_disk();
        let b = d.bounding_box().unwrap();
        assert!(matches!(sample_net(&d, -1.0, &b, 0), Err(Error::Argument(_))));
        let far = Bounds::new(p(5.0, 5.0), p(6.0, 6.0)).unwrap();
        assert!(matches!(sample_net(&d, 0.1, &far, 0), Err(Error::Discretization(_))));
    }

    #[test]
    fn disconnected_net_is_reported() {
        let d = DomainSpec::unit_disk();
        let b = d.bounding_box().unwrap();
        // edges shorter than the grid spacing leave every point isolated
        let opts = NetOptions { refine_levels: 0, whitney_ratio: 4.0, reach: 0.5, ..NetOptions::default() };
        let err = sample_net_with(&d, 0.05, &b, 0, &opts).unwrap_err();
        assert!(matches!(err, Error::Discretization(ref m) if m.contains("components")), "{err}");
    }

    #[test]
    fn three_dimensional_ball() {
        let d = DomainSpec::Ball { center: Point::new3(0.0, 0.0, 0.0), radius: 1.0 };
        let b = d.bounding_box().unwrap();
        let opts = NetOptions { refine_levels: 1, ..NetOptions::default() };
        let s = sample_net_with(&d, 0.08, &b, 5, &opts).unwrap();
        assert!(s.len() > 100);
        assert!(s.net.iter().all(|x| x.dim() == 3));
    }

    #[test]
    fn attachment_respects_edge_rule() {
        let s = disk_net(0.05, 4);
        let q = p(0.1234, -0.2);
        let att = s.attachment(&q).unwrap();
        assert!(!att.is_empty());
        let dq = s.source.boundary_distance(&q).unwrap();
        for (j, l) in att {
            assert!(l <= dq.min(s.dist[j]) / 4.0);
        }
        assert!(s.attachment(&p(2.0, 0.0)).is_err());
    }
}
