//! Distance-ratio metric `j_D` and the graph approximation of the quasihyperbolic metric `k_D`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::{dijkstra, dijkstra_with_parents, path_to, Augmented, Graph};
use super::oracle::DistanceTable;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point, SampledDomain};
use crate::real::Real;

/// Largest probe set for which a full distance table is built.
pub const MAX_TABLE_POINTS: usize = 2000;

/// `log(1 + |x - y| / min(d(x), d(y)))`.
pub fn j_distance<T: Real>(domain: &DomainSpec<T>, x: &Point<T>, y: &Point<T>) -> Result<T> {
    let dx = domain.boundary_distance(x)?;
    let dy = domain.boundary_distance(y)?;
    Ok((x.dist(y) / dx.min(dy)).ln_1p())
}

/// `∫ ds / d` along a segment of length `len` on which `d` runs linearly from
/// `da` to `db`, i.e. `len` over the logarithmic mean of `da` and `db`.
///
/// Since `d_D` is 1-Lipschitz this weight is at least `|log(da/db)|` and the
/// path sums dominate `j_D`; for convex domains `d_D` is concave along
/// segments, so the weight also bounds the segment's own `k_D` length.
#[inline]
pub fn segment_weight<T: Real>(len: T, da: T, db: T) -> T {
    let (a, b) = if da <= db { (da, db) } else { (db, da) };
    let gap = b - a;
    if gap <= a * T::lit(1e-9) {
        len * T::lit(2.0) / (a + b)
    } else {
        len * (gap / a).ln_1p() / gap
    }
}

/// A graph estimate of `k_D` together with the mesh it was computed at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QhEstimate<T: Real> {
    pub value: T,
    pub mesh: T,
}

/// The net graph weighted by [`segment_weight`].
pub struct QhGraph<'a, T: Real> {
    pub domain: &'a SampledDomain<T>,
    graph: Graph<T>,
    euclidean: bool,
}

/// Query points resolved to graph nodes, extra points attached as new nodes.
pub struct Resolved<'a, T: Real> {
    pub graph: Augmented<'a, T>,
    pub ids: Vec<usize>,
}

impl<'a, T: Real> QhGraph<'a, T> {
    pub fn new(domain: &'a SampledDomain<T>) -> Self {
        let d = &domain.dist;
        let graph = Graph::from_edges(domain.len(), domain.edges().map(|(i, j, l)| (i, j, segment_weight(l, d[i], d[j]))));
        Self { domain, graph, euclidean: false }
    }

    /// Same net with Euclidean edge lengths, for arc-length questions.
    pub fn euclidean(domain: &'a SampledDomain<T>) -> Self {
        Self { domain, graph: Graph::from_edges(domain.len(), domain.edges()), euclidean: true }
    }

    pub fn graph(&self) -> &Graph<T> {
        &self.graph
    }

    /// Maps each point to its net node, attaching points that are not net points.
    pub fn resolve(&self, points: &[Point<T>]) -> Result<Resolved<'_, T>> {
        let euclid = self.euclidean;
        let mut aug = Augmented::new(&self.graph);
        let mut ids = Vec::with_capacity(points.len());
        let mut extra: Vec<(usize, Point<T>, T)> = Vec::new();
        for p in points {
            if let Some(i) = self.domain.find(p) {
                ids.push(i);
                continue;
            }
            if let Some(&(id, _, _)) = extra.iter().find(|(_, q, _)| q == p) {
                ids.push(id);
                continue;
            }
            let dp = self.domain.source.boundary_distance(p)?;
            let mut links: Vec<(usize, T)> = self
                .domain
                .attachment(p)?
                .into_iter()
                .map(|(j, l)| (j, if euclid { l } else { segment_weight(l, dp, self.domain.dist[j]) }))
                .collect();
            let quarter = T::lit(0.25);
            for &(k, q, dq) in &extra {
                let l = q.dist(p);
                if l <= dp.min(dq) * quarter && l <= self.domain.options.reach * self.domain.mesh {
                    links.push((k, if euclid { l } else { segment_weight(l, dp, dq) }));
                }
            }
            let id = aug.add_node(links);
            extra.push((id, *p, dp));
            ids.push(id);
        }
        Ok(Resolved { graph: aug, ids })
    }

    /// Graph distance between two points of the domain.
    pub fn distance(&self, x: &Point<T>, y: &Point<T>) -> Result<T> {
        let r = self.resolve(&[*x, *y])?;
        let (a, b) = (r.ids[0], r.ids[1]);
        if a == b {
            return Ok(T::zero());
        }
        let d = dijkstra(&r.graph, a, &[b])[b];
        if d.is_infinite() {
            return Err(Error::Unreachable { from: a, to: b });
        }
        Ok(d)
    }

    /// Graph distance and the path realizing it, as points.
    pub fn path(&self, x: &Point<T>, y: &Point<T>) -> Result<(T, Vec<Point<T>>)> {
        let r = self.resolve(&[*x, *y])?;
        let (a, b) = (r.ids[0], r.ids[1]);
        let (d, parent) = dijkstra_with_parents(&r.graph, a, &[b]);
        let nodes = path_to(&parent, a, b).ok_or(Error::Unreachable { from: a, to: b })?;
        let n = self.domain.len();
        let pts = nodes.iter().map(|&v| if v < n { self.domain.net[v] } else if v == a { *x } else { *y }).collect();
        Ok((d[b], pts))
    }

    /// Pairwise graph distances between the given points, one Dijkstra run per point.
    pub fn table(&self, points: &[Point<T>]) -> Result<DistanceTable<T>> {
        if points.len() > MAX_TABLE_POINTS {
            return Err(Error::Argument(format!("distance tables are limited to {MAX_TABLE_POINTS} points, got {}", points.len())));
        }
        let r = self.resolve(points)?;
        let rows: Vec<Vec<T>> = r
            .ids
            .par_iter()
            .map(|&s| {
                let d = dijkstra(&r.graph, s, &r.ids);
                r.ids.iter().map(|&t| d[t]).collect()
            })
            .collect();
        let n = points.len();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // the upper triangle is used for both orders so the table is exactly symmetric
                let v = if i <= j { rows[i][j] } else { rows[j][i] };
                if v.is_infinite() {
                    return Err(Error::Unreachable { from: r.ids[i], to: r.ids[j] });
                }
                data.push(v);
            }
        }
        DistanceTable::from_matrix(n, data)
    }
}

/// Graph estimate of `k_D(x, y)` on the net, with the mesh for error accounting.
pub fn qh_distance<T: Real>(net: &SampledDomain<T>, x: &Point<T>, y: &Point<T>) -> Result<QhEstimate<T>> {
    Ok(QhEstimate { value: QhGraph::new(net).distance(x, y)?, mesh: net.mesh })
}

fn collinear_same_ray<T: Real>(u: &Point<T>, v: &Point<T>) -> bool {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == T::zero() || nv == T::zero() {
        return true;
    }
    let c = u.dot(v) / (nu * nv);
    c >= T::one() - T::lit(1e-12)
}

/// Closed-form `k_D` for point pairs on which the segment between them is a
/// geodesic along which `d_D` is monotone.
///
/// Supported: vertically aligned pairs in the half-plane, pairs on one ray from
/// the center in balls and ball exteriors, and pairs on one ray in a punctured
/// ball lying on the same side of the half radius.
pub fn qh_exact_aligned<T: Real>(domain: &DomainSpec<T>, x: &Point<T>, y: &Point<T>) -> Result<T> {
    let dx = domain.boundary_distance(x)?;
    let dy = domain.boundary_distance(y)?;
    let unsupported = || Err(Error::UnsupportedConfiguration(format!("{x} and {y} are not aligned in {}", domain.label())));
    match domain {
        DomainSpec::HalfPlane => {
            let tol = T::lit(1e-12) * x.norm().max(y.norm()).max(T::one());
            if (0..x.dim() - 1).any(|i| (x.coord(i) - y.coord(i)).abs() > tol) {
                return unsupported();
            }
            Ok((dy / dx).ln().abs())
        }
        DomainSpec::Ball { center, .. } | DomainSpec::BallExterior { center, .. } => {
            if !collinear_same_ray(&(*x - *center), &(*y - *center)) {
                return unsupported();
            }
            Ok((dy / dx).ln().abs())
        }
        DomainSpec::PuncturedBall { center, radius } => {
            let (u, v) = (*x - *center, *y - *center);
            if !collinear_same_ray(&u, &v) {
                return unsupported();
            }
            let half = *radius * T::lit(0.5);
            let (ru, rv) = (u.norm(), v.norm());
            if (ru <= half) != (rv <= half) && ru != half && rv != half {
                return unsupported();
            }
            Ok((dy / dx).ln().abs())
        }
        _ => unsupported(),
    }
}
