use serde::{Deserialize, Serialize};

use super::point::{ExtendedPoint, Point};
use crate::error::{Error, Result};
use crate::real::Real;

/// Analytic proper subdomains of the plane or space with an exact
/// distance-to-boundary formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec<T: Real> {
    /// `{x : x_n > 0}` where `x_n` is the last coordinate.
    HalfPlane,
    Ball { center: Point<T>, radius: T },
    /// The ball with its center removed.
    PuncturedBall { center: Point<T>, radius: T },
    /// `{x : |x - c| > r}` together with the point at infinity.
    BallExterior { center: Point<T>, radius: T },
    Rectangle { lo: Point<T>, hi: Point<T> },
    /// Extended plane minus the closed arc `{e^{it} : start <= t <= end}` of the unit circle.
    ArcComplement { start: T, end: T },
}

/// Axis-aligned box used to window sampling of (possibly unbounded) domains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
#[serde(deny_unknown_fields)]
pub struct Bounds<T: Real> {
    pub lo: Point<T>,
    pub hi: Point<T>,
}

impl<T: Real> Bounds<T> {
    pub fn new(lo: Point<T>, hi: Point<T>) -> Result<Self> {
        if lo.dim() != hi.dim() || lo.coords().iter().zip(hi.coords()).any(|(a, b)| !(a < b)) {
            return Err(Error::Argument(format!("bounds corners {lo} and {hi} are not strictly ordered")));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        p.dim() == self.dim() && p.coords().iter().enumerate().all(|(i, &v)| v >= self.lo.coord(i) && v <= self.hi.coord(i))
    }

    pub fn extent(&self, i: usize) -> T {
        self.hi.coord(i) - self.lo.coord(i)
    }
}

impl<T: Real> DomainSpec<T> {
    pub fn ball(center: Point<T>, radius: T) -> Result<Self> {
        let d = Self::Ball { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_disk() -> Self {
        Self::Ball { center: Point::origin(2), radius: T::one() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Argument(msg));
        match self {
            DomainSpec::HalfPlane => Ok(()),
            DomainSpec::Ball { radius, center }
            | DomainSpec::PuncturedBall { radius, center }
            | DomainSpec::BallExterior { radius, center } => {
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return bad(format!("radius must be positive, got {radius}"));
                }
                if !center.is_finite() {
                    return bad("center must be finite".into());
                }
                Ok(())
            }
            DomainSpec::Rectangle { lo, hi } => Bounds::new(*lo, *hi).map(|_| ()),
            DomainSpec::ArcComplement { start, end } => {
                if !(end > start) || *end - *start > T::TAU() + T::lit(1e-12) {
                    return bad(format!("arc range [{start}, {end}] must be nonempty and at most 2π"));
                }
                Ok(())
            }
        }
    }

    /// Ambient dimension fixed by the variant, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            DomainSpec::HalfPlane => None,
            DomainSpec::Ball { center, .. } | DomainSpec::PuncturedBall { center, .. } | DomainSpec::BallExterior { center, .. } => {
                Some(center.dim())
            }
            DomainSpec::Rectangle { lo, .. } => Some(lo.dim()),
            DomainSpec::ArcComplement { .. } => Some(2),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, DomainSpec::Ball { .. } | DomainSpec::PuncturedBall { .. } | DomainSpec::Rectangle { .. })
    }

    /// Tight bounding box of bounded variants.
    pub fn bounding_box(&self) -> Option<Bounds<T>> {
        match self {
            DomainSpec::Ball { center, radius } | DomainSpec::PuncturedBall { center, radius } => {
                let n = center.dim();
                let mut lo = *center;
                let mut hi = *center;
                for i in 0..n {
                    lo = lo.with_coord(i, center.coord(i) - *radius);
                    hi = hi.with_coord(i, center.coord(i) + *radius);
                }
                Some(Bounds { lo, hi })
            }
            DomainSpec::Rectangle { lo, hi } => Some(Bounds { lo: *lo, hi: *hi }),
            _ => None,
        }
    }

    fn dim_matches(&self, x: &Point<T>) -> bool {
        self.dim().map_or(true, |n| n == x.dim())
    }

    /// Euclidean distance to the boundary, ignoring membership.
    ///
    /// Returns `None` when the dimension does not match the domain.
    fn raw_distance(&self, x: &Point<T>) -> Option<T> {
        if !self.dim_matches(x) {
            return None;
        }
        Some(match self {
            DomainSpec::HalfPlane => x.last().abs(),
            DomainSpec::Ball { center, radius } => (*radius - x.dist(center)).abs(),
            DomainSpec::PuncturedBall { center, radius } => {
                let r = x.dist(center);
                (*radius - r).abs().min(r)
            }
            DomainSpec::BallExterior { center, radius } => (x.dist(center) - *radius).abs(),
            DomainSpec::Rectangle { lo, hi } => {
                let mut inside = true;
                let mut best = T::infinity();
                let mut outside_sq = T::zero();
                for i in 0..x.dim() {
                    let v = x.coord(i);
                    let (a, b) = (lo.coord(i), hi.coord(i));
                    if v < a || v > b {
                        inside = false;
                        let e = if v < a { a - v } else { v - b };
                        outside_sq = outside_sq + e * e;
                    } else {
                        best = best.min((v - a).min(b - v));
                    }
                }
                if inside {
                    best
                } else {
                    outside_sq.sqrt()
                }
            }
            DomainSpec::ArcComplement { start, end } => arc_distance(x, *start, *end),
        })
    }

    fn contains_finite(&self, x: &Point<T>) -> bool {
        if !x.is_finite() || !self.dim_matches(x) {
            return false;
        }
        match self {
            DomainSpec::HalfPlane => x.last() > T::zero(),
            DomainSpec::Ball { center, radius } => x.dist(center) < *radius,
            DomainSpec::PuncturedBall { center, radius } => {
                let r = x.dist(center);
                r > T::zero() && r < *radius
            }
            DomainSpec::BallExterior { center, radius } => x.dist(center) > *radius,
            DomainSpec::Rectangle { lo, hi } => {
                (0..x.dim()).all(|i| x.coord(i) > lo.coord(i) && x.coord(i) < hi.coord(i))
            }
            DomainSpec::ArcComplement { start, end } => arc_distance(x, *start, *end) > T::zero(),
        }
    }

    /// Membership in the domain, with `∞` belonging only to the exterior variants.
    pub fn contains(&self, x: &ExtendedPoint<T>) -> bool {
        match x {
            ExtendedPoint::Infinity => matches!(self, DomainSpec::BallExterior { .. } | DomainSpec::ArcComplement { .. }),
            ExtendedPoint::Finite(p) => self.contains_finite(p),
        }
    }

    pub fn contains_point(&self, x: &Point<T>) -> bool {
        self.contains_finite(x)
    }

    /// Distance from an interior point to the boundary, `d_D(x)`.
    pub fn boundary_distance(&self, x: &Point<T>) -> Result<T> {
        if !self.contains_finite(x) {
            return Err(Error::DomainMembership { point: x.to_string(), domain: self.label() });
        }
        Ok(self.raw_distance(x).expect("dimension checked by contains"))
    }

    pub fn label(&self) -> String {
        match self {
            DomainSpec::HalfPlane => "half-plane".into(),
            DomainSpec::Ball { center, radius } => format!("ball({center}, {radius})"),
            DomainSpec::PuncturedBall { center, radius } => format!("punctured-ball({center}, {radius})"),
            DomainSpec::BallExterior { center, radius } => format!("ball-exterior({center}, {radius})"),
            DomainSpec::Rectangle { lo, hi } => format!("rectangle({lo}, {hi})"),
            DomainSpec::ArcComplement { start, end } => format!("arc-complement([{start}, {end}])"),
        }
    }

    /// Points of the boundary at spacing at most `h`, restricted to `window`
    /// for the unbounded half-plane boundary.
    pub fn boundary_samples(&self, h: T, window: &Bounds<T>) -> Vec<Point<T>> {
        match self {
            DomainSpec::HalfPlane => {
                let n = window.dim();
                let mut out = Vec::new();
                let steps: Vec<usize> = (0..n - 1).map(|i| ceil_count(window.extent(i), h)).collect();
                if n == 2 {
                    for k in 0..=steps[0] {
                        let t = window.lo.x() + window.extent(0) * T::from_usize_lossy(k) / T::from_usize_lossy(steps[0]);
                        out.push(Point::new2(t, T::zero()));
                    }
                } else {
                    for a in 0..=steps[0] {
                        for b in 0..=steps[1] {
                            let u = window.lo.x() + window.extent(0) * T::from_usize_lossy(a) / T::from_usize_lossy(steps[0]);
                            let v = window.lo.y() + window.extent(1) * T::from_usize_lossy(b) / T::from_usize_lossy(steps[1]);
                            out.push(Point::new3(u, v, T::zero()));
                        }
                    }
                }
                out
            }
            DomainSpec::Ball { center, radius } | DomainSpec::BallExterior { center, radius } => sphere_samples(center, *radius, h),
            DomainSpec::PuncturedBall { center, radius } => {
                let mut s = sphere_samples(center, *radius, h);
                s.push(*center);
                s
            }
            DomainSpec::Rectangle { lo, hi } => rectangle_boundary(lo, hi, h),
            DomainSpec::ArcComplement { start, end } => {
                let n = ceil_count(*end - *start, h);
                (0..=n)
                    .map(|k| {
                        let t = *start + (*end - *start) * T::from_usize_lossy(k) / T::from_usize_lossy(n);
                        Point::new2(t.cos(), t.sin())
                    })
                    .collect()
            }
        }
    }
}

fn ceil_count<T: Real>(len: T, h: T) -> usize {
    (len / h).ceil().to_usize().unwrap_or(1).max(1)
}

/// Distance from `x` to the arc of the unit circle between angles `start` and `end`:
/// radial projection when the projection lands on the arc, else the nearer endpoint.
fn arc_distance<T: Real>(x: &Point<T>, start: T, end: T) -> T {
    let r = x.norm();
    if r == T::zero() {
        return T::one();
    }
    let phi = x.y().atan2(x.x());
    let tau = T::TAU();
    let mut u = (phi - start) % tau;
    if u < T::zero() {
        u = u + tau;
    }
    if u <= end - start {
        return (r - T::one()).abs();
    }
    let a = Point::new2(start.cos(), start.sin());
    let b = Point::new2(end.cos(), end.sin());
    x.dist(&a).min(x.dist(&b))
}

fn sphere_samples<T: Real>(center: &Point<T>, radius: T, h: T) -> Vec<Point<T>> {
    if center.dim() == 2 {
        let n = ceil_count(T::TAU() * radius, h).max(8);
        (0..n)
            .map(|k| {
                let t = T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(n);
                *center + Point::new2(t.cos(), t.sin()) * radius
            })
            .collect()
    } else {
        // Fibonacci lattice; area per point (h/√2)² keeps nearest spacing below h.
        let area = T::lit(4.0) * T::PI() * radius * radius;
        let n = ceil_count(area, h * h / T::lit(2.0)).max(16);
        let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
        (0..n)
            .map(|k| {
                let kf = T::from_usize_lossy(k);
                let z = T::one() - T::lit(2.0) * (kf + T::lit(0.5)) / T::from_usize_lossy(n);
                let rho = (T::one() - z * z).max(T::zero()).sqrt();
                let th = golden * kf;
                *center + Point::new3(rho * th.cos(), rho * th.sin(), z) * radius
            })
            .collect()
    }
}

fn rectangle_boundary<T: Real>(lo: &Point<T>, hi: &Point<T>, h: T) -> Vec<Point<T>> {
    let n = lo.dim();
    let counts: Vec<usize> = (0..n).map(|i| ceil_count(hi.coord(i) - lo.coord(i), h)).collect();
    let at = |i: usize, k: usize| lo.coord(i) + (hi.coord(i) - lo.coord(i)) * T::from_usize_lossy(k) / T::from_usize_lossy(counts[i]);
    let mut out = Vec::new();
    if n == 2 {
        for i in 0..=counts[0] {
            for j in 0..=counts[1] {
                if i == 0 || j == 0 || i == counts[0] || j == counts[1] {
                    out.push(Point::new2(at(0, i), at(1, j)));
                }
            }
        }
    } else {
        for i in 0..=counts[0] {
            for j in 0..=counts[1] {
                for k in 0..=counts[2] {
                    if i == 0 || j == 0 || k == 0 || i == counts[0] || j == counts[1] || k == counts[2] {
                        out.push(Point::new3(at(0, i), at(1, j), at(2, k)));
                    }
                }
            }
        }
    }
    out
}
