use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::real::Real;

/// A point of the Euclidean plane or space, stored inline.
///
/// Only the first `dim` coordinates are meaningful; the rest are kept at zero
/// so that derived equality and hashing of coordinates stay consistent.
#[derive(Clone, Copy, PartialEq)]
pub struct Point<T> {
    coords: [T; 3],
    dim: u8,
}

impl<T: Real> Point<T> {
    pub fn new2(x: T, y: T) -> Self {
        Self { coords: [x, y, T::zero()], dim: 2 }
    }

    pub fn new3(x: T, y: T, z: T) -> Self {
        Self { coords: [x, y, z], dim: 3 }
    }

    /// Builds a point from a coordinate slice of length 2 or 3 with finite entries.
    pub fn from_slice(c: &[T]) -> Result<Self> {
        if !(c.len() == 2 || c.len() == 3) {
            return Err(Error::Argument(format!("points need 2 or 3 coordinates, got {}", c.len())));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("point coordinates must be finite".into()));
        }
        let mut coords = [T::zero(); 3];
        coords[..c.len()].copy_from_slice(c);
        Ok(Self { coords, dim: c.len() as u8 })
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: [T::zero(); 3], dim: dim as u8 }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords[..self.dim()]
    }

    #[inline]
    pub fn x(&self) -> T {
        self.coords[0]
    }

    #[inline]
    pub fn y(&self) -> T {
        self.coords[1]
    }

    #[inline]
    pub fn coord(&self, i: usize) -> T {
        self.coords[i]
    }

    /// Last coordinate, the "height" used by half-spaces.
    #[inline]
    pub fn last(&self) -> T {
        self.coords[self.dim() - 1]
    }

    #[inline]
    pub fn with_coord(mut self, i: usize, v: T) -> Self {
        self.coords[i] = v;
        self
    }

    #[inline]
    pub fn norm_sq(&self) -> T {
        self.coords[0] * self.coords[0] + self.coords[1] * self.coords[1] + self.coords[2] * self.coords[2]
    }

    #[inline]
    pub fn norm(&self) -> T {
        let [a, b, c] = self.coords;
        if self.dim == 2 {
            a.hypot(b)
        } else {
            a.hypot(b).hypot(c)
        }
    }

    #[inline]
    pub fn dist(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.coords[0] * other.coords[0] + self.coords[1] * other.coords[1] + self.coords[2] * other.coords[2]
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        let [a, b, c] = self.coords;
        Self { coords: [a * s, b * s, c * s], dim: self.dim }
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }

    /// Converts to another scalar type, e.g. for comparing `f32` and `f64` runs.
    pub fn cast<U: Real>(&self) -> Point<U> {
        let mut coords = [U::zero(); 3];
        for (o, v) in coords.iter_mut().zip(self.coords.iter()) {
            *o = U::from_f64(v.as_f64()).unwrap_or_else(U::nan);
        }
        Point { coords, dim: self.dim }
    }
}

impl<T: Real> Add for Point<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        let [a, b, c] = self.coords;
        let [x, y, z] = o.coords;
        Self { coords: [a + x, b + y, c + z], dim: self.dim.max(o.dim) }
    }
}

impl<T: Real> Sub for Point<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        let [a, b, c] = self.coords;
        let [x, y, z] = o.coords;
        Self { coords: [a - x, b - y, c - z], dim: self.dim.max(o.dim) }
    }
}

impl<T: Real> Mul<T> for Point<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> fmt::Debug for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords().iter()).finish()
    }
}

impl<T: Real> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<T: Real> Serialize for Point<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Point<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<T> = Vec::deserialize(d)?;
        Point::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// A point of the one-point extension: finite, or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
#[serde(untagged)]
pub enum ExtendedPoint<T: Real> {
    Finite(Point<T>),
    #[serde(with = "infinity_repr")]
    Infinity,
}

impl<T: Real> ExtendedPoint<T> {
    pub fn finite(&self) -> Option<&Point<T>> {
        match self {
            ExtendedPoint::Finite(p) => Some(p),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }
}

impl<T: Real> From<Point<T>> for ExtendedPoint<T> {
    fn from(p: Point<T>) -> Self {
        ExtendedPoint::Finite(p)
    }
}

impl<T: Real> fmt::Display for ExtendedPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(p) => write!(f, "{p}"),
            ExtendedPoint::Infinity => write!(f, "∞"),
        }
    }
}

mod infinity_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("inf")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "inf" | "infinity" | "∞" => Ok(()),
            other => Err(serde::de::Error::custom(format!("expected \"inf\", got {other:?}"))),
        }
    }
}

/// Maximum pairwise distance; `0` for a singleton.
///
/// Large planar sets are reduced to their convex hull first, which leaves the
/// maximum unchanged.
pub fn diameter<T: Real>(points: &[Point<T>]) -> Result<T> {
    if points.is_empty() {
        return Err(Error::Argument("diameter of an empty point list".into()));
    }
    if points.len() > 512 && points.iter().all(|p| p.dim() == 2) {
        let hull = convex_hull_2d(points);
        return Ok(brute_force_diameter(&hull));
    }
    Ok(brute_force_diameter(points))
}

fn brute_force_diameter<T: Real>(points: &[Point<T>]) -> T {
    let mut best = T::zero();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(a.dist(b));
        }
    }
    best
}

/// Andrew's monotone chain; returns hull vertices (collinear points dropped).
pub(crate) fn convex_hull_2d<T: Real>(points: &[Point<T>]) -> Vec<Point<T>> {
    let mut pts: Vec<Point<T>> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x()
            .partial_cmp(&b.x())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.y().partial_cmp(&b.y()).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &Point<T>, a: &Point<T>, b: &Point<T>| (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    let mut hull: Vec<Point<T>> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= T::zero() {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= T::zero() {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameter_basics() {
        let pts = [Point::new2(0.0, 0.0), Point::new2(3.0, 4.0)];
        assert_eq!(diameter(&pts).unwrap(), 5.0);
        assert_eq!(diameter(&[Point::new2(0.0, 0.0)]).unwrap(), 0.0);
        assert!(matches!(diameter::<f64>(&[]), Err(Error::Argument(_))));
    }

    #[test]
    fn circle_diameter_matches_pairwise_scan() {
        let n = 1000;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let pts: Vec<_> = (0..n)
            .map(|k| {
                let t = k as f64 * h;
                Point::new2(t.cos(), t.sin())
            })
            .collect();
        // hull path vs pairwise brute force
        let d = diameter(&pts).unwrap();
        assert_eq!(d, brute_force_diameter(&pts));
        assert!((d - 2.0).abs() <= 2.0 * h);
    }

    #[test]
    fn from_slice_rejects_bad_input() {
        assert!(Point::<f64>::from_slice(&[1.0]).is_err());
        assert!(Point::<f64>::from_slice(&[1.0, f64::NAN]).is_err());
        let p = Point::<f64>::from_slice(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.norm_sq(), 14.0);
    }

    #[test]
    fn infinity_equals_only_itself() {
        let inf = ExtendedPoint::<f64>::Infinity;
        assert_eq!(inf, ExtendedPoint::Infinity);
        assert_ne!(inf, ExtendedPoint::Finite(Point::new2(0.0, 0.0)));
    }

    #[test]
    fn serde_forms() {
        let p: ExtendedPoint<f64> = serde_json::from_str("[1.0, 2.0]").unwrap();
        assert_eq!(p, ExtendedPoint::Finite(Point::new2(1.0, 2.0)));
        let q: ExtendedPoint<f64> = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(q, ExtendedPoint::Infinity);
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"inf\"");
    }
}
