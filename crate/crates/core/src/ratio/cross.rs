//! Triple ratios, cross ratios on the one-point extension and the Bonk–Kleiner ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ExtendedPoint, Point};
use crate::real::Real;

/// `|y - x| / |z - x|`.
pub fn triple_ratio<T: Real>(x: &Point<T>, y: &Point<T>, z: &Point<T>) -> Result<T> {
    let den = z.dist(x);
    if den == T::zero() {
        return Err(Error::DegenerateTriple);
    }
    Ok(y.dist(x) / den)
}

/// An ordered quadruple of pairwise distinct points of the one-point extension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Tuple4<T: Real> {
    pub x: ExtendedPoint<T>,
    pub y: ExtendedPoint<T>,
    pub z: ExtendedPoint<T>,
    pub w: ExtendedPoint<T>,
}

impl<T: Real> Tuple4<T> {
    pub fn new(x: ExtendedPoint<T>, y: ExtendedPoint<T>, z: ExtendedPoint<T>, w: ExtendedPoint<T>) -> Result<Self> {
        let q = Self { x, y, z, w };
        let pts = q.points();
        for i in 0..4 {
            for j in i + 1..4 {
                if pts[i] == pts[j] {
                    return Err(Error::DegenerateQuadruple(format!("entries {i} and {j} coincide at {}", pts[i])));
                }
            }
        }
        Ok(q)
    }

    pub fn finite(x: Point<T>, y: Point<T>, z: Point<T>, w: Point<T>) -> Result<Self> {
        Self::new(x.into(), y.into(), z.into(), w.into())
    }

    pub fn points(&self) -> [ExtendedPoint<T>; 4] {
        [self.x, self.y, self.z, self.w]
    }
}

fn d<T: Real>(a: &ExtendedPoint<T>, b: &ExtendedPoint<T>) -> T {
    match (a, b) {
        (ExtendedPoint::Finite(p), ExtendedPoint::Finite(q)) => p.dist(q),
        _ => T::infinity(),
    }
}

/// `τ(x,y,z,w) = (|x-z| / |x-y|) · (|y-w| / |z-w|)`; when one entry is `∞` the
/// two distances involving it cancel.
pub fn cross_ratio<T: Real>(q: &Tuple4<T>) -> Result<T> {
    let Tuple4 { x, y, z, w } = q;
    let v = if w.is_infinity() {
        d(x, z) / d(x, y)
    } else if x.is_infinity() {
        d(y, w) / d(z, w)
    } else if y.is_infinity() {
        d(x, z) / d(z, w)
    } else if z.is_infinity() {
        d(y, w) / d(x, y)
    } else {
        (d(x, z) / d(x, y)) * (d(y, w) / d(z, w))
    };
    if !v.is_finite() || v == T::zero() {
        return Err(Error::DegenerateQuadruple(format!("cross ratio of {x}, {y}, {z}, {w} is {v}")));
    }
    Ok(v)
}

/// `(|x-z| ∧ |y-w|) / (|x-y| ∧ |z-w|)` for finite quadruples.
pub fn bk_ratio<T: Real>(q: &Tuple4<T>) -> Result<T> {
    let [x, y, z, w] = q.points();
    if q.points().iter().any(|p| p.is_infinity()) {
        return Err(Error::UnsupportedConfiguration("the Bonk–Kleiner ratio is defined for finite points only".into()));
    }
    Ok(d(&x, &z).min(d(&y, &w)) / d(&x, &y).min(d(&z, &w)))
}

/// `θ₀(t) = 3(t ∨ √t)`.
#[inline]
pub fn theta0<T: Real>(t: T) -> T {
    T::lit(3.0) * t.max(t.sqrt())
}
