use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::point::{ExtendedPoint, Point};
use crate::error::{Error, Result};
use crate::real::Real;

/// Explicit maps between domains. Compositions apply their members left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec<T: Real> {
    Identity,
    /// `x ↦ scale · R(rotation) x + translation`, rotation acting in the first two coordinates.
    Similarity {
        scale: T,
        #[serde(default)]
        rotation: T,
        #[serde(default)]
        translation: Option<Point<T>>,
    },
    /// `x ↦ |x|^{α-1} x`.
    RadialPower { alpha: T },
    /// `x ↦ c + (x - c)/|x - c|²`, swapping `c` and `∞`.
    Inversion { center: Point<T> },
    /// `z ↦ (az + b)/(cz + d)` on the extended complex plane.
    MobiusPlane { a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T> },
    Composition { maps: Vec<MapSpec<T>> },
}

impl<T: Real> MapSpec<T> {
    pub fn similarity(scale: T) -> Self {
        MapSpec::Similarity { scale, rotation: T::zero(), translation: None }
    }

    pub fn inversion_at_origin(dim: usize) -> Self {
        MapSpec::Inversion { center: Point::origin(dim) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MapSpec::Identity | MapSpec::Inversion { .. } => Ok(()),
            MapSpec::Similarity { scale, rotation, .. } => {
                if !(*scale > T::zero()) || !scale.is_finite() || !rotation.is_finite() {
                    return Err(Error::Argument(format!("similarity scale must be positive, got {scale}")));
                }
                Ok(())
            }
            MapSpec::RadialPower { alpha } => {
                if !(*alpha > T::zero()) || !alpha.is_finite() {
                    return Err(Error::Argument(format!("radial power exponent must be positive, got {alpha}")));
                }
                Ok(())
            }
            MapSpec::MobiusPlane { a, b, c, d } => {
                let det = *a * *d - *b * *c;
                if det.norm() == T::zero() {
                    return Err(Error::Argument("Möbius coefficients satisfy ad - bc = 0".into()));
                }
                Ok(())
            }
            MapSpec::Composition { maps } => maps.iter().try_for_each(|m| m.validate()),
        }
    }

    /// True when the map preserves cross-ratios exactly (Möbius type).
    pub fn is_mobius(&self) -> bool {
        match self {
            MapSpec::Identity | MapSpec::Similarity { .. } | MapSpec::Inversion { .. } | MapSpec::MobiusPlane { .. } => true,
            MapSpec::RadialPower { alpha } => *alpha == T::one(),
            MapSpec::Composition { maps } => maps.iter().all(|m| m.is_mobius()),
        }
    }

    /// Image of a point of the one-point extension.
    pub fn apply(&self, x: &ExtendedPoint<T>) -> Result<ExtendedPoint<T>> {
        match self {
            MapSpec::Identity => Ok(*x),
            MapSpec::Similarity { scale, rotation, translation } => {
                let ExtendedPoint::Finite(p) = x else { return Ok(ExtendedPoint::Infinity) };
                let (s, c) = rotation.sin_cos();
                let rx = c * p.x() - s * p.y();
                let ry = s * p.x() + c * p.y();
                let mut q = p.with_coord(0, rx).with_coord(1, ry).scale(*scale);
                if let Some(t) = translation {
                    if t.dim() != p.dim() {
                        return Err(Error::Argument(format!("translation {t} does not match point {p}")));
                    }
                    q = q + *t;
                }
                Ok(ExtendedPoint::Finite(q))
            }
            MapSpec::RadialPower { alpha } => {
                let ExtendedPoint::Finite(p) = x else { return Ok(ExtendedPoint::Infinity) };
                let r = p.norm();
                if r == T::zero() {
                    return Ok(*x);
                }
                Ok(ExtendedPoint::Finite(p.scale(r.powf(*alpha - T::one()))))
            }
            MapSpec::Inversion { center } => match x {
                ExtendedPoint::Infinity => Ok(ExtendedPoint::Finite(*center)),
                ExtendedPoint::Finite(p) => {
                    if p.dim() != center.dim() {
                        return Err(Error::Argument(format!("inversion center {center} does not match point {p}")));
                    }
                    let v = *p - *center;
                    let r2 = v.norm_sq();
                    if r2 == T::zero() {
                        Ok(ExtendedPoint::Infinity)
                    } else {
                        Ok(ExtendedPoint::Finite(*center + v.scale(T::one() / r2)))
                    }
                }
            },
            MapSpec::MobiusPlane { a, b, c, d } => {
                let zero = Complex::new(T::zero(), T::zero());
                match x {
                    ExtendedPoint::Infinity => {
                        if *c == zero {
                            Ok(ExtendedPoint::Infinity)
                        } else {
                            let w = *a / *c;
                            Ok(ExtendedPoint::Finite(Point::new2(w.re, w.im)))
                        }
                    }
                    ExtendedPoint::Finite(p) => {
                        if p.dim() != 2 {
                            return Err(Error::Argument(format!("planar Möbius map applied to {p}")));
                        }
                        let z = Complex::new(p.x(), p.y());
                        let den = *c * z + *d;
                        if den == zero {
                            return Ok(ExtendedPoint::Infinity);
                        }
                        let w = (*a * z + *b) / den;
                        Ok(ExtendedPoint::Finite(Point::new2(w.re, w.im)))
                    }
                }
            }
            MapSpec::Composition { maps } => maps.iter().try_fold(*x, |acc, m| m.apply(&acc)),
        }
    }

    /// Image of a finite point that must stay finite.
    pub fn apply_finite(&self, x: &Point<T>) -> Result<Point<T>> {
        match self.apply(&ExtendedPoint::Finite(*x))? {
            ExtendedPoint::Finite(p) => Ok(p),
            ExtendedPoint::Infinity => Err(Error::Argument(format!("{x} is mapped to infinity"))),
        }
    }

    pub fn apply_all(&self, xs: &[Point<T>]) -> Result<Vec<Point<T>>> {
        xs.iter().map(|x| self.apply_finite(x)).collect()
    }
}

/// `apply_map` under its operational name.
pub fn apply_map<T: Real>(f: &MapSpec<T>, x: &ExtendedPoint<T>) -> Result<ExtendedPoint<T>> {
    f.apply(x)
}
