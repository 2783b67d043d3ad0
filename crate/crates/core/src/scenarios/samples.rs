//! Declarative point sets for scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Bounds, DomainSpec, Point};

/// A reproducible planar point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleSpec {
    /// `n` equally spaced points on a circle.
    Circle { center: Point<f64>, radius: f64, n: usize },
    /// `n` seeded points uniform in area on `inner ≤ |x - center| ≤ outer`.
    Annulus { center: Point<f64>, inner: f64, outer: f64, n: usize },
    /// Boundary samples of a bounded domain at spacing `h`.
    Boundary { domain: DomainSpec<f64>, h: f64 },
    /// Square lattice of spacing `h` clipped to a domain with its bounding box.
    Lattice { domain: DomainSpec<f64>, h: f64 },
    Points { points: Vec<Point<f64>> },
    Union { parts: Vec<SampleSpec> },
}

impl SampleSpec {
    pub fn circle(radius: f64, n: usize) -> Self {
        SampleSpec::Circle { center: Point::new2(0.0, 0.0), radius, n }
    }

    pub fn annulus(inner: f64, outer: f64, n: usize) -> Self {
        SampleSpec::Annulus { center: Point::new2(0.0, 0.0), inner, outer, n }
    }

    pub fn generate(&self, seed: u64) -> Result<Vec<Point<f64>>> {
        match self {
            SampleSpec::Circle { center, radius, n } => {
                positive(*radius, "radius")?;
                Ok((0..*n)
                    .map(|k| {
                        let t = std::f64::consts::TAU * k as f64 / *n as f64;
                        *center + Point::new2(t.cos(), t.sin()) * *radius
                    })
                    .collect())
            }
            SampleSpec::Annulus { center, inner, outer, n } => {
                if !(*inner >= 0.0 && outer > inner) {
                    return Err(Error::Argument(format!("annulus needs 0 ≤ inner < outer, got {inner}, {outer}")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..*n)
                    .map(|_| {
                        let u: f64 = rng.gen();
                        let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
                        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                        *center + Point::new2(t.cos(), t.sin()) * r
                    })
                    .collect())
            }
            SampleSpec::Boundary { domain, h } => {
                positive(*h, "h")?;
                let b = window(domain)?;
                Ok(domain.boundary_samples(*h, &b))
            }
            SampleSpec::Lattice { domain, h } => {
                positive(*h, "h")?;
                let b = window(domain)?;
                let nx = (b.extent(0) / h).floor() as i64;
                let ny = (b.extent(1) / h).floor() as i64;
                let mut out = Vec::new();
                for i in 0..=nx {
                    for j in 0..=ny {
                        let p = Point::new2(b.lo.x() + i as f64 * h, b.lo.y() + j as f64 * h);
                        if domain.contains_point(&p) {
                            out.push(p);
                        }
                    }
                }
                Ok(out)
            }
            SampleSpec::Points { points } => Ok(points.clone()),
            SampleSpec::Union { parts } => {
                let mut out = Vec::new();
                for (k, p) in parts.iter().enumerate() {
                    out.extend(p.generate(seed.wrapping_add(k as u64))?);
                }
                Ok(out)
            }
        }
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("{what} must be positive, got {v}")))
    }
}

fn window(domain: &DomainSpec<f64>) -> Result<Bounds<f64>> {
    domain.bounding_box().ok_or_else(|| Error::Argument(format!("{} has no bounding box; give explicit points", domain.label())))
}
