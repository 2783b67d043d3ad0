//! Points, analytic domains, discretized domains and explicit maps.

pub mod domain;
pub mod map;
pub mod net;
pub mod point;

pub use domain::{Bounds, DomainSpec};
pub use map::{apply_map, MapSpec};
pub use net::{sample_net, sample_net_with, NetOptions, SampledDomain};
pub use point::{diameter, ExtendedPoint, Point};

use crate::error::{Error, Result};
use crate::real::Real;

/// Boundary sample maximizing `min(|z3 - z1|, |z3 - z2|)`; the first maximizer
/// in list order wins.
pub fn separated_third_point<T: Real>(boundary: &[Point<T>], z1: &Point<T>, z2: &Point<T>) -> Result<Point<T>> {
    if boundary.len() < 3 {
        return Err(Error::Argument(format!("need at least 3 boundary points, got {}", boundary.len())));
    }
    if z1 == z2 {
        return Err(Error::Argument("z1 and z2 coincide".into()));
    }
    let mut best = (boundary[0], T::neg_infinity());
    for z in boundary {
        let m = z.dist(z1).min(z.dist(z2));
        if m > best.1 {
            best = (*z, m);
        }
    }
    Ok(best.0)
}
