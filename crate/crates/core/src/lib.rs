//! Numerical toolkit for quasihyperbolic geometry, Gromov hyperbolicity and
//! distortion of quasisymmetric and quasimöbius maps between planar domains.
//!
//! The core is generic over the scalar type; the aliases below fix it to `f64`
//! or `f32`.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod ratio;
pub mod real;
pub mod scenarios;

pub use error::{Error, Result};
pub use real::Real;

pub type Point64 = geometry::Point<f64>;
pub type Point32 = geometry::Point<f32>;
pub type Domain64 = geometry::DomainSpec<f64>;
pub type Domain32 = geometry::DomainSpec<f32>;
pub type Map64 = geometry::MapSpec<f64>;
pub type Map32 = geometry::MapSpec<f32>;
pub type Net64 = geometry::SampledDomain<f64>;
pub type Net32 = geometry::SampledDomain<f32>;
pub type Control64 = ratio::ControlFunction<f64>;
pub type Control32 = ratio::ControlFunction<f32>;
pub type Envelope64 = analysis::DistortionEnvelope<f64>;
pub type Envelope32 = analysis::DistortionEnvelope<f32>;
pub type Table64 = metrics::DistanceTable<f64>;
pub type Table32 = metrics::DistanceTable<f32>;
