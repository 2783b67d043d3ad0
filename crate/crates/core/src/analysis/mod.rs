//! Empirical distortion envelopes and constants of maps between domains.

pub mod distortion;
pub mod domains;
pub mod envelope;

pub use distortion::*;
pub use domains::*;
pub use envelope::*;
