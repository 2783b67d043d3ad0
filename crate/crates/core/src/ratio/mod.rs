//! Triple and cross ratios and the algebra of control functions.

pub mod control;
pub mod cross;
pub mod formulas;

pub use control::{cf_compose, cf_eval, cf_inverse, ControlFunction};
pub use cross::{bk_ratio, cross_ratio, theta0, triple_ratio, Tuple4};
pub use formulas::{eta_from_theta_lambda, lambda_from_eta, m1_bound, m2_bound, theta_from_eta, theta_prime};
