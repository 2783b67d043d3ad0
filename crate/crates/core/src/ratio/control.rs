//! Increasing homeomorphisms of `[0, ∞)` as composable values.

use serde::{Deserialize, Serialize};

use super::cross::theta0;
use crate::error::{Error, Result};
use crate::real::Real;

const BISECTION_CAP: usize = 200;
const BRACKET_CAP: usize = 4000;

/// A control function `[0, ∞) → [0, ∞)`, strictly increasing with value 0 at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ControlFunction<T: Real> {
    /// `t ↦ L t`.
    LinearScale(T),
    /// `t ↦ M (t^{1/α} ∨ t^α)`, `α ≥ 1`.
    Power { m: T, alpha: T },
    /// `t ↦ 3 (t ∨ √t)`.
    Theta0,
    /// Piecewise linear in log-log coordinates through `(t, f(t))` nodes, extended
    /// by the end slopes.
    Table(Vec<(T, T)>),
    /// `f₁ ∘ f₂ ∘ ⋯ ∘ f_k`, evaluated right to left.
    Composed(Vec<ControlFunction<T>>),
    /// The inverse function, evaluated by bisection.
    NumericInverse(Box<ControlFunction<T>>),
    /// `t ↦ 1 / f(1/t)`, with value 0 at 0.
    Reciprocal(Box<ControlFunction<T>>),
}

impl<T: Real> ControlFunction<T> {
    pub fn identity() -> Self {
        ControlFunction::LinearScale(T::one())
    }

    pub fn power(m: T, alpha: T) -> Result<Self> {
        let f = ControlFunction::Power { m, alpha };
        f.validate()?;
        Ok(f)
    }

    /// A table from increasing nodes; both coordinates must be positive and strictly increasing.
    pub fn table(nodes: Vec<(T, T)>) -> Result<Self> {
        let f = ControlFunction::Table(nodes);
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ControlFunction::LinearScale(l) => {
                if !(*l > T::zero()) || !l.is_finite() {
                    return Err(Error::Argument(format!("linear scale must be positive, got {l}")));
                }
            }
            ControlFunction::Power { m, alpha } => {
                if !(*m > T::zero()) || !(*alpha >= T::one()) || !m.is_finite() || !alpha.is_finite() {
                    return Err(Error::Argument(format!("power control needs M > 0 and α ≥ 1, got M = {m}, α = {alpha}")));
                }
            }
            ControlFunction::Theta0 => {}
            ControlFunction::Table(nodes) => {
                if nodes.is_empty() {
                    return Err(Error::Argument("control table has no nodes".into()));
                }
                if nodes.iter().any(|&(t, v)| !(t > T::zero() && v > T::zero() && t.is_finite() && v.is_finite())) {
                    return Err(Error::Argument("control table nodes must be positive and finite".into()));
                }
                if nodes.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
                    return Err(Error::Argument("control table nodes must be strictly increasing in both coordinates".into()));
                }
            }
            ControlFunction::Composed(fs) => {
                if fs.is_empty() {
                    return Err(Error::Argument("empty composition".into()));
                }
                fs.iter().try_for_each(|f| f.validate())?;
            }
            ControlFunction::NumericInverse(f) | ControlFunction::Reciprocal(f) => f.validate()?,
        }
        Ok(())
    }

    pub fn eval(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::Argument(format!("control functions are evaluated at t ≥ 0, got {t}")));
        }
        if t == T::zero() {
            return Ok(T::zero());
        }
        if t.is_infinite() {
            return Ok(T::infinity());
        }
        match self {
            ControlFunction::LinearScale(l) => Ok(*l * t),
            ControlFunction::Power { m, alpha } => Ok(*m * t.powf(T::one() / *alpha).max(t.powf(*alpha))),
            ControlFunction::Theta0 => Ok(theta0(t)),
            ControlFunction::Table(nodes) => Ok(table_eval(nodes, t)),
            ControlFunction::Composed(fs) => fs.iter().rev().try_fold(t, |acc, f| f.eval(acc)),
            ControlFunction::NumericInverse(f) => invert(f, t),
            ControlFunction::Reciprocal(f) => {
                let v = f.eval(T::one() / t)?;
                Ok(T::one() / v)
            }
        }
    }

    /// `self ∘ g`.
    pub fn compose(self, g: ControlFunction<T>) -> Self {
        ControlFunction::Composed(vec![self, g])
    }

    pub fn inverse(self) -> Self {
        ControlFunction::NumericInverse(Box::new(self))
    }

    pub fn reciprocal(self) -> Self {
        ControlFunction::Reciprocal(Box::new(self))
    }
}

/// `f ∘ g`.
pub fn cf_compose<T: Real>(f: ControlFunction<T>, g: ControlFunction<T>) -> ControlFunction<T> {
    f.compose(g)
}

pub fn cf_inverse<T: Real>(f: ControlFunction<T>) -> ControlFunction<T> {
    f.inverse()
}

pub fn cf_eval<T: Real>(f: &ControlFunction<T>, t: T) -> Result<T> {
    f.eval(t)
}

fn table_eval<T: Real>(nodes: &[(T, T)], t: T) -> T {
    if nodes.len() == 1 {
        return nodes[0].1 * t / nodes[0].0;
    }
    let k = nodes.partition_point(|&(x, _)| x <= t);
    let i = k.clamp(1, nodes.len() - 1);
    let (t0, v0) = nodes[i - 1];
    let (t1, v1) = nodes[i];
    if t == t0 {
        return v0;
    }
    if t == t1 {
        return v1;
    }
    let slope = (v1 / v0).ln() / (t1 / t0).ln();
    v0 * (t / t0).powf(slope)
}

/// Smallest representable bracket around `f⁻¹(t)`, found by doubling and then bisection.
fn invert<T: Real>(f: &ControlFunction<T>, t: T) -> Result<T> {
    let two = T::lit(2.0);
    let mut hi = T::one();
    let mut lo;
    let mut steps = 0;
    if f.eval(hi)? >= t {
        lo = hi / two;
        while f.eval(lo)? >= t {
            hi = lo;
            lo = lo / two;
            steps += 1;
            if steps > BRACKET_CAP || lo == T::zero() {
                return Ok(lo);
            }
        }
    } else {
        lo = hi;
        hi = hi * two;
        while f.eval(hi)? < t {
            lo = hi;
            hi = hi * two;
            steps += 1;
            if steps > BRACKET_CAP || hi.is_infinite() {
                return Err(Error::Range(format!("no preimage of {t} found below {lo}")));
            }
        }
    }
    for _ in 0..BISECTION_CAP {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f.eval(mid)?;
        if v.is_nan() {
            return Err(Error::Range(format!("function is undefined at {mid}")));
        }
        if v < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f.eval(lo)?, f.eval(hi)?);
    Ok(if t - flo <= fhi - t { lo } else { hi })
}
