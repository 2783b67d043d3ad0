//! Scans of triple and cross ratio distortion, and pointwise distortion constants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::envelope::{scan_tuples, ConstantReport, DistortionEnvelope, ScanOptions};
use crate::error::{Error, Result};
use crate::geometry::{diameter, DomainSpec, ExtendedPoint, MapSpec, Point};
use crate::ratio::{cross_ratio, ControlFunction, Tuple4};
use crate::real::Real;

fn membership(n: usize, a: Option<&[usize]>) -> Result<Option<Vec<bool>>> {
    let Some(a) = a else { return Ok(None) };
    let mut m = vec![false; n];
    for &i in a {
        if i >= n {
            return Err(Error::Argument(format!("subset index {i} out of range for {n} points")));
        }
        m[i] = true;
    }
    Ok(Some(m))
}

/// Triples `(x, y, z)` allowed relative to `A`: `x ∈ A` or `{y, z} ⊆ A`.
pub fn triple_in_pair(a: &[bool], t: &[usize]) -> bool {
    a[t[0]] || (a[t[1]] && a[t[2]])
}

/// Quadruples `(x, y, z, w)` allowed relative to `A`: `{x, w} ⊆ A` or `{y, z} ⊆ A`.
pub fn quadruple_in_pair(a: &[bool], t: &[usize]) -> bool {
    (a[t[0]] && a[t[3]]) || (a[t[1]] && a[t[2]])
}

#[inline]
fn triple_ratios<T: Real>(x: &[Point<T>], y: &[Point<T>], t: &[usize]) -> Option<(T, T)> {
    let (a, b, c) = (t[0], t[1], t[2]);
    let den = x[c].dist(&x[a]);
    let den_img = y[c].dist(&y[a]);
    if den == T::zero() || den_img == T::zero() {
        return None;
    }
    Some((x[b].dist(&x[a]) / den, y[b].dist(&y[a]) / den_img))
}

fn quad_ratios<T: Real>(x: &[ExtendedPoint<T>], y: &[ExtendedPoint<T>], t: &[usize]) -> Option<(T, T)> {
    let q = Tuple4::new(x[t[0]], x[t[1]], x[t[2]], x[t[3]]).ok()?;
    let qi = Tuple4::new(y[t[0]], y[t[1]], y[t[2]], y[t[3]]).ok()?;
    Some((cross_ratio(&q).ok()?, cross_ratio(&qi).ok()?))
}

/// Triple-ratio distortion of `f` on `X`, relative to `A ⊆ X` when given (as indices).
pub fn qs_scan<T: Real>(f: &MapSpec<T>, x: &[Point<T>], a: Option<&[usize]>, opts: ScanOptions) -> Result<DistortionEnvelope<T>> {
    if x.len() < 3 {
        return Err(Error::Argument(format!("triple scans need at least 3 points, got {}", x.len())));
    }
    let y = f.apply_all(x)?;
    let inside = membership(x.len(), a)?;
    Ok(scan_tuples(
        x.len(),
        3,
        opts,
        |t| inside.as_ref().map_or(true, |m| triple_in_pair(m, t)),
        |t| triple_ratios(x, &y, t),
    ))
}

/// Cross-ratio distortion of `f` on `X ⊆ Ê`, relative to `A ⊆ X` when given.
pub fn qm_scan<T: Real>(
    f: &MapSpec<T>,
    x: &[ExtendedPoint<T>],
    a: Option<&[usize]>,
    opts: ScanOptions,
) -> Result<DistortionEnvelope<T>> {
    if x.len() < 4 {
        return Err(Error::Argument(format!("quadruple scans need at least 4 points, got {}", x.len())));
    }
    let y: Vec<ExtendedPoint<T>> = x.iter().map(|p| f.apply(p)).collect::<Result<_>>()?;
    let inside = membership(x.len(), a)?;
    Ok(scan_tuples(
        x.len(),
        4,
        opts,
        |t| inside.as_ref().map_or(true, |m| quadruple_in_pair(m, t)),
        |t| quad_ratios(x, &y, t),
    ))
}

/// `diam X / (4 min |x - y|)`: ratios beyond this (or below its reciprocal) are
/// realized by too few configurations of `X` to compare across resolutions.
pub fn resolved_ratio<T: Real>(x: &[Point<T>]) -> Result<T> {
    let n = x.len();
    let min = (0..n)
        .into_par_iter()
        .map(|i| x[i + 1..].iter().map(|q| q.dist(&x[i])).filter(|&d| d > T::zero()).fold(T::infinity(), T::min))
        .reduce(|| T::infinity(), T::min);
    if min.is_infinite() {
        return Err(Error::Degenerate("fewer than two distinct points".into()));
    }
    Ok(diameter(x)? / (T::lit(4.0) * min))
}

/// Relative excess over the bound treated as rounding rather than a violation.
pub const DOMINATION_SLACK: f64 = 1e-9;

/// First scanned tuple violating `s ≤ bound(t)`, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Domination<T: Real> {
    pub checked: u64,
    pub worst_ratio: T,
    pub violation: Option<Vec<usize>>,
}

fn dominates<T: Real>(
    n: usize,
    arity: usize,
    opts: ScanOptions,
    bound: &ControlFunction<T>,
    qualifies: impl Fn(&[usize]) -> bool + Sync,
    eval: impl Fn(&[usize]) -> Option<(T, T)> + Sync,
) -> Result<Domination<T>> {
    // reuse the scan with s/bound(t) as the output so the worst tuple is the witness
    let failed = std::sync::atomic::AtomicBool::new(false);
    let env = scan_tuples(n, arity, opts, qualifies, |t| {
        let (u, s) = eval(t)?;
        match bound.eval(u) {
            Ok(b) if b > T::zero() => Some((T::one(), s / b)),
            Ok(_) => Some((T::one(), if s > T::zero() { T::infinity() } else { T::zero() })),
            Err(_) => {
                failed.store(true, std::sync::atomic::Ordering::Relaxed);
                None
            }
        }
    });
    if failed.into_inner() {
        return Err(Error::Range("control function could not be evaluated on the scanned ratios".into()));
    }
    let worst = env.nonempty().next().map(|(_, b)| (b.sup, b.witness.clone()));
    Ok(match worst {
        None => Domination { checked: env.scanned, worst_ratio: T::zero(), violation: None },
        Some((r, w)) => Domination { checked: env.scanned, worst_ratio: r, violation: if r > T::one() + T::lit(DOMINATION_SLACK) { Some(w) } else { None } },
    })
}

/// Checks `|y'-x'|/|z'-x'| ≤ η(|y-x|/|z-x|)` tuple by tuple.
pub fn qs_dominated<T: Real>(f: &MapSpec<T>, x: &[Point<T>], a: Option<&[usize]>, eta: &ControlFunction<T>, opts: ScanOptions) -> Result<Domination<T>> {
    let y = f.apply_all(x)?;
    let inside = membership(x.len(), a)?;
    dominates(x.len(), 3, opts, eta, |t| inside.as_ref().map_or(true, |m| triple_in_pair(m, t)), |t| triple_ratios(x, &y, t))
}

/// Checks `τ(Q') ≤ θ(τ(Q))` quadruple by quadruple.
pub fn qm_dominated<T: Real>(
    f: &MapSpec<T>,
    x: &[ExtendedPoint<T>],
    a: Option<&[usize]>,
    theta: &ControlFunction<T>,
    opts: ScanOptions,
) -> Result<Domination<T>> {
    let y: Vec<ExtendedPoint<T>> = x.iter().map(|p| f.apply(p)).collect::<Result<_>>()?;
    let inside = membership(x.len(), a)?;
    dominates(x.len(), 4, opts, theta, |t| inside.as_ref().map_or(true, |m| quadruple_in_pair(m, t)), |t| quad_ratios(x, &y, t))
}

fn min_pairwise<T: Real>(p: &[Point<T>], i: usize, j: usize, k: usize) -> T {
    p[i].dist(&p[j]).min(p[j].dist(&p[k])).min(p[i].dist(&p[k]))
}

/// Three-point constant with supplied diameters for source and image.
///
/// `λ̂ = min over triples of max(diam X / min pairwise, diam f(X) / min pairwise')`.
/// Exhaustive over unordered triples for up to 300 points, else seeded
/// sampling of `opts.budget` triples; ties keep the first triple in scan order.
pub fn three_point_lambda_with_diameters<T: Real>(
    f: &MapSpec<T>,
    x: &[Point<T>],
    diam_x: T,
    diam_y: T,
    opts: ScanOptions,
) -> Result<(ConstantReport, [usize; 3])> {
    if x.len() < 3 {
        return Err(Error::Argument(format!("three-point constant needs at least 3 points, got {}", x.len())));
    }
    if !(diam_x > T::zero()) || !(diam_y > T::zero()) {
        return Err(Error::Degenerate(format!("diameters {diam_x} and {diam_y} must be positive")));
    }
    let y = f.apply_all(x)?;
    let n = x.len();
    let value = |i: usize, j: usize, k: usize| -> T {
        let a = min_pairwise(x, i, j, k);
        let b = min_pairwise(&y, i, j, k);
        if a == T::zero() || b == T::zero() {
            return T::infinity();
        }
        (diam_x / a).max(diam_y / b)
    };
    let pick = |a: (T, u64, [usize; 3]), b: (T, u64, [usize; 3])| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a };
    let none = (T::infinity(), u64::MAX, [0usize; 3]);
    let exhaustive = n <= 300;
    let best = if exhaustive {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = none;
                for j in i + 1..n {
                    for k in j + 1..n {
                        let idx = ((i * n + j) * n + k) as u64;
                        best = pick(best, (value(i, j, k), idx, [i, j, k]));
                    }
                }
                best
            })
            .reduce(|| none, pick)
    } else {
        let env = scan_tuples(n, 3, opts, |t| t[0] < t[1] && t[1] < t[2], |t| {
            // minimize λ by maximizing its reciprocal
            let v = value(t[0], t[1], t[2]);
            Some((T::one(), T::one() / v))
        });
        let found = env.nonempty().next().map(|(_, b)| (T::one() / b.sup, b.witness_index, [b.witness[0], b.witness[1], b.witness[2]]));
        found.unwrap_or(none)
    };
    if best.0.is_infinite() {
        return Err(Error::Degenerate("every triple has coincident source or image points".into()));
    }
    let [i, j, k] = best.2;
    let mut rep = ConstantReport::new("three_point_lambda", best.0.as_f64()).with_witness(&[x[i], x[j], x[k]]);
    rep.budget = if exhaustive { (n * (n - 1) * (n - 2) / 6) as u64 } else { opts.budget };
    rep.seed = opts.seed;
    rep = rep.detail("diam_source", diam_x.as_f64()).detail("diam_image", diam_y.as_f64());
    Ok((rep, best.2))
}

/// Three-point constant using the diameters of `X` and `f(X)` themselves.
pub fn three_point_lambda<T: Real>(f: &MapSpec<T>, x: &[Point<T>], opts: ScanOptions) -> Result<(ConstantReport, [usize; 3])> {
    let y = f.apply_all(x)?;
    let (dx, dy) = (diameter(x)?, diameter(&y)?);
    three_point_lambda_with_diameters(f, x, dx, dy, opts)
}

/// `L̂ = max over pairs of max(|x'-y'|/|x-y|, |x-y|/|x'-y'|)`.
pub fn bilipschitz_constant<T: Real>(f: &MapSpec<T>, x: &[Point<T>]) -> Result<ConstantReport> {
    if x.len() < 2 {
        return Err(Error::Argument("bilipschitz constant needs at least 2 points".into()));
    }
    let y = f.apply_all(x)?;
    let n = x.len();
    let none = (T::neg_infinity(), 0usize, 0usize);
    let (v, i, j) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = none;
            for j in i + 1..n {
                let (a, b) = (x[i].dist(&x[j]), y[i].dist(&y[j]));
                if a == T::zero() || b == T::zero() {
                    continue;
                }
                let r = (b / a).max(a / b);
                if r > best.0 {
                    best = (r, i, j);
                }
            }
            best
        })
        .reduce(|| none, |a, b| if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a });
    if v == T::neg_infinity() {
        return Err(Error::Degenerate("no pair of distinct points".into()));
    }
    let mut rep = ConstantReport::new("bilipschitz_L", v.as_f64()).with_witness(&[x[i], x[j]]);
    rep.budget = (n * (n - 1) / 2) as u64;
    Ok(rep)
}

/// `(L, ϑ)`-local bilipschitz scan with `c_x` the geometric mean of pair ratios in `B(x, ϑ d(x))`.
pub fn locally_bilipschitz_scan<T: Real>(f: &MapSpec<T>, domain: &DomainSpec<T>, x: &[Point<T>], vartheta: T) -> Result<ConstantReport> {
    if !(vartheta > T::zero() && vartheta < T::one()) {
        return Err(Error::Argument(format!("ϑ must lie in (0, 1), got {vartheta}")));
    }
    let y = f.apply_all(x)?;
    let d: Vec<T> = x.iter().map(|p| domain.boundary_distance(p)).collect::<Result<_>>()?;
    let n = x.len();
    let per_center: Vec<Option<(T, T, usize, usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|c| {
            let r = vartheta * d[c];
            let ball: Vec<usize> = (0..n).filter(|&k| x[k].dist(&x[c]) < r).collect();
            if ball.len() < 3 {
                return None;
            }
            let mut ratios = Vec::new();
            for (a, &i) in ball.iter().enumerate() {
                for &j in &ball[a + 1..] {
                    let (u, v) = (x[i].dist(&x[j]), y[i].dist(&y[j]));
                    if u > T::zero() && v > T::zero() {
                        ratios.push((v / u, i, j));
                    }
                }
            }
            if ratios.is_empty() {
                return None;
            }
            let log_mean = ratios.iter().map(|r| r.0.ln()).fold(T::zero(), |a, b| a + b) / T::from_usize_lossy(ratios.len());
            let cx = log_mean.exp();
            let mut worst = (T::one(), 0, 0);
            for &(r, i, j) in &ratios {
                let q = (r / cx).max(cx / r);
                if q > worst.0 {
                    worst = (q, i, j);
                }
            }
            Some((worst.0, cx, c, worst.1, worst.2))
        })
        .collect();
    let used = per_center.iter().flatten().count();
    let best = per_center.iter().flatten().fold(None::<(T, T, usize, usize, usize)>, |a, &b| match a {
        Some(a) if a.0 >= b.0 => Some(a),
        _ => Some(b),
    });
    let Some((l, cx, c, i, j)) = best else {
        return Err(Error::EmptyScan("no center has two neighbours in its ball".into()));
    };
    let (cmin, cmax) = per_center.iter().flatten().fold((T::infinity(), T::zero()), |acc, b| (acc.0.min(b.1), acc.1.max(b.1)));
    Ok(ConstantReport::new("local_bilipschitz_L", l.as_f64())
        .with_witness(&[x[c], x[i], x[j]])
        .detail("c_x_at_witness", cx.as_f64())
        .detail("c_x_min", cmin.as_f64())
        .detail("c_x_max", cmax.as_f64())
        .detail("centers_used", used as f64)
        .detail("centers_skipped", (n - used) as f64))
}

/// `Ĉ = sup over pairs with |x-y| < μ d(x)` of the distortion of `|x-y| / d(x)`.
pub fn local_ratio_scan<T: Real>(
    f: &MapSpec<T>,
    domain: &DomainSpec<T>,
    image_domain: &DomainSpec<T>,
    x: &[Point<T>],
    mu: T,
) -> Result<ConstantReport> {
    if !(mu > T::zero() && mu < T::one()) {
        return Err(Error::Argument(format!("μ must lie in (0, 1), got {mu}")));
    }
    let y = f.apply_all(x)?;
    let d: Vec<T> = x.iter().map(|p| domain.boundary_distance(p)).collect::<Result<_>>()?;
    let dy: Vec<T> = y.iter().map(|p| image_domain.boundary_distance(p)).collect::<Result<_>>()?;
    let n = x.len();
    let none = (T::neg_infinity(), 0usize, 0usize, 0u64);
    let (c, i, j, pairs) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = none;
            for j in 0..n {
                let u = x[i].dist(&x[j]);
                if j == i || u == T::zero() || !(u < mu * d[i]) {
                    continue;
                }
                best.3 += 1;
                let a = u / d[i];
                let b = y[i].dist(&y[j]) / dy[i];
                let q = (b / a).max(a / b);
                if q > best.0 {
                    best = (q, i, j, best.3);
                }
            }
            best
        })
        .reduce(
            || none,
            |a, b| {
                let count = a.3 + b.3;
                let win = if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a };
                (win.0, win.1, win.2, count)
            },
        );
    if pairs == 0 {
        return Err(Error::EmptyScan(format!("no pair with |x - y| < {mu} d(x)")));
    }
    Ok(ConstantReport::new("local_ratio_C", c.as_f64()).with_witness(&[x[i], x[j]]).detail("pairs", pairs as f64).detail("mu", mu.as_f64()))
}
