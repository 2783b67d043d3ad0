//! Quasisymmetry and quasimöbius control via the three-point condition.

use crate::analysis::{qm_dominated, qm_scan, qs_dominated, qs_scan, three_point_lambda, three_point_lambda_with_diameters, ConstantReport, ScanOptions};
use crate::error::{Error, Result};
use crate::geometry::{diameter, separated_third_point, ExtendedPoint, MapSpec, Point};
use crate::ratio::{eta_from_theta_lambda, lambda_from_eta, theta_from_eta, ControlFunction};

use super::{Check, Comparator, Scenario};

/// Relative slack for envelope-versus-bound checks.
const ENVELOPE_TOL: f64 = 1e-9;

fn extended(x: &[Point<f64>]) -> Vec<ExtendedPoint<f64>> {
    x.iter().map(|&p| p.into()).collect()
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

fn precondition(kind: &str, worst: f64, tuple: &[usize], x: &[Point<f64>]) -> Error {
    let pts: Vec<String> = tuple.iter().map(|&i| x[i].to_string()).collect();
    Error::Precondition(format!("supplied {kind} is exceeded by a factor {worst} on the tuple {}", pts.join(" ")))
}

fn diameter_pair(y: &[Point<f64>]) -> (usize, usize) {
    let mut best = (0.0, 0, 0);
    for i in 0..y.len() {
        for j in i + 1..y.len() {
            let d = y[i].dist(&y[j]);
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    (best.1, best.2)
}

/// Given `η` (fitted from the triple scan when absent) checks the derived
/// quasimöbius control, the three-point constant and the `diam/6` separation of the image.
pub fn run_three_point_necessity(
    f: &MapSpec<f64>,
    x: &[Point<f64>],
    eta: Option<&ControlFunction<f64>>,
    opts: ScanOptions,
    lambda: Option<&ConstantReport>,
) -> Result<Scenario> {
    let mut sc = Scenario::new("run_three_point_necessity").bind("map", json(f)).bind("points", x.len()).bind("seed", opts.seed).bind("budget", opts.budget);
    let eta = match eta {
        Some(e) => e.clone(),
        None => {
            sc.notes.push("η fitted from the triple scan".into());
            qs_scan(f, x, None, opts)?.fit()?
        }
    };
    sc = sc.bind("eta", json(&eta));
    let dom = qs_dominated(f, x, None, &eta, opts)?;
    if let Some(t) = dom.violation {
        return Err(precondition("η", dom.worst_ratio, &t, x));
    }

    let theta = theta_from_eta(&eta);
    let env = qm_scan(f, &extended(x), None, opts)?;
    let chk = env.check_against(&theta)?;
    if chk.nonempty == 0 {
        sc.no_data = true;
    }
    sc.check(Check::new("qm_envelope", "cross-ratio envelope over θ(η) in every bucket", chk.worst_ratio, Comparator::Le, 1.0, ENVELOPE_TOL));

    let lam = match lambda {
        Some(r) => r.clone(),
        None => three_point_lambda(f, x, opts)?.0,
    };
    let bound = lambda_from_eta(&eta)?;
    sc.check(Check::new("lambda", "three-point constant λ̂ against λ(η)", lam.value, Comparator::Le, bound, 1e-12 * bound));
    sc.reports.push(lam);

    let y = f.apply_all(x)?;
    let (i, j) = diameter_pair(&y);
    let dy = y[i].dist(&y[j]);
    let z3 = separated_third_point(&y, &y[i], &y[j])?;
    let sep = z3.dist(&y[i]).min(z3.dist(&y[j]));
    sc.check(Check::new("separation", "third image point at distance ≥ diam(Y)/6 from a diameter pair", sep, Comparator::Ge, dy / 6.0, 0.0));
    Ok(sc)
}

/// Given `θ` (fitted from the quadruple scan when absent) and `λ̂`, checks the
/// triple-ratio envelope against `η(t) = 3λ θ′(3λ t)`.
pub fn run_three_point_sufficiency(
    f: &MapSpec<f64>,
    x: &[Point<f64>],
    theta: Option<&ControlFunction<f64>>,
    opts: ScanOptions,
    lambda: Option<&ConstantReport>,
) -> Result<Scenario> {
    let mut sc = Scenario::new("run_three_point_sufficiency").bind("map", json(f)).bind("points", x.len()).bind("seed", opts.seed).bind("budget", opts.budget);
    let xe = extended(x);
    let theta = match theta {
        Some(t) => t.clone(),
        None => {
            sc.notes.push("θ fitted from the quadruple scan".into());
            qm_scan(f, &xe, None, opts)?.fit()?
        }
    };
    sc = sc.bind("theta", json(&theta));
    let dom = qm_dominated(f, &xe, None, &theta, opts)?;
    if let Some(t) = dom.violation {
        return Err(precondition("θ", dom.worst_ratio, &t, x));
    }
    let lam = match lambda {
        Some(r) => r.clone(),
        None => three_point_lambda(f, x, opts)?.0,
    };
    let eta = eta_from_theta_lambda(&theta, lam.value)?;
    let env = qs_scan(f, x, None, opts)?;
    let chk = env.check_against(&eta)?;
    if chk.nonempty == 0 {
        sc.no_data = true;
    }
    sc.check(Check::new("qs_envelope", "triple-ratio envelope over 3λ̂ θ′(3λ̂ t) in every bucket", chk.worst_ratio, Comparator::Le, 1.0, ENVELOPE_TOL));
    sc.reports.push(lam);
    Ok(sc)
}

/// Both directions on the same `(f, X)` with a single three-point computation.
pub fn run_three_point_pair(
    f: &MapSpec<f64>,
    x: &[Point<f64>],
    eta: Option<&ControlFunction<f64>>,
    theta: Option<&ControlFunction<f64>>,
    opts: ScanOptions,
) -> Result<Vec<Scenario>> {
    let (lam, _) = three_point_lambda(f, x, opts)?;
    Ok(vec![run_three_point_necessity(f, x, eta, opts, Some(&lam))?, run_three_point_sufficiency(f, x, theta, opts, Some(&lam))?])
}

/// Sufficiency on interior and boundary samples with `λ̂` taken over boundary triples only.
pub fn run_boundary_three_point(
    f: &MapSpec<f64>,
    interior: &[Point<f64>],
    boundary: &[Point<f64>],
    theta: Option<&ControlFunction<f64>>,
    opts: ScanOptions,
) -> Result<Scenario> {
    let all: Vec<Point<f64>> = interior.iter().chain(boundary).copied().collect();
    let dx = diameter(&all)?;
    let dy = diameter(&f.apply_all(&all)?)?;
    let (lam, _) = three_point_lambda_with_diameters(f, boundary, dx, dy, opts)?;
    let mut sc = run_three_point_sufficiency(f, &all, theta, opts, Some(&lam))?;
    sc.name = "run_three_point_boundary".into();
    sc = sc.bind("boundary_points", boundary.len());
    sc.notes.push("λ̂ restricted to boundary triples, diameters of the whole sample".into());
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::SampleSpec;
    use std::collections::BTreeMap;

    fn opts() -> ScanOptions {
        ScanOptions { budget: 2_000_000, seed: 11 }
    }

    fn square_boundary() -> Vec<Point<f64>> {
        let sq = crate::geometry::DomainSpec::Rectangle { lo: Point::new2(0.0, 0.0), hi: Point::new2(1.0, 1.0) };
        SampleSpec::Boundary { domain: sq, h: 0.05 }.generate(0).unwrap()
    }

    #[test]
    fn identity_and_similarity_on_square_boundary() {
        let x = square_boundary();
        let id = ControlFunction::identity();
        for f in [MapSpec::Identity, MapSpec::similarity(2.0)] {
            let v = run_three_point_pair(&f, &x, Some(&id), Some(&id), opts()).unwrap();
            for s in v {
                let s = s.finish(&BTreeMap::new());
                assert!(s.pass, "{:?}", s.failing().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn radial_power_with_fitted_controls() {
        let x = SampleSpec::annulus(0.1, 1.0, 70).generate(5).unwrap();
        let f = MapSpec::RadialPower { alpha: 2.0 };
        let v = run_three_point_pair(&f, &x, None, None, opts()).unwrap();
        assert_eq!(v[0].reports[0], v[1].reports[0]);
        for s in v {
            let s = s.finish(&BTreeMap::new());
            assert!(s.pass, "{}: {:?}", s.name, s.failing().collect::<Vec<_>>());
        }
    }

    #[test]
    fn violated_precondition_aborts() {
        let x = SampleSpec::annulus(0.1, 1.0, 20).generate(5).unwrap();
        let f = MapSpec::RadialPower { alpha: 3.0 };
        let e = run_three_point_necessity(&f, &x, Some(&ControlFunction::identity()), opts(), None);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn boundary_triple_variant() {
        let b = SampleSpec::circle(1.0, 60).generate(0).unwrap();
        let inner = SampleSpec::annulus(0.2, 0.9, 30).generate(1).unwrap();
        let one = num_complex::Complex::new(1.0, 0.0);
        let f = MapSpec::MobiusPlane { a: one, b: num_complex::Complex::new(0.2, 0.0), c: num_complex::Complex::new(0.2, 0.0), d: one };
        let s = run_boundary_three_point(&f, &inner, &b, None, opts()).unwrap().finish(&BTreeMap::new());
        assert!(s.pass, "{:?}", s.failing().collect::<Vec<_>>());
    }
}
