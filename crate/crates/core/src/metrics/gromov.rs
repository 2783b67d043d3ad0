//! Gromov products, four-point hyperbolicity estimates and visual quasi-metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::MetricOracle;
use crate::error::{Error, Result};
use crate::real::Real;

const CHUNK: u64 = 4096;

/// `(x|y)_p = ½(d(x,p) + d(y,p) - d(x,y))`.
#[inline]
pub fn gromov_product<T: Real, M: MetricOracle<T> + ?Sized>(m: &M, p: usize, x: usize, y: usize) -> T {
    (m.dist(x, p) + m.dist(y, p) - m.dist(x, y)) * T::lit(0.5)
}

/// Defect of the four-point inequality at `(x, y, z; p)`, clamped at zero.
#[inline]
pub fn four_point_defect<T: Real, M: MetricOracle<T> + ?Sized>(m: &M, x: usize, y: usize, z: usize, p: usize) -> T {
    let v = gromov_product(m, p, x, z).min(gromov_product(m, p, z, y)) - gromov_product(m, p, x, y);
    v.max(T::zero())
}

/// Result of a four-point scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta: f64,
    /// `[x, y, z, p]` attaining `delta`.
    pub witness: [usize; 4],
    pub budget: u64,
    pub seed: u64,
    pub h: Option<f64>,
    pub scanned: u64,
    pub exhaustive: bool,
}

/// Larger value wins, ties go to the earlier scan index.
fn better<T: Real>(a: (T, u64), b: (T, u64)) -> (T, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn decode(q: u64, n: u64) -> [usize; 4] {
    [(q / (n * n * n)) as usize, ((q / (n * n)) % n) as usize, ((q / n) % n) as usize, (q % n) as usize]
}

/// Sampled quadruple number `k`; chunk `k / CHUNK` draws from its own stream,
/// so a larger budget scans a superset of a smaller one.
fn sampled(seed: u64, chunk: u64, n: usize, count: u64) -> impl Iterator<Item = [usize; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    (0..count).map(move |_| [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)])
}

/// Lower bound for the hyperbolicity constant: the largest four-point defect
/// over all quadruples when `n⁴ <= budget`, else over `budget` seeded samples.
pub fn delta_estimate<T: Real, M: MetricOracle<T> + ?Sized>(m: &M, budget: u64, seed: u64) -> Result<DeltaReport> {
    let n = m.len();
    if n < 4 {
        return Err(Error::Argument(format!("hyperbolicity needs at least 4 points, got {n}")));
    }
    let nn = n as u64;
    let total = nn.checked_pow(4).unwrap_or(u64::MAX);
    let exhaustive = total <= budget;
    let scanned = if exhaustive { total } else { budget };
    let chunks = scanned.div_ceil(CHUNK);
    let (value, index) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let count = CHUNK.min(scanned - start);
            let mut best = (T::neg_infinity(), u64::MAX);
            if exhaustive {
                for q in start..start + count {
                    let [x, y, z, p] = decode(q, nn);
                    best = better(best, (four_point_defect(m, x, y, z, p), q));
                }
            } else {
                for (k, [x, y, z, p]) in sampled(seed, c, n, count).enumerate() {
                    best = better(best, (four_point_defect(m, x, y, z, p), start + k as u64));
                }
            }
            best
        })
        .reduce(|| (T::neg_infinity(), u64::MAX), better);
    let witness = if index == u64::MAX {
        [0; 4]
    } else if exhaustive {
        decode(index, nn)
    } else {
        let c = index / CHUNK;
        sampled(seed, c, n, index % CHUNK + 1).last().unwrap_or([0; 4])
    };
    Ok(DeltaReport { delta: value.max(T::zero()).as_f64(), witness, budget, seed, h: None, scanned, exhaustive })
}

/// Exact hyperbolicity constant with respect to the fixed base point `p`:
/// the largest defect over all `(x, y, z)`. Returns the value and `[x, y, z]`.
pub fn delta_at_base<T: Real, M: MetricOracle<T> + ?Sized>(m: &M, p: usize) -> (T, [usize; 3]) {
    let n = m.len();
    let (v, i) = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = (T::neg_infinity(), u64::MAX);
            for y in 0..n {
                for z in 0..n {
                    best = better(best, (four_point_defect(m, x, y, z, p), ((x * n + y) * n + z) as u64));
                }
            }
            best
        })
        .reduce(|| (T::neg_infinity(), u64::MAX), better);
    let i = i as usize;
    (v.max(T::zero()), [i / (n * n), (i / n) % n, i % n])
}

/// Largest admissible visual parameter for a given hyperbolicity constant: `1 ∧ 1/(5δ)`.
pub fn visual_epsilon<T: Real>(delta: T) -> T {
    if delta <= T::zero() {
        T::one()
    } else {
        T::one().min(T::one() / (T::lit(5.0) * delta))
    }
}

/// Visual quasi-metric `ρ = e^{-ε (x|y)_p}` and its chain regularization.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct VisualData<T: Real> {
    pub base: usize,
    pub epsilon: T,
    pub n: usize,
    /// Row-major Gromov products `(x|y)_p`.
    pub gromov: Vec<T>,
    pub rho: Vec<T>,
    /// Infimum of `Σ ρ(x_i, x_{i+1})` over chains of at least one step.
    pub chain: Vec<T>,
}

impl<T: Real> VisualData<T> {
    pub fn rho(&self, i: usize, j: usize) -> T {
        self.rho[i * self.n + j]
    }

    pub fn chain(&self, i: usize, j: usize) -> T {
        self.chain[i * self.n + j]
    }

    /// Largest `d/ρ` and largest `ρ/(2d)` over all pairs (both ≤ 1 for the sandwich).
    pub fn sandwich_ratios(&self) -> (T, T) {
        let mut lower = T::zero();
        let mut upper = T::zero();
        for (r, d) in self.rho.iter().zip(&self.chain) {
            if *r > T::zero() {
                lower = lower.max(*d / *r);
            }
            if *d > T::zero() {
                upper = upper.max(*r / (T::lit(2.0) * *d));
            } else if *r > T::zero() {
                upper = T::infinity();
            }
        }
        (lower, upper)
    }
}

pub fn visual_data<T: Real, M: MetricOracle<T> + ?Sized>(m: &M, p: usize, epsilon: T) -> Result<VisualData<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::Argument(format!("visual parameter must be positive, got {epsilon}")));
    }
    let n = m.len();
    if p >= n {
        return Err(Error::Argument(format!("base point {p} out of range for {n} points")));
    }
    let mut gromov = vec![T::zero(); n * n];
    let mut rho = vec![T::zero(); n * n];
    for x in 0..n {
        for y in 0..n {
            let g = gromov_product(m, p, x, y);
            gromov[x * n + y] = g;
            rho[x * n + y] = (-epsilon * g).exp();
        }
    }
    let mut chain = rho.clone();
    for k in 0..n {
        let row_k: Vec<T> = chain[k * n..(k + 1) * n].to_vec();
        chain.par_chunks_mut(n).for_each(|row| {
            let via = row[k];
            for (c, &kj) in row.iter_mut().zip(&row_k) {
                let s = via + kj;
                if s < *c {
                    *c = s;
                }
            }
        });
    }
    Ok(VisualData { base: p, epsilon, n, gromov, rho, chain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::metrics::oracle::{DistanceTable, EuclideanOracle};

    fn line(n: usize) -> Vec<Point<f64>> {
        (0..n).map(|i| Point::new2(i as f64 * 3.0 - 7.0, 0.0)).collect()
    }

    #[test]
    fn gromov_examples() {
        let pts = [Point::new2(0.0, 0.0), Point::new2(1.0, 0.0), Point::new2(3.0, 0.0), Point::new2(-2.0, 0.0)];
        let m = EuclideanOracle(&pts);
        assert_eq!(gromov_product(&m, 0, 0, 2), 0.0);
        // p = -2 lies outside [0, 3] on the side of 0
        assert_eq!(gromov_product(&m, 3, 0, 2), 2.0);
        assert_eq!(gromov_product(&m, 1, 2, 3), gromov_product(&m, 1, 3, 2));
    }

    #[test]
    fn line_and_star_are_zero_hyperbolic() {
        let pts = line(10);
        let r = delta_estimate(&EuclideanOracle(&pts), 1_000_000, 0).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.delta, 0.0);
        let star = DistanceTable::from_graph(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(delta_estimate(&star, 1000, 0).unwrap().delta, 0.0);
        assert!(delta_estimate(&EuclideanOracle(&pts[..3]), 10, 0).is_err());
    }

    #[test]
    fn sampled_scan_is_deterministic_and_monotone() {
        let pts: Vec<Point<f64>> = (0..30).map(|i| Point::new2((i as f64).cos() * i as f64, (i as f64 * 1.3).sin())).collect();
        let m = EuclideanOracle(&pts);
        let a = delta_estimate(&m, 20_000, 5).unwrap();
        let b = delta_estimate(&m, 20_000, 5).unwrap();
        assert_eq!(a, b);
        assert!(!a.exhaustive);
        let w = a.witness;
        assert_eq!(four_point_defect(&m, w[0], w[1], w[2], w[3]), a.delta);
        let mut last = 0.0;
        for budget in [1000, 5000, 20_000, 100_000] {
            let r = delta_estimate(&m, budget, 5).unwrap();
            assert!(r.delta >= last);
            last = r.delta;
        }
        let full = delta_estimate(&m, u64::MAX, 5).unwrap();
        assert!(full.exhaustive && full.delta >= last);
    }

    #[test]
    fn base_point_delta_matches_brute_force() {
        let pts: Vec<Point<f64>> = (0..12).map(|i| Point::new2((i * i % 7) as f64, (i % 5) as f64)).collect();
        let m = EuclideanOracle(&pts);
        let (v, [x, y, z]) = delta_at_base(&m, 3);
        let mut oracle = 0.0f64;
        for a in 0..12 {
            for b in 0..12 {
                for c in 0..12 {
                    oracle = oracle.max(four_point_defect(&m, a, b, c, 3));
                }
            }
        }
        assert_eq!(v, oracle);
        assert_eq!(four_point_defect(&m, x, y, z, 3), v);
    }

    #[test]
    fn visual_sandwich_on_tree() {
        let t = DistanceTable::from_graph(5, &[(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5), (3, 4, 1.5)]).unwrap();
        let v = visual_data(&t, 0, 1.0).unwrap();
        let (lower, upper) = v.sandwich_ratios();
        assert!(lower <= 1.0 && upper <= 1.0);
        let pair = EuclideanOracle(&[Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)]);
        let v = visual_data(&pair, 0, 0.5).unwrap();
        assert_eq!(v.chain(0, 1), v.rho(0, 1));
        assert!(visual_data(&pair, 0, 0.0).is_err());
        assert_eq!(visual_epsilon(0.0), 1.0);
        assert_eq!(visual_epsilon(1.0), 0.2);
    }
}
