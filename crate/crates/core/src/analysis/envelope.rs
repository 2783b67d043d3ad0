//! Bucketed distortion data and the tuple scan that fills it.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratio::ControlFunction;
use crate::real::Real;

pub const BUCKETS: usize = 64;
pub const T_LO: f64 = 1e-4;
pub const T_HI: f64 = 1e4;
const CHUNK: u64 = 4096;

/// Scan size and seed; exhaustive whenever all tuples fit in the budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub budget: u64,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { budget: 2_000_000, seed: 0 }
    }
}

/// Index of the log-spaced bucket containing `t`; out-of-range values land in the end buckets.
pub fn bucket_of<T: Real>(t: T) -> usize {
    let t = t.as_f64();
    if !(t > T_LO) {
        return 0;
    }
    let u = (t.log10() - T_LO.log10()) / (T_HI.log10() - T_LO.log10());
    ((u * BUCKETS as f64).floor() as i64).clamp(0, BUCKETS as i64 - 1) as usize
}

/// Nominal edges `[lo, hi)` of bucket `b`.
pub fn bucket_edges(b: usize) -> (f64, f64) {
    let step = (T_HI.log10() - T_LO.log10()) / BUCKETS as f64;
    let lo = 10f64.powf(T_LO.log10() + step * b as f64);
    let hi = 10f64.powf(T_LO.log10() + step * (b + 1) as f64);
    (lo, hi)
}

/// Data of one nonempty bucket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Bucket<T: Real> {
    /// Largest output ratio seen.
    pub sup: T,
    /// Input ratio of the tuple attaining `sup`.
    pub sup_t: T,
    pub t_min: T,
    pub t_max: T,
    pub count: u64,
    /// Point indices of the tuple attaining `sup`.
    pub witness: Vec<usize>,
    /// Position of the witness in the scan order.
    pub witness_index: u64,
}

/// Supremum of output ratios per input-ratio bucket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DistortionEnvelope<T: Real> {
    pub buckets: Vec<Option<Bucket<T>>>,
    /// Tuples evaluated.
    pub scanned: u64,
    /// Tuples skipped because an input or output ratio was undefined.
    pub degenerate: u64,
    /// Tuples outside the relative pair condition or with repeated indices.
    pub excluded: u64,
    pub exhaustive: bool,
    pub options: ScanOptions,
}

/// Comparison of an envelope against a control function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EnvelopeCheck<T: Real> {
    /// Largest `sup / bound(t_max)` over nonempty buckets.
    pub worst_ratio: T,
    pub worst_bucket: Option<usize>,
    pub nonempty: usize,
    pub passes: bool,
}

impl<T: Real> DistortionEnvelope<T> {
    pub fn nonempty(&self) -> impl Iterator<Item = (usize, &Bucket<T>)> {
        self.buckets.iter().enumerate().filter_map(|(i, b)| b.as_ref().map(|b| (i, b)))
    }

    pub fn is_empty(&self) -> bool {
        self.nonempty().next().is_none()
    }

    /// Running maximum of bucket suprema, `None` before the first nonempty bucket.
    pub fn monotone(&self) -> Vec<Option<T>> {
        let mut acc: Option<T> = None;
        self.buckets
            .iter()
            .map(|b| {
                if let Some(b) = b {
                    acc = Some(acc.map_or(b.sup, |a| a.max(b.sup)));
                }
                acc
            })
            .collect()
    }

    /// Largest bucket supremum.
    pub fn max_sup(&self) -> Option<T> {
        self.nonempty().map(|(_, b)| b.sup).fold(None, |a, s| Some(a.map_or(s, |a: T| a.max(s))))
    }

    /// Checks `sup ≤ bound(t_max)` bucketwise, which every tuple satisfying
    /// `s ≤ bound(t)` implies.
    pub fn check_against(&self, bound: &ControlFunction<T>) -> Result<EnvelopeCheck<T>> {
        let mut worst = T::zero();
        let mut worst_bucket = None;
        let mut nonempty = 0;
        for (i, b) in self.nonempty() {
            nonempty += 1;
            let r = b.sup / bound.eval(b.t_max)?;
            if worst_bucket.is_none() || r > worst {
                worst = r;
                worst_bucket = Some(i);
            }
        }
        Ok(EnvelopeCheck { worst_ratio: worst, worst_bucket, nonempty, passes: worst <= T::one() })
    }

    /// Increasing table through `(t_min, running max)` per nonempty bucket.
    ///
    /// Every scanned tuple `(t, s)` satisfies `s ≤ table(t)`, since its bucket
    /// node lies at or left of `t` and carries at least `s`.
    pub fn fit(&self) -> Result<ControlFunction<T>> {
        let mut nodes: Vec<(T, T)> = Vec::new();
        let mut run = T::zero();
        let ramp = T::one() + T::lit(1e-9);
        for (_, b) in self.nonempty() {
            run = run.max(b.sup);
            if let Some(&(_, prev)) = nodes.last() {
                run = run.max(prev * ramp);
            }
            if !(b.t_min > T::zero()) || !(run > T::zero()) {
                continue;
            }
            nodes.push((b.t_min, run));
        }
        if nodes.is_empty() {
            return Err(Error::EmptyScan("no positive ratios to fit".into()));
        }
        ControlFunction::table(nodes)
    }

    /// Largest ratio `sup_fine / sup_coarse` over buckets nonempty in both envelopes.
    pub fn growth_over(&self, coarse: &DistortionEnvelope<T>) -> Option<T> {
        self.growth_within(coarse, T::zero(), T::infinity())
    }

    /// As [`growth_over`](Self::growth_over), restricted to coarse buckets whose
    /// observed ratios lie in `[t_lo, t_hi]`.
    pub fn growth_within(&self, coarse: &DistortionEnvelope<T>, t_lo: T, t_hi: T) -> Option<T> {
        let mut g: Option<T> = None;
        for (i, b) in self.nonempty() {
            if let Some(c) = coarse.buckets[i].as_ref().filter(|c| c.t_min >= t_lo && c.t_max <= t_hi) {
                let r = b.sup / c.sup;
                g = Some(g.map_or(r, |x| x.max(r)));
            }
        }
        g
    }

    /// Writes `t_bucket,sup_ratio,witness_id` rows for nonempty buckets.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t_bucket", "sup_ratio", "witness_id"])?;
        for (i, b) in self.nonempty() {
            let (lo, hi) = bucket_edges(i);
            let id: Vec<String> = b.witness.iter().map(|k| k.to_string()).collect();
            wr.write_record([format!("{}", (lo * hi).sqrt()), format!("{}", b.sup), id.join("-")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Writes `t,eta_hat` rows of a control function on the bucket centers.
pub fn write_control_csv<T: Real, W: Write>(f: &ControlFunction<T>, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["t", "eta_hat"])?;
    for b in 0..BUCKETS {
        let (lo, hi) = bucket_edges(b);
        let t = (lo * hi).sqrt();
        let v = f.eval(T::lit(t))?;
        wr.write_record([format!("{t}"), format!("{v}")])?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Clone)]
struct Partial<T: Real> {
    buckets: Vec<Option<Bucket<T>>>,
    scanned: u64,
    degenerate: u64,
    excluded: u64,
}

impl<T: Real> Partial<T> {
    fn new() -> Self {
        Self { buckets: vec![None; BUCKETS], scanned: 0, degenerate: 0, excluded: 0 }
    }

    fn record(&mut self, t: T, s: T, tuple: &[usize], index: u64) {
        self.scanned += 1;
        let slot = &mut self.buckets[bucket_of(t)];
        match slot {
            None => {
                *slot = Some(Bucket { sup: s, sup_t: t, t_min: t, t_max: t, count: 1, witness: tuple.to_vec(), witness_index: index });
            }
            Some(b) => {
                b.count += 1;
                b.t_min = b.t_min.min(t);
                b.t_max = b.t_max.max(t);
                if s > b.sup || (s == b.sup && index < b.witness_index) {
                    b.sup = s;
                    b.sup_t = t;
                    b.witness = tuple.to_vec();
                    b.witness_index = index;
                }
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.scanned += other.scanned;
        self.degenerate += other.degenerate;
        self.excluded += other.excluded;
        for (a, b) in self.buckets.iter_mut().zip(other.buckets) {
            let Some(b) = b else { continue };
            match a {
                None => *a = Some(b),
                Some(x) => {
                    x.count += b.count;
                    x.t_min = x.t_min.min(b.t_min);
                    x.t_max = x.t_max.max(b.t_max);
                    if b.sup > x.sup || (b.sup == x.sup && b.witness_index < x.witness_index) {
                        x.sup = b.sup;
                        x.sup_t = b.sup_t;
                        x.witness = b.witness;
                        x.witness_index = b.witness_index;
                    }
                }
            }
        }
        self
    }
}

fn decode(mut q: u64, n: u64, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = (q % n) as usize;
        q /= n;
    }
}

fn distinct(t: &[usize]) -> bool {
    (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j]))
}

/// Scans ordered tuples of `arity` distinct indices below `n` and buckets
/// `(t, s) = eval(tuple)`.
///
/// All `n^arity` index tuples are visited in lexicographic order when they fit
/// in the budget; otherwise `budget` tuples are drawn, chunk `c` from stream
/// `c` of the seeded generator. Ties keep the earliest tuple in scan order, so
/// the result does not depend on thread scheduling.
pub fn scan_tuples<T, Q, F>(n: usize, arity: usize, opts: ScanOptions, qualifies: Q, eval: F) -> DistortionEnvelope<T>
where
    T: Real,
    Q: Fn(&[usize]) -> bool + Sync,
    F: Fn(&[usize]) -> Option<(T, T)> + Sync,
{
    let nn = n as u64;
    let total = (0..arity).try_fold(1u64, |acc, _| acc.checked_mul(nn)).unwrap_or(u64::MAX);
    let exhaustive = total <= opts.budget;
    let count = if exhaustive { total } else { opts.budget };
    let chunks = count.div_ceil(CHUNK);
    let merged = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut part = Partial::new();
            let start = c * CHUNK;
            let len = CHUNK.min(count - start);
            let mut tuple = vec![0usize; arity];
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(c);
            for k in 0..len {
                let index = start + k;
                if exhaustive {
                    decode(index, nn, &mut tuple);
                } else {
                    tuple.iter_mut().for_each(|s| *s = rng.gen_range(0..n));
                }
                if !distinct(&tuple) || !qualifies(&tuple) {
                    part.excluded += 1;
                    continue;
                }
                match eval(&tuple) {
                    Some((t, s)) if t.is_finite() && s.is_finite() => part.record(t, s, &tuple, index),
                    _ => part.degenerate += 1,
                }
            }
            part
        })
        .reduce(Partial::new, Partial::merge);
    DistortionEnvelope {
        buckets: merged.buckets,
        scanned: merged.scanned,
        degenerate: merged.degenerate,
        excluded: merged.excluded,
        exhaustive,
        options: opts,
    }
}

/// Named constant estimate with its witnesses and scan settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub constant_name: String,
    pub value: f64,
    pub witness_points: Vec<Vec<f64>>,
    pub budget: u64,
    pub seed: u64,
    pub mesh_h: Option<f64>,
    /// Auxiliary numbers (skipped counts, secondary constants, formula values).
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
    #[serde(default)]
    pub flags: Vec<String>,
}

impl ConstantReport {
    pub fn new(name: &str, value: f64) -> Self {
        Self {
            constant_name: name.into(),
            value,
            witness_points: Vec::new(),
            budget: 0,
            seed: 0,
            mesh_h: None,
            details: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    pub fn with_witness<T: Real>(mut self, pts: &[crate::geometry::Point<T>]) -> Self {
        self.witness_points = pts.iter().map(|p| p.coords().iter().map(|c| c.as_f64()).collect()).collect();
        self
    }

    pub fn detail(mut self, key: &str, v: f64) -> Self {
        self.details.insert(key.into(), v);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }
}
