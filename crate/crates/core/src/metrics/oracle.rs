//! Finite metric spaces given by a distance function on an index set.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::real::Real;

use super::graph::{dijkstra, Graph};

/// A finite metric space on indices `0..len()`.
pub trait MetricOracle<T: Real>: Sync {
    fn len(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> T;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Dense symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceTable<T: Real> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DistanceTable<T> {
    /// Validates a row-major `n × n` matrix: finite, nonnegative, zero diagonal, symmetric.
    pub fn from_matrix(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Argument(format!("expected {} entries for a {n}×{n} table, got {}", n * n, data.len())));
        }
        for i in 0..n {
            if data[i * n + i] != T::zero() {
                return Err(Error::Argument(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < T::zero() {
                    return Err(Error::Argument(format!("entry ({i}, {j}) = {v} is not a finite nonnegative distance")));
                }
                if v != data[j * n + i] {
                    return Err(Error::Argument(format!("table is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Result<Self> {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self::from_matrix(n, data)
    }

    pub fn euclidean(points: &[Point<T>]) -> Result<Self> {
        Self::from_fn(points.len(), |i, j| points[i].dist(&points[j]))
    }

    /// Shortest-path metric of a connected weighted graph (e.g. a tree).
    pub fn from_graph(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        let g = Graph::from_edges(n, edges.iter().copied());
        let mut data = Vec::with_capacity(n * n);
        for s in 0..n {
            data.extend(dijkstra(&g, s, &[]));
        }
        if data.iter().any(|v| v.is_infinite()) {
            return Err(Error::Argument("graph is disconnected".into()));
        }
        // take one direction so rounding cannot break symmetry
        for i in 0..n {
            for j in i + 1..n {
                let v = data[i * n + j].min(data[j * n + i]);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self::from_matrix(n, data)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Largest `d(i,j) - d(i,k) - d(k,j)` over all triples (≤ 0 for a metric).
    pub fn max_triangle_excess(&self) -> T {
        let n = self.n;
        let mut worst = T::neg_infinity();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.get(i, j) - self.get(i, k) - self.get(k, j));
                }
            }
        }
        worst
    }

    /// Writes the matrix as CSV with header `p0,p1,...`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record((0..self.n).map(|i| format!("p{i}")))?;
        for i in 0..self.n {
            wr.write_record((0..self.n).map(|j| format!("{}", self.get(i, j))))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let n = rd.headers()?.len();
        let mut data = Vec::with_capacity(n * n);
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() != n {
                return Err(Error::Parse(format!("row of length {} in a table with {n} columns", rec.len())));
            }
            for f in rec.iter() {
                let v: f64 = f.trim().parse().map_err(|e| Error::Parse(format!("{f:?}: {e}")))?;
                data.push(T::from_f64(v).ok_or_else(|| Error::Parse(format!("{v} not representable")))?);
            }
        }
        Self::from_matrix(n, data)
    }
}

impl<T: Real> MetricOracle<T> for DistanceTable<T> {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> T {
        self.get(i, j)
    }
}

/// Euclidean metric on a point list, evaluated on demand.
pub struct EuclideanOracle<'a, T: Real>(pub &'a [Point<T>]);

impl<T: Real> MetricOracle<T> for EuclideanOracle<'_, T> {
    fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> T {
        self.0[i].dist(&self.0[j])
    }
}
