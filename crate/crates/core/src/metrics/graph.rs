//! Weighted graphs in compressed adjacency form and single-source shortest paths.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::real::Real;

/// Read access to an undirected weighted graph.
pub trait Adjacency<T: Real>: Sync {
    fn node_count(&self) -> usize;
    fn for_each_neighbor(&self, u: usize, f: &mut dyn FnMut(usize, T));
}

/// Undirected graph with nonnegative weights in CSR layout.
#[derive(Clone, Debug)]
pub struct Graph<T: Real> {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<T>,
}

impl<T: Real> Graph<T> {
    /// Builds from undirected edges; each edge is stored in both directions.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut adj: Vec<Vec<(u32, T)>> = vec![Vec::new(); n];
        for (i, j, w) in edges {
            adj[i].push((j as u32, w));
            adj[j].push((i as u32, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for a in adj {
            for (j, w) in a {
                targets.push(j);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        Self { offsets, targets, weights }
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }
}

impl<T: Real> Adjacency<T> for Graph<T> {
    fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn for_each_neighbor(&self, u: usize, f: &mut dyn FnMut(usize, T)) {
        for k in self.offsets[u]..self.offsets[u + 1] {
            f(self.targets[k] as usize, self.weights[k]);
        }
    }
}

/// A base graph plus extra nodes attached to it; extra node `k` has id `base.node_count() + k`.
pub struct Augmented<'a, T: Real> {
    base: &'a Graph<T>,
    extra: Vec<Vec<(usize, T)>>,
    back: HashMap<usize, Vec<(usize, T)>>,
}

impl<'a, T: Real> Augmented<'a, T> {
    pub fn new(base: &'a Graph<T>) -> Self {
        Self { base, extra: Vec::new(), back: HashMap::new() }
    }

    /// Adds a node joined to base or earlier extra nodes; returns its id.
    pub fn add_node(&mut self, links: Vec<(usize, T)>) -> usize {
        let id = self.base.node_count() + self.extra.len();
        for &(j, w) in &links {
            if j >= self.base.node_count() {
                self.extra[j - self.base.node_count()].push((id, w));
            } else {
                self.back.entry(j).or_default().push((id, w));
            }
        }
        self.extra.push(links);
        id
    }
}

impl<T: Real> Adjacency<T> for Augmented<'_, T> {
    fn node_count(&self) -> usize {
        self.base.node_count() + self.extra.len()
    }

    fn for_each_neighbor(&self, u: usize, f: &mut dyn FnMut(usize, T)) {
        let n = self.base.node_count();
        if u < n {
            self.base.for_each_neighbor(u, f);
            if let Some(b) = self.back.get(&u) {
                b.iter().for_each(|&(v, w)| f(v, w));
            }
        } else {
            self.extra[u - n].iter().for_each(|&(v, w)| f(v, w));
        }
    }
}

#[derive(PartialEq)]
struct Entry<T>(T, usize);

impl<T: Real> Eq for Entry<T> {}

impl<T: Real> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap; ties by node id keep runs reproducible
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then_with(|| other.1.cmp(&self.1))
    }
}

impl<T: Real> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path distances from `source`, `∞` for unreachable nodes. Stops
/// early once every node in `targets` is settled, if `targets` is nonempty.
pub fn dijkstra<T: Real, G: Adjacency<T> + ?Sized>(g: &G, source: usize, targets: &[usize]) -> Vec<T> {
    dijkstra_with_parents(g, source, targets).0
}

/// As [`dijkstra`], also returning the predecessor of each reached node.
pub fn dijkstra_with_parents<T: Real, G: Adjacency<T> + ?Sized>(g: &G, source: usize, targets: &[usize]) -> (Vec<T>, Vec<usize>) {
    let n = g.node_count();
    let mut dist = vec![T::infinity(); n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut pending: usize = targets.len();
    let mut is_target = vec![false; if targets.is_empty() { 0 } else { n }];
    for &t in targets {
        if is_target[t] {
            pending -= 1;
        }
        is_target[t] = true;
    }
    let mut heap = BinaryHeap::new();
    dist[source] = T::zero();
    heap.push(Entry(T::zero(), source));
    while let Some(Entry(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if !is_target.is_empty() && is_target[u] {
            pending -= 1;
            if pending == 0 {
                break;
            }
        }
        g.for_each_neighbor(u, &mut |v, w| {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = u;
                heap.push(Entry(nd, v));
            }
        });
    }
    (dist, parent)
}

/// Node sequence from `source` to `target` read off a parent array.
pub fn path_to(parent: &[usize], source: usize, target: usize) -> Option<Vec<usize>> {
    let mut path = vec![target];
    let mut u = target;
    while u != source {
        u = parent[u];
        if u == usize::MAX {
            return None;
        }
        path.push(u);
    }
    path.reverse();
    Some(path)
}
