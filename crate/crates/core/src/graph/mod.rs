//! Weighted (multi)graphs, edge densities, and the elementary graph
//! algorithms the modulus oracles are built on.
//!
//! Undirected edges are stored once with a stable id in `0..m`; algorithms
//! expand orientation on demand through [`Graph::neighbors`].

mod flow;
mod io;
mod laplacian;
mod mst;
mod paths;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use flow::{min_cut, MinCut};
pub use io::{load_graph, GraphFormat};
pub use laplacian::effective_resistance;
pub use mst::{minimum_spanning_tree, SpanningTree};
pub(crate) use mst::UnionFind;
pub use paths::{hop_distance, shortest_path_length, ShortestPath};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

impl Edge {
    /// The endpoint opposite to `v`. Panics if `v` is not an endpoint.
    pub fn other(&self, v: usize) -> usize {
        if v == self.tail {
            self.head
        } else {
            assert_eq!(v, self.head, "vertex {v} is not an endpoint of edge {}", self.id);
            self.tail
        }
    }
}

/// A finite graph with strictly positive edge weights σ.
///
/// Immutable after construction; clone with [`Graph::with_weights`] to get
/// the same topology under different weights.
#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    // (edge id, neighbor) pairs; for directed graphs only out-arcs.
    adjacency: Vec<Vec<(usize, usize)>>,
    has_parallel: bool,
}

impl Graph {
    /// Builds a graph from labelled edges. Vertices are numbered in order of
    /// first appearance.
    pub fn from_labeled_edges<S: AsRef<str>>(directed: bool, edges: &[(S, S, f64)]) -> Result<Self> {
        let mut labels = Vec::new();
        let mut index = HashMap::new();
        let mut raw = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            let u = intern(&mut labels, &mut index, u.as_ref());
            let v = intern(&mut labels, &mut index, v.as_ref());
            raw.push((u, v, *w));
        }
        Self::build(directed, labels, index, raw)
    }

    /// Builds a graph on vertices labelled `"0"..n-1`.
    pub fn from_indexed_edges(n: usize, directed: bool, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, directed, edges)
    }

    /// Builds a graph with explicit vertex labels; edges refer to label
    /// positions.
    pub fn with_labels(labels: Vec<String>, directed: bool, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate vertex label `{l}`")));
            }
        }
        for &(u, v, _) in edges {
            if u >= labels.len() || v >= labels.len() {
                return Err(Error::InvalidInput(format!("edge ({u},{v}) references a vertex outside 0..{}", labels.len())));
            }
        }
        Self::build(directed, labels, index, edges.to_vec())
    }

    fn build(
        directed: bool,
        labels: Vec<String>,
        index: HashMap<String, usize>,
        raw: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut edges = Vec::with_capacity(raw.len());
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        let mut has_parallel = false;
        for (id, (u, v, w)) in raw.into_iter().enumerate() {
            if u == v {
                return Err(Error::SelfLoop(labels[u].clone()));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { edge: format!("{}-{}", labels[u], labels[v]), weight: w });
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !seen.insert(key) {
                has_parallel = true;
            }
            edges.push(Edge { id, tail: u, head: v, weight: w });
            adjacency[u].push((id, v));
            if !directed {
                adjacency[v].push((id, u));
            }
        }
        Ok(Self { directed, labels, index, edges, adjacency, has_parallel })
    }

    /// Same topology and labels, new weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.m() {
            return Err(Error::InvalidInput(format!("expected {} weights, got {}", self.m(), weights.len())));
        }
        let mut g = self.clone();
        for (e, &w) in g.edges.iter_mut().zip(weights) {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { edge: self.edge_key(e.id), weight: w });
            }
            e.weight = w;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    /// σ(E), the total edge weight.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    /// `(edge id, neighbor)` pairs leaving `v`, in ascending edge-id order.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    /// Human-readable key `"u-v"`; parallel edges get an `#id` suffix.
    pub fn edge_key(&self, id: usize) -> String {
        let e = &self.edges[id];
        let base = format!("{}-{}", self.labels[e.tail], self.labels[e.head]);
        if self.has_parallel && self.parallel_count(e.tail, e.head) > 1 {
            format!("{base}#{id}")
        } else {
            base
        }
    }

    fn parallel_count(&self, u: usize, v: usize) -> usize {
        self.adjacency[u]
            .iter()
            .filter(|&&(id, w)| w == v && (!self.directed || self.edges[id].tail == u))
            .count()
    }

    /// First edge joining `u` and `v` (respecting direction if directed).
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency[u].iter().find(|&&(_, w)| w == v).map(|&(id, _)| id)
    }

    /// Resolves an edge reference: a numeric id, `"u-v"`, or `"u-v#id"`.
    pub fn resolve_edge(&self, key: &str) -> Result<usize> {
        if let Ok(id) = key.parse::<usize>() {
            return if id < self.m() { Ok(id) } else { Err(Error::UnknownEdge(key.to_string())) };
        }
        if let Some((_, id)) = key.rsplit_once('#') {
            if let Ok(id) = id.parse::<usize>() {
                if id < self.m() && self.edge_key(id) == key {
                    return Ok(id);
                }
            }
            return Err(Error::UnknownEdge(key.to_string()));
        }
        // Labels may themselves contain '-', so try every split point.
        for (pos, _) in key.match_indices('-') {
            let (u, v) = (&key[..pos], &key[pos + 1..]);
            if let (Some(&u), Some(&v)) = (self.index.get(u), self.index.get(v)) {
                if let Some(id) = self.find_edge(u, v) {
                    return Ok(id);
                }
            }
        }
        Err(Error::UnknownEdge(key.to_string()))
    }

    /// Connectivity of the underlying undirected graph.
    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        let mut undirected = vec![Vec::new(); self.n()];
        for e in &self.edges {
            undirected[e.tail].push(e.head);
            undirected[e.head].push(e.tail);
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &undirected[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n()
    }

    pub(crate) fn require_undirected(&self) -> Result<()> {
        if self.directed {
            Err(Error::Directed)
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_len(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() != self.m() {
            return Err(Error::InvalidInput(format!("{what}: expected {} entries, got {}", self.m(), v.len())));
        }
        if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidInput(format!("{what}: entries must be finite and nonnegative, got {x}")));
        }
        Ok(())
    }
}

fn intern(labels: &mut Vec<String>, index: &mut HashMap<String, usize>, label: &str) -> usize {
    if let Some(&i) = index.get(label) {
        return i;
    }
    labels.push(label.to_string());
    index.insert(label.to_string(), labels.len() - 1);
    labels.len() - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityRole {
    /// ρ, a density for the primal family.
    Primal,
    /// η, a density for the blocking family.
    Blocker,
}

/// A nonnegative function on the edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    values: Vec<f64>,
    role: DensityRole,
}

impl Density {
    pub fn new(values: Vec<f64>, role: DensityRole) -> Result<Self> {
        if let Some(x) = values.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidInput(format!("density entries must be finite and nonnegative, got {x}")));
        }
        Ok(Self { values, role })
    }

    pub fn constant(m: usize, value: f64, role: DensityRole) -> Self {
        Self { values: vec![value; m], role }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn role(&self) -> DensityRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// E_{p,σ}(ρ) = Σ σ(e) ρ(e)^p.
    pub fn energy(&self, p: f64, sigma: &[f64]) -> f64 {
        energy(&self.values, p, sigma)
    }

    pub fn dot(&self, other: &Density) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }
}

impl std::ops::Index<usize> for Density {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

pub fn energy(rho: &[f64], p: f64, sigma: &[f64]) -> f64 {
    rho.iter().zip(sigma).map(|(r, s)| s * r.powf(p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loop_and_bad_weight() {
        assert!(matches!(Graph::from_labeled_edges(false, &[("a", "a", 1.0)]), Err(Error::SelfLoop(_))));
        assert!(matches!(
            Graph::from_labeled_edges(false, &[("a", "b", 0.0)]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(Graph::from_labeled_edges(false, &[("a", "b", f64::NAN)]).is_err());
    }

    #[test]
    fn edge_keys_and_resolution() {
        let g = Graph::from_labeled_edges(false, &[("a", "b", 1.0), ("b", "c", 2.0), ("a", "b", 3.0)]).unwrap();
        assert_eq!(g.edge_key(1), "b-c");
        assert_eq!(g.edge_key(0), "a-b#0");
        assert_eq!(g.resolve_edge("c-b").unwrap(), 1);
        assert_eq!(g.resolve_edge("a-b#2").unwrap(), 2);
        assert_eq!(g.resolve_edge("1").unwrap(), 1);
        assert!(g.resolve_edge("a-c").is_err());
        assert!(g.resolve_edge("7").is_err());
        assert_eq!(g.total_weight(), 6.0);
    }

    #[test]
    fn hyphenated_labels_resolve() {
        let g = Graph::from_labeled_edges(false, &[("x-1", "y", 1.0)]).unwrap();
        assert_eq!(g.resolve_edge("x-1-y").unwrap(), 0);
    }

    #[test]
    fn connectivity() {
        let g = Graph::from_indexed_edges(4, false, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!g.is_connected());
        let g = Graph::from_indexed_edges(3, true, &[(0, 1, 1.0), (2, 1, 1.0)]).unwrap();
        assert!(g.is_connected());
    }

    #[test]
    fn with_weights_validates() {
        let g = Graph::from_indexed_edges(2, false, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.with_weights(&[4.0]).unwrap().weights(), vec![4.0]);
        assert!(g.with_weights(&[-1.0]).is_err());
        assert!(g.with_weights(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn density_validation_and_energy() {
        assert!(Density::new(vec![1.0, -0.1], DensityRole::Primal).is_err());
        let d = Density::new(vec![0.5, 0.5], DensityRole::Primal).unwrap();
        assert!((d.energy(2.0, &[1.0, 1.0]) - 0.5).abs() < 1e-15);
    }
}
