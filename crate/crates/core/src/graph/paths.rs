use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPath {
    pub length: f64,
    /// Edge ids in traversal order from `a` to `b`.
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Item {
    dist: f64,
    vertex: usize,
}

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `a` to `b` with nonnegative edge lengths. Ties resolve to
/// the first path discovered when scanning edges in id order.
pub fn shortest_path_length(g: &Graph, a: usize, b: usize, lengths: &[f64]) -> Result<ShortestPath> {
    if a >= g.n() || b >= g.n() {
        return Err(Error::InvalidInput("vertex out of range".into()));
    }
    if a == b {
        return Err(Error::InvalidInput("shortest path needs distinct endpoints".into()));
    }
    g.check_len(lengths, "lengths")?;

    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[a] = 0.0;
    heap.push(Item { dist: 0.0, vertex: a });
    while let Some(Item { dist: d, vertex: v }) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        if v == b {
            break;
        }
        for &(e, w) in g.neighbors(v) {
            let nd = d + lengths[e];
            if nd < dist[w] {
                dist[w] = nd;
                pred[w] = Some((e, v));
                heap.push(Item { dist: nd, vertex: w });
            }
        }
    }
    if !dist[b].is_finite() {
        return Err(Error::EmptyFamily(format!("`{}` is unreachable from `{}`", g.label(b), g.label(a))));
    }

    let mut edges = Vec::new();
    let mut vertices = vec![b];
    let mut v = b;
    while let Some((e, u)) = pred[v] {
        edges.push(e);
        vertices.push(u);
        v = u;
    }
    edges.reverse();
    vertices.reverse();
    let length = edges.iter().map(|&e| lengths[e]).sum();
    Ok(ShortestPath { length, edges, vertices })
}

/// Unweighted hop distance by BFS, `None` if unreachable.
pub fn hop_distance(g: &Graph, a: usize, b: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::from([a]);
    dist[a] = 0;
    while let Some(v) = queue.pop_front() {
        if v == b {
            return Some(dist[v]);
        }
        for &(_, w) in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    None
}
