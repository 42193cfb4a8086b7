use std::collections::VecDeque;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    /// Capacity of the returned cut, Σ_{e ∈ ∂S} c(e).
    pub value: f64,
    /// Value of the maximum flow found by Dinic's algorithm.
    pub flow_value: f64,
    /// Membership in S, the side containing the source.
    pub source_side: Vec<bool>,
    /// ∂S in ascending edge-id order.
    pub edges: Vec<usize>,
}

struct Arc {
    to: usize,
    cap: f64,
    rev: usize,
}

struct Dinic {
    graph: Vec<Vec<Arc>>,
    level: Vec<usize>,
    iter: Vec<usize>,
    eps: f64,
}

impl Dinic {
    fn new(n: usize, eps: f64) -> Self {
        Self { graph: (0..n).map(|_| Vec::new()).collect(), level: vec![0; n], iter: vec![0; n], eps }
    }

    // An undirected edge is a pair of opposite arcs that are each other's residual.
    fn add_undirected(&mut self, u: usize, v: usize, cap: f64) {
        let (ru, rv) = (self.graph[v].len(), self.graph[u].len());
        self.graph[u].push(Arc { to: v, cap, rev: ru });
        self.graph[v].push(Arc { to: u, cap, rev: rv });
    }

    fn bfs(&mut self, s: usize) {
        self.level.fill(usize::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for arc in &self.graph[v] {
                if arc.cap > self.eps && self.level[arc.to] == usize::MAX {
                    self.level[arc.to] = self.level[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, limit: f64) -> f64 {
        if v == t {
            return limit;
        }
        while self.iter[v] < self.graph[v].len() {
            let i = self.iter[v];
            let (to, cap) = (self.graph[v][i].to, self.graph[v][i].cap);
            if cap > self.eps && self.level[v] < self.level[to] {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0.0 {
                    let rev = self.graph[v][i].rev;
                    self.graph[v][i].cap -= pushed;
                    self.graph[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] == usize::MAX {
                return flow;
            }
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
    }
}

/// Minimum a–b cut of an undirected graph under the given capacities,
/// found as the residual-reachable side of a maximum flow.
pub fn min_cut(g: &Graph, a: usize, b: usize, capacities: &[f64]) -> Result<MinCut> {
    g.require_undirected()?;
    if a >= g.n() || b >= g.n() {
        return Err(Error::InvalidInput("vertex out of range".into()));
    }
    if a == b {
        return Err(Error::InvalidInput("min cut needs distinct endpoints".into()));
    }
    g.check_len(capacities, "capacities")?;

    let scale = capacities.iter().cloned().fold(0.0, f64::max);
    let mut dinic = Dinic::new(g.n(), 1e-13 * scale.max(f64::MIN_POSITIVE));
    for e in g.edges() {
        dinic.add_undirected(e.tail, e.head, capacities[e.id]);
    }
    let flow_value = dinic.max_flow(a, b);
    dinic.bfs(a);
    let source_side: Vec<bool> = dinic.level.iter().map(|&l| l != usize::MAX).collect();
    debug_assert!(!source_side[b]);
    let edges: Vec<usize> = g
        .edges()
        .iter()
        .filter(|e| source_side[e.tail] != source_side[e.head])
        .map(|e| e.id)
        .collect();
    let value = edges.iter().map(|&e| capacities[e]).sum();
    Ok(MinCut { value, flow_value, source_side, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_min_cut(g: &Graph, a: usize, b: usize, c: &[f64]) -> f64 {
        let n = g.n();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << n) {
            if mask & (1 << a) == 0 || mask & (1 << b) != 0 {
                continue;
            }
            let v: f64 = g
                .edges()
                .iter()
                .filter(|e| ((mask >> e.tail) & 1) != ((mask >> e.head) & 1))
                .map(|e| c[e.id])
                .sum();
            best = best.min(v);
        }
        best
    }

    #[test]
    fn triangle_unit() {
        let g = Graph::from_labeled_edges(false, &[("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)]).unwrap();
        let cut = min_cut(&g, 0, 1, &[1.0; 3]).unwrap();
        assert_eq!(cut.value, 2.0);
        assert_eq!(brute_force_min_cut(&g, 0, 1, &[1.0; 3]), 2.0);
    }

    #[test]
    fn series_edges() {
        let g = Graph::from_labeled_edges(false, &[("a", "b", 1.0), ("b", "c", 1.0)]).unwrap();
        let cut = min_cut(&g, 0, 2, &[1.0, 1.0]).unwrap();
        assert_eq!(cut.value, 1.0);
        assert_eq!(cut.edges.len(), 1);
        let cut = min_cut(&g, 0, 2, &[1.0, 0.5]).unwrap();
        assert_eq!(cut.edges, vec![1]);
    }

    #[test]
    fn three_parallel_paths() {
        let mut edges = Vec::new();
        for i in 0..3 {
            edges.push((0, 2 + i, 1.0));
            edges.push((2 + i, 1, 1.0));
        }
        let g = Graph::from_indexed_edges(5, false, &edges).unwrap();
        let cut = min_cut(&g, 0, 1, &[1.0; 6]).unwrap();
        assert_eq!(cut.value, 3.0);
        assert!((cut.flow_value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_capacities_allowed() {
        let g = Graph::from_indexed_edges(3, false, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let cut = min_cut(&g, 0, 2, &[0.0, 2.0]).unwrap();
        assert_eq!(cut.value, 0.0);
    }

    #[test]
    fn directed_rejected() {
        let g = Graph::from_indexed_edges(2, true, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(min_cut(&g, 0, 1, &[1.0]), Err(Error::Directed)));
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(2..=9);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_bool(0.45) {
                        edges.push((u, v, 1.0));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let g = Graph::from_indexed_edges(n, false, &edges).unwrap();
            let caps: Vec<f64> = (0..g.m()).map(|_| rng.random_range(0.0..3.0)).collect();
            let cut = min_cut(&g, 0, n - 1, &caps).unwrap();
            let bf = brute_force_min_cut(&g, 0, n - 1, &caps);
            assert!((cut.value - bf).abs() < 1e-9, "dinic {} vs brute {}", cut.value, bf);
            assert!((cut.flow_value - cut.value).abs() < 1e-9);
        }
    }
}
