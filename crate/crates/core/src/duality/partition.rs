use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const PARTITION_VERTEX_LIMIT: usize = 10;

/// A partition of V into k ≥ 2 parts, each inducing a connected subgraph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasiblePartition {
    pub parts: Vec<Vec<usize>>,
    /// E_P, the edges joining different parts, ascending.
    pub cut_edges: Vec<usize>,
}

impl FeasiblePartition {
    /// k_P, the number of parts.
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// 1_{E_P} / (k_P − 1).
    pub fn blocker_vector(&self, m: usize) -> Vec<f64> {
        let mut v = vec![0.0; m];
        let w = 1.0 / (self.k() - 1) as f64;
        for &e in &self.cut_edges {
            v[e] = w;
        }
        v
    }
}

/// All feasible partitions of a connected undirected graph, by walking
/// restricted growth strings. Requires n ≤ 10.
pub fn enumerate_feasible_partitions(g: &Graph) -> Result<Vec<FeasiblePartition>> {
    g.require_undirected()?;
    let n = g.n();
    if n > PARTITION_VERTEX_LIMIT {
        return Err(Error::GuardExceeded(format!("feasible partitions need n ≤ {PARTITION_VERTEX_LIMIT}, got {n}")));
    }
    if n < 2 || !g.is_connected() {
        return Err(Error::InvalidInput("feasible partitions need a connected graph with at least two vertices".into()));
    }
    let mut out = Vec::new();
    let mut block = vec![0usize; n];
    walk(g, 1, 0, &mut block, &mut out);
    Ok(out)
}

fn walk(g: &Graph, v: usize, max_block: usize, block: &mut Vec<usize>, out: &mut Vec<FeasiblePartition>) {
    let n = g.n();
    if v == n {
        let k = max_block + 1;
        if k >= 2 && parts_connected(g, block, k) {
            let mut parts = vec![Vec::new(); k];
            for (u, &b) in block.iter().enumerate() {
                parts[b].push(u);
            }
            let cut_edges = g.edges().iter().filter(|e| block[e.tail] != block[e.head]).map(|e| e.id).collect();
            out.push(FeasiblePartition { parts, cut_edges });
        }
        return;
    }
    for b in 0..=max_block + 1 {
        block[v] = b;
        walk(g, v + 1, max_block.max(b), block, out);
    }
}

fn parts_connected(g: &Graph, block: &[usize], k: usize) -> bool {
    let mut uf = crate::graph::UnionFind::new(g.n());
    let mut components = g.n();
    for e in g.edges() {
        if block[e.tail] == block[e.head] && uf.union(e.tail, e.head) {
            components -= 1;
        }
    }
    components == k
}
