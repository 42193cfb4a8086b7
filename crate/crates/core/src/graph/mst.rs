use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    /// Tree edges in ascending id order.
    pub edges: Vec<usize>,
    pub length: f64,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal with ties broken by ascending edge id.
pub fn minimum_spanning_tree(g: &Graph, lengths: &[f64]) -> Result<SpanningTree> {
    g.require_undirected()?;
    g.check_len(lengths, "lengths")?;
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by(|&x, &y| lengths[x].total_cmp(&lengths[y]).then(x.cmp(&y)));
    let mut uf = UnionFind::new(g.n());
    let mut edges = Vec::with_capacity(g.n().saturating_sub(1));
    for e in order {
        let edge = g.edge(e);
        if uf.union(edge.tail, edge.head) {
            edges.push(e);
            if edges.len() + 1 == g.n() {
                break;
            }
        }
    }
    if edges.len() + 1 != g.n() {
        return Err(Error::Disconnected);
    }
    edges.sort_unstable();
    let length = edges.iter().map(|&e| lengths[e]).sum();
    Ok(SpanningTree { edges, length })
}
