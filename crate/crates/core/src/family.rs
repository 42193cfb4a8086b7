//! Families of objects on a graph, each object described by its usage row
//! N(γ,·). A family is either given explicitly or implicitly through an
//! oracle that returns an object of minimum ρ-length.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{min_cut, minimum_spanning_tree, shortest_path_length, Graph};

/// Sparse usage row N(γ,·): ascending edge ids with strictly positive usage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageRow {
    entries: Vec<(usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl UsageRow {
    /// Builds a row, summing repeated edges and dropping explicit zeros.
    /// Fails if no entry is positive.
    pub fn new(entries: impl IntoIterator<Item = (usize, f64)>, label: Option<String>) -> Result<Self> {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (e, u) in entries {
            if !(u.is_finite() && u >= 0.0) {
                return Err(Error::InvalidInput(format!("usage of edge {e} must be finite and nonnegative, got {u}")));
            }
            *acc.entry(e).or_insert(0.0) += u;
        }
        let entries: Vec<(usize, f64)> = acc.into_iter().filter(|&(_, u)| u > 0.0).collect();
        if entries.is_empty() {
            return Err(Error::TrivialFamily(format!(
                "object {} has no positive usage",
                label.as_deref().unwrap_or("<unlabelled>")
            )));
        }
        Ok(Self { entries, label })
    }

    /// 0/1 row supported on `edges`.
    pub fn indicator(edges: &[usize], label: Option<String>) -> Self {
        let mut ids = edges.to_vec();
        ids.sort_unstable();
        ids.dedup();
        assert!(!ids.is_empty(), "indicator row needs at least one edge");
        Self { entries: ids.into_iter().map(|e| (e, 1.0)).collect(), label }
    }

    pub fn from_dense(values: &[f64], label: Option<String>) -> Result<Self> {
        Self::new(values.iter().copied().enumerate(), label)
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// ℓ_ρ(γ) = Σ_e N(γ,e) ρ(e).
    pub fn cost(&self, rho: &[f64]) -> f64 {
        self.entries.iter().map(|&(e, u)| u * rho[e]).sum()
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.entries.binary_search_by_key(&edge, |&(e, _)| e).map(|i| self.entries[i].1).unwrap_or(0.0)
    }

    pub fn min_usage(&self) -> f64 {
        self.entries.iter().map(|&(_, u)| u).fold(f64::INFINITY, f64::min)
    }

    pub fn to_dense(&self, m: usize) -> Vec<f64> {
        let mut v = vec![0.0; m];
        for &(e, u) in &self.entries {
            v[e] = u;
        }
        v
    }

    /// Same usage vector, ignoring labels.
    pub fn same_usage(&self, other: &UsageRow) -> bool {
        self.entries == other.entries
    }

    pub(crate) fn max_edge(&self) -> usize {
        self.entries.last().map(|&(e, _)| e).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// Simple paths from `a` to `b`.
    Connect { a: usize, b: usize },
    /// a–b cuts, each object being the edge boundary ∂S.
    Cut { a: usize, b: usize },
    SpanningTree,
    Explicit(Vec<UsageRow>),
}

/// A non-empty, non-trivial family Γ on a shared graph.
#[derive(Debug, Clone)]
pub struct Family {
    graph: Arc<Graph>,
    kind: FamilyKind,
    n_min: f64,
}

impl Family {
    pub fn connect(graph: Arc<Graph>, a: usize, b: usize) -> Result<Self> {
        check_endpoints(&graph, a, b)?;
        let ones = vec![1.0; graph.m()];
        shortest_path_length(&graph, a, b, &ones)?;
        Ok(Self { graph, kind: FamilyKind::Connect { a, b }, n_min: 1.0 })
    }

    pub fn cut(graph: Arc<Graph>, a: usize, b: usize) -> Result<Self> {
        check_endpoints(&graph, a, b)?;
        graph.require_undirected()?;
        let ones = vec![1.0; graph.m()];
        if shortest_path_length(&graph, a, b, &ones).is_err() {
            return Err(Error::TrivialFamily(format!(
                "`{}` and `{}` are disconnected, so some cut has an empty boundary",
                graph.label(a),
                graph.label(b)
            )));
        }
        Ok(Self { graph, kind: FamilyKind::Cut { a, b }, n_min: 1.0 })
    }

    pub fn spanning_trees(graph: Arc<Graph>) -> Result<Self> {
        graph.require_undirected()?;
        if graph.n() < 2 {
            return Err(Error::EmptyFamily("spanning trees of a graph with fewer than two vertices have no edges".into()));
        }
        if !graph.is_connected() {
            return Err(Error::EmptyFamily("graph is disconnected".into()));
        }
        Ok(Self { graph, kind: FamilyKind::SpanningTree, n_min: 1.0 })
    }

    pub fn explicit(graph: Arc<Graph>, rows: Vec<UsageRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyFamily("explicit family has no rows".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.max_edge() >= graph.m()) {
            return Err(Error::UnknownEdge(format!("edge id {} (graph has {} edges)", r.max_edge(), graph.m())));
        }
        let n_min = rows.iter().map(UsageRow::min_usage).fold(f64::INFINITY, f64::min);
        Ok(Self { graph, kind: FamilyKind::Explicit(rows), n_min })
    }

    /// Reads `{"rows":[{"edges":{"<u>-<v>": usage, ...},"label": ...}]}`.
    /// Edge keys may also be numeric edge ids.
    pub fn load_explicit<R: Read>(mut source: R, graph: Arc<Graph>) -> Result<Self> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        let parsed: ExplicitFile =
            serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let mut rows = Vec::with_capacity(parsed.rows.len());
        for (i, row) in parsed.rows.into_iter().enumerate() {
            let mut entries = Vec::with_capacity(row.edges.len());
            for (key, usage) in &row.edges {
                entries.push((graph.resolve_edge(key)?, *usage));
            }
            let label = row.label.or_else(|| Some(format!("row{i}")));
            rows.push(UsageRow::new(entries, label)?);
        }
        Self::explicit(graph, rows)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// N_min, the smallest nonzero usage over all objects.
    pub fn n_min(&self) -> f64 {
        self.n_min
    }

    /// True when every usage is 0/1 (connecting paths, cuts, trees).
    pub fn is_integral(&self) -> bool {
        match &self.kind {
            FamilyKind::Explicit(rows) => rows.iter().all(|r| r.entries.iter().all(|&(_, u)| u.fract() == 0.0)),
            _ => true,
        }
    }

    /// An object minimizing ℓ_ρ(γ), with its length.
    pub fn shortest_object(&self, rho: &[f64]) -> Result<(UsageRow, f64)> {
        self.graph.check_len(rho, "density")?;
        let g = &*self.graph;
        match &self.kind {
            FamilyKind::Connect { a, b } => {
                let sp = shortest_path_length(g, *a, *b, rho)?;
                let label = sp.vertices.iter().map(|&v| g.label(v)).collect::<Vec<_>>().join("-");
                Ok((UsageRow::indicator(&sp.edges, Some(label)), sp.length))
            }
            FamilyKind::Cut { a, b } => {
                let cut = min_cut(g, *a, *b, rho)?;
                let label = cut_label(g, &cut.source_side);
                Ok((UsageRow::indicator(&cut.edges, Some(label)), cut.value))
            }
            FamilyKind::SpanningTree => {
                let t = minimum_spanning_tree(g, rho)?;
                let label = tree_label(g, &t.edges);
                Ok((UsageRow::indicator(&t.edges, Some(label)), t.length))
            }
            FamilyKind::Explicit(rows) => {
                let mut best = 0;
                let mut best_cost = f64::INFINITY;
                for (i, r) in rows.iter().enumerate() {
                    let c = r.cost(rho);
                    if c < best_cost {
                        best = i;
                        best_cost = c;
                    }
                }
                Ok((rows[best].clone(), best_cost))
            }
        }
    }

    /// ℓ(Γ), the minimum unweighted length N(γ,·)·1 over the family.
    pub fn min_length(&self) -> Result<f64> {
        Ok(self.shortest_object(&vec![1.0; self.graph.m()])?.1)
    }

    /// All objects, deduplicated by usage. Refuses rather than truncates when
    /// the family has more than `max_count` objects.
    pub fn enumerate(&self, max_count: usize) -> Result<Vec<UsageRow>> {
        let rows = match &self.kind {
            FamilyKind::Connect { a, b } => enumerate_paths(&self.graph, *a, *b, max_count)?,
            FamilyKind::Cut { a, b } => enumerate_minimal_cuts(&self.graph, *a, *b, max_count)?,
            FamilyKind::SpanningTree => enumerate_spanning_trees(&self.graph, max_count)?,
            FamilyKind::Explicit(rows) => rows.clone(),
        };
        let mut seen = HashSet::new();
        let rows: Vec<UsageRow> = rows.into_iter().filter(|r| seen.insert(usage_key(r))).collect();
        if rows.len() > max_count {
            return Err(guard(rows.len(), max_count));
        }
        Ok(rows)
    }

    /// Short description such as `connect:a,c`.
    pub fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.graph;
        match &self.kind {
            FamilyKind::Connect { a, b } => write!(f, "connect:{},{}", g.label(*a), g.label(*b)),
            FamilyKind::Cut { a, b } => write!(f, "cut:{},{}", g.label(*a), g.label(*b)),
            FamilyKind::SpanningTree => write!(f, "tree"),
            FamilyKind::Explicit(rows) => write!(f, "explicit[{} rows]", rows.len()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitFile {
    rows: Vec<ExplicitRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitRow {
    edges: BTreeMap<String, f64>,
    #[serde(default)]
    label: Option<String>,
}

fn check_endpoints(g: &Graph, a: usize, b: usize) -> Result<()> {
    if a >= g.n() || b >= g.n() {
        return Err(Error::InvalidInput("endpoint out of range".into()));
    }
    if a == b {
        return Err(Error::InvalidInput("family endpoints must be distinct".into()));
    }
    Ok(())
}

fn guard(count: usize, max: usize) -> Error {
    Error::GuardExceeded(format!("family has more than {max} objects (found at least {count})"))
}

fn usage_key(r: &UsageRow) -> Vec<(usize, u64)> {
    r.entries.iter().map(|&(e, u)| (e, u.to_bits())).collect()
}

fn cut_label(g: &Graph, side: &[bool]) -> String {
    let s: Vec<&str> = (0..g.n()).filter(|&v| side[v]).map(|v| g.label(v)).collect();
    format!("S={{{}}}", s.join(","))
}

fn tree_label(g: &Graph, edges: &[usize]) -> String {
    let s: Vec<String> = edges.iter().map(|&e| g.edge_key(e)).collect();
    format!("T{{{}}}", s.join(","))
}

fn enumerate_paths(g: &Graph, a: usize, b: usize, max_count: usize) -> Result<Vec<UsageRow>> {
    struct Dfs<'a> {
        g: &'a Graph,
        target: usize,
        on_path: Vec<bool>,
        edges: Vec<usize>,
        vertices: Vec<usize>,
        out: Vec<UsageRow>,
        max: usize,
    }
    impl Dfs<'_> {
        fn visit(&mut self, v: usize) -> Result<()> {
            if v == self.target {
                if self.out.len() >= self.max {
                    return Err(guard(self.out.len() + 1, self.max));
                }
                let label = self.vertices.iter().map(|&v| self.g.label(v)).collect::<Vec<_>>().join("-");
                self.out.push(UsageRow::indicator(&self.edges, Some(label)));
                return Ok(());
            }
            for &(e, w) in self.g.neighbors(v) {
                if !self.on_path[w] {
                    self.on_path[w] = true;
                    self.edges.push(e);
                    self.vertices.push(w);
                    self.visit(w)?;
                    self.vertices.pop();
                    self.edges.pop();
                    self.on_path[w] = false;
                }
            }
            Ok(())
        }
    }
    let mut dfs = Dfs {
        g,
        target: b,
        on_path: vec![false; g.n()],
        edges: Vec::new(),
        vertices: vec![a],
        out: Vec::new(),
        max: max_count,
    };
    dfs.on_path[a] = true;
    dfs.visit(a)?;
    Ok(dfs.out)
}

/// Brute force over vertex subsets S ∋ a, b ∉ S, keeping boundaries that do
/// not strictly contain another cut's boundary.
fn enumerate_minimal_cuts(g: &Graph, a: usize, b: usize, max_count: usize) -> Result<Vec<UsageRow>> {
    let n = g.n();
    if n > 24 {
        return Err(Error::GuardExceeded(format!("cut enumeration over 2^{} vertex subsets", n - 2)));
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
    let words = g.m().div_ceil(64).max(1);
    let mut cuts: Vec<(Vec<u64>, Vec<bool>)> = Vec::new();
    let mut seen = HashSet::new();
    for mask in 0u64..(1u64 << others.len()) {
        let mut side = vec![false; n];
        side[a] = true;
        for (i, &v) in others.iter().enumerate() {
            side[v] = (mask >> i) & 1 == 1;
        }
        let mut bits = vec![0u64; words];
        for e in g.edges() {
            if side[e.tail] != side[e.head] {
                bits[e.id / 64] |= 1 << (e.id % 64);
            }
        }
        if seen.insert(bits.clone()) {
            cuts.push((bits, side));
        }
    }
    let strictly_contains = |big: &[u64], small: &[u64]| big != small && big.iter().zip(small).all(|(x, y)| x & y == *y);
    let mut out = Vec::new();
    for (bits, side) in &cuts {
        if cuts.iter().any(|(other, _)| strictly_contains(bits, other)) {
            continue;
        }
        if out.len() >= max_count {
            return Err(guard(out.len() + 1, max_count));
        }
        let edges: Vec<usize> = (0..g.m()).filter(|&e| bits[e / 64] >> (e % 64) & 1 == 1).collect();
        out.push(UsageRow::indicator(&edges, Some(cut_label(g, side))));
    }
    Ok(out)
}

/// Number of spanning trees by the matrix-tree theorem.
pub fn spanning_tree_count(g: &Graph) -> f64 {
    let n = g.n();
    if n <= 1 {
        return 1.0;
    }
    let mut lap = nalgebra::DMatrix::<f64>::zeros(n - 1, n - 1);
    for e in g.edges() {
        let (u, v) = (e.tail, e.head);
        if u + 1 < n {
            lap[(u, u)] += 1.0;
        }
        if v + 1 < n {
            lap[(v, v)] += 1.0;
        }
        if u + 1 < n && v + 1 < n {
            lap[(u, v)] -= 1.0;
            lap[(v, u)] -= 1.0;
        }
    }
    lap.determinant().round().max(0.0)
}

fn enumerate_spanning_trees(g: &Graph, max_count: usize) -> Result<Vec<UsageRow>> {
    let count = spanning_tree_count(g);
    if count > max_count as f64 {
        return Err(guard(count as usize, max_count));
    }
    let n = g.n();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n - 1);
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            x = parent[x];
        }
        x
    }
    fn rec(g: &Graph, start: usize, parent: &mut Vec<usize>, chosen: &mut Vec<usize>, out: &mut Vec<UsageRow>) {
        let n = g.n();
        if chosen.len() + 1 == n {
            out.push(UsageRow::indicator(chosen, Some(tree_label(g, chosen))));
            return;
        }
        let need = n - 1 - chosen.len();
        for e in start..g.m() {
            if g.m() - e < need {
                break;
            }
            let edge = g.edge(e);
            let (ru, rv) = (find(parent, edge.tail), find(parent, edge.head));
            if ru == rv {
                continue;
            }
            parent[ru] = rv;
            chosen.push(e);
            rec(g, e + 1, parent, chosen, out);
            chosen.pop();
            parent[ru] = ru;
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    rec(g, 0, &mut parent, &mut chosen, &mut out);
    Ok(out)
}
