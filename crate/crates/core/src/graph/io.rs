use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `tail head [weight]` per line, `#` comments.
    EdgeList,
    /// `{"directed": bool, "edges": [{"u": .., "v": .., "w": ..}]}`
    Json,
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-list" | "edgelist" | "txt" => Ok(Self::EdgeList),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidInput(format!("unknown graph format `{other}`"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    #[serde(default)]
    directed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<String>>,
    edges: Vec<JsonEdge>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    u: String,
    v: String,
    #[serde(default = "unit_weight")]
    w: f64,
}

fn unit_weight() -> f64 {
    1.0
}

/// Reads a graph. `directed` applies to edge lists; JSON carries its own flag.
pub fn load_graph<R: Read>(mut source: R, format: GraphFormat, directed: bool) -> Result<Graph> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match format {
        GraphFormat::EdgeList => parse_edge_list(&text, directed),
        GraphFormat::Json => parse_json(&text),
    }
}

fn parse_edge_list(text: &str, directed: bool) -> Result<Graph> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let weight = match fields.as_slice() {
            [_, _] => 1.0,
            [_, _, w] => w.parse::<f64>().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("field 3: `{w}` is not a number"),
            })?,
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `tail head [weight]`, got {} fields", fields.len()),
                })
            }
        };
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::NonPositiveWeight { edge: format!("line {}", i + 1), weight });
        }
        edges.push((fields[0], fields[1], weight));
    }
    Graph::from_labeled_edges(directed, &edges)
}

fn parse_json(text: &str) -> Result<Graph> {
    let parsed: JsonGraph = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    match parsed.vertices {
        None => {
            let edges: Vec<(&str, &str, f64)> = parsed.edges.iter().map(|e| (e.u.as_str(), e.v.as_str(), e.w)).collect();
            Graph::from_labeled_edges(parsed.directed, &edges)
        }
        Some(labels) => {
            let mut index = HashMap::new();
            for (i, l) in labels.iter().enumerate() {
                if let Some(prev) = index.insert(l.as_str(), i) {
                    return Err(Error::InvalidInput(format!("vertex `{l}` listed at both index {prev} and {i}")));
                }
            }
            let mut edges = Vec::with_capacity(parsed.edges.len());
            for e in &parsed.edges {
                let u = *index.get(e.u.as_str()).ok_or_else(|| Error::UnknownVertex(e.u.clone()))?;
                let v = *index.get(e.v.as_str()).ok_or_else(|| Error::UnknownVertex(e.v.clone()))?;
                edges.push((u, v, e.w));
            }
            Graph::with_labels(labels, parsed.directed, &edges)
        }
    }
}

impl Graph {
    /// JSON form accepted by [`load_graph`], with the vertex order pinned.
    pub fn to_json(&self) -> serde_json::Value {
        let g = JsonGraph {
            directed: self.is_directed(),
            vertices: Some(self.labels().to_vec()),
            edges: self
                .edges()
                .iter()
                .map(|e| JsonEdge { u: self.label(e.tail).to_string(), v: self.label(e.head).to_string(), w: e.weight })
                .collect(),
        };
        serde_json::to_value(g).expect("graph serializes")
    }
}
