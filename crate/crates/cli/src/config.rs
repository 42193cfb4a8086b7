//! Run configuration: a JSON file merged with command-line flags. The merged
//! value is echoed in every report and can be fed back with `--config`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use pmodulus::graph::{load_graph, GraphFormat};
use pmodulus::{Error, Family, Graph, Result, SolverOptions};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exponent in [1, ∞]; written as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl std::str::FromStr for Exponent {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let p = match s.trim() {
            "inf" | "infinity" | "∞" => f64::INFINITY,
            t => t.parse::<f64>().map_err(|e| format!("invalid exponent `{s}`: {e}"))?,
        };
        if p.is_nan() || p < 1.0 {
            return Err(format!("exponent must satisfy p ≥ 1, got {s}"));
        }
        Ok(Self(p))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::from_str_num(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

impl Exponent {
    fn from_str_num(p: f64) -> std::result::Result<Self, String> {
        if p.is_nan() || p < 1.0 {
            Err(format!("exponent must satisfy p ≥ 1, got {p}"))
        } else {
            Ok(Self(p))
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    /// `edge-list` or `json`; inferred from the extension when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default)]
    pub directed: bool,
    /// `connect:a,b`, `cut:a,b`, `tree` or `explicit:<path>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    /// Solver tolerances; each command has its own default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub csv: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Monte Carlo trials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Exponential rate θ per edge key; edges not listed use `rate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Metric kind: `delta-p`, `mod-inverse` or `min-cut`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Edge swept by the sensitivity command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<String>,
    /// σ(e) values for the sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    /// Relative finite-difference step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_rel: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p.map(|p| p.0).ok_or_else(|| Error::InvalidInput("missing --p".into()))
    }

    pub fn solver_or(&self, default: SolverOptions) -> SolverOptions {
        self.solver.clone().unwrap_or(default)
    }

    pub fn graph_format(&self) -> Result<GraphFormat> {
        match &self.format {
            Some(f) => f.parse(),
            None => Ok(match self.graph.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some("json") => GraphFormat::Json,
                _ => GraphFormat::EdgeList,
            }),
        }
    }

    pub fn load_graph(&self) -> Result<Arc<Graph>> {
        let path = self.graph.as_ref().ok_or_else(|| Error::InvalidInput("missing --graph".into()))?;
        let file = File::open(path).map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
        Ok(Arc::new(load_graph(file, self.graph_format()?, self.directed)?))
    }

    pub fn load_family(&self, g: &Arc<Graph>) -> Result<Family> {
        let spec = self.family.as_deref().ok_or_else(|| Error::InvalidInput("missing --family".into()))?;
        parse_family(spec, g)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.solver {
            s.validate()?;
        }
        if let Some(f) = &self.format {
            f.parse::<GraphFormat>()?;
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidInput("--jobs must be at least 1".into()));
        }
        if let Some(t) = self.trials {
            if t < 2 {
                return Err(Error::InvalidInput("--trials must be at least 2".into()));
            }
        }
        if let Some(h) = self.h_rel {
            if !(h > 0.0 && h < 0.5) {
                return Err(Error::InvalidInput(format!("--h-rel must lie in (0, 0.5), got {h}")));
            }
        }
        for r in self.rate.iter().chain(self.rates.iter().flat_map(|m| m.values())) {
            if !(r.is_finite() && *r > 0.0) {
                return Err(Error::InvalidInput(format!("exponential rates must be positive, got {r}")));
            }
        }
        if let Some(k) = &self.kind {
            if !matches!(k.as_str(), "delta-p" | "mod-inverse" | "min-cut") {
                return Err(Error::InvalidInput(format!("unknown metric kind `{k}`")));
            }
        }
        Ok(())
    }
}

pub fn parse_family(spec: &str, g: &Arc<Graph>) -> Result<Family> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let ends = || -> Result<(usize, usize)> {
        let (a, b) = rest
            .split_once(',')
            .ok_or_else(|| Error::InvalidInput(format!("family `{spec}` needs two endpoints, as in {kind}:a,b")))?;
        Ok((g.vertex(a.trim())?, g.vertex(b.trim())?))
    };
    match kind {
        "connect" => {
            let (a, b) = ends()?;
            Family::connect(g.clone(), a, b)
        }
        "cut" => {
            let (a, b) = ends()?;
            Family::cut(g.clone(), a, b)
        }
        "tree" | "trees" | "spanning-tree" if rest.is_empty() => Family::spanning_trees(g.clone()),
        "explicit" if !rest.is_empty() => {
            let file = File::open(rest).map_err(|e| Error::InvalidInput(format!("cannot open {rest}: {e}")))?;
            Family::load_explicit(file, g.clone())
        }
        _ => Err(Error::InvalidInput(format!(
            "unknown family `{spec}`; expected connect:a,b, cut:a,b, tree or explicit:<path>"
        ))),
    }
}
