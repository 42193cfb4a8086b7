//! Modulus-based distances on vertex pairs: δ_p = Mod_{p,σ}(Γ(a,b))^{−q/p},
//! Mod_p^{−1} for 1 < p < 2, and the min-cut ultrametric d_MC = 1/MC.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::graph::{effective_resistance, hop_distance, min_cut, Graph};
use crate::solver::{conjugate, ModulusProblem, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Mod_p^{−q/p}.
    DeltaP,
    /// Mod_p^{−1}.
    ModInverse,
    /// 1 / MC(a, b).
    MinCutInverse,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub against: &'static str,
    /// Largest |d(a,b)/d_ref(a,b) − 1| over pairs a ≠ b.
    pub max_relative_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub kind: MetricKind,
    pub p: f64,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    /// Smallest d(a,c) + d(c,b) − d(a,b) over distinct triples, or with the
    /// maximum in place of the sum for the ultrametric check.
    pub triangle_slack: f64,
    pub worst_triple: Option<[usize; 3]>,
    pub symmetry_error: f64,
    pub min_off_diagonal: f64,
    pub comparisons: Vec<Comparison>,
    pub converged: bool,
}

impl MetricReport {
    /// Matrix as CSV with vertex labels on both axes.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.labels.iter().map(|l| csv_field(l)).collect();
        let _ = writeln!(out, ",{}", header.join(","));
        for (label, row) in self.labels.iter().zip(&self.matrix) {
            let vals: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{},{}", csv_field(label), vals.join(","));
        }
        out
    }

    /// Whether the axioms hold within `tol`: zero diagonal, symmetry,
    /// positivity off the diagonal, and the triangle inequality.
    pub fn is_metric(&self, tol: f64) -> bool {
        let n = self.matrix.len();
        (0..n).all(|i| self.matrix[i][i] == 0.0)
            && self.symmetry_error <= tol
            && (n < 2 || self.min_off_diagonal > 0.0)
            && self.triangle_slack >= -tol
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn require_metric_graph(g: &Graph) -> Result<()> {
    g.require_undirected()?;
    if g.n() < 2 {
        return Err(Error::InvalidInput("metrics need at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Mod_{p,σ}(Γ(a,b)) for every ordered pair a ≠ b, solved independently.
fn pair_moduli(g: &Arc<Graph>, p: f64, opts: &SolverOptions) -> Result<(Vec<Vec<f64>>, bool)> {
    let n = g.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let solved: Vec<(usize, usize, f64, bool)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let f = Family::connect(g.clone(), a, b)?;
            let sol = ModulusProblem::new(f, p)?.with_options(opts.clone()).solve()?;
            Ok((a, b, sol.value, sol.converged))
        })
        .collect::<Result<_>>()?;
    let mut m = vec![vec![0.0; n]; n];
    let mut converged = true;
    for (a, b, v, c) in solved {
        m[a][b] = v;
        converged &= c;
    }
    Ok((m, converged))
}

fn build_report(
    kind: MetricKind,
    p: f64,
    g: &Graph,
    matrix: Vec<Vec<f64>>,
    converged: bool,
    comparisons: Vec<Comparison>,
) -> MetricReport {
    let n = g.n();
    let ultra = kind == MetricKind::MinCutInverse;
    let mut slack = f64::INFINITY;
    let mut worst = None;
    let mut sym: f64 = 0.0;
    let mut min_off = f64::INFINITY;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            sym = sym.max((matrix[a][b] - matrix[b][a]).abs() / matrix[a][b].abs().max(f64::MIN_POSITIVE));
            min_off = min_off.min(matrix[a][b]);
            for c in 0..n {
                if c == a || c == b {
                    continue;
                }
                let s = if ultra {
                    matrix[a][c].max(matrix[c][b]) - matrix[a][b]
                } else {
                    matrix[a][c] + matrix[c][b] - matrix[a][b]
                };
                if s < slack {
                    slack = s;
                    worst = Some([a, b, c]);
                }
            }
        }
    }
    MetricReport {
        kind,
        p,
        labels: g.labels().to_vec(),
        matrix,
        triangle_slack: if slack.is_finite() { slack } else { 0.0 },
        worst_triple: worst,
        symmetry_error: sym,
        min_off_diagonal: if min_off.is_finite() { min_off } else { 0.0 },
        comparisons,
        converged,
    }
}

fn max_rel_dev(matrix: &[Vec<f64>], reference: impl Fn(usize, usize) -> Result<f64>) -> Result<f64> {
    let n = matrix.len();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let r = reference(a, b)?;
                worst = worst.max((matrix[a][b] / r - 1.0).abs());
            }
        }
    }
    Ok(worst)
}

/// δ_p(a,b) = Mod_{p,σ}(Γ(a,b))^{−q/p} on all pairs, compared against hop
/// distance and, at p = 2, effective resistance.
pub fn delta_p_matrix(g: &Arc<Graph>, p: f64, opts: &SolverOptions) -> Result<MetricReport> {
    require_metric_graph(g)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("δ_p needs 1 < p < ∞, got {p}")));
    }
    let (moduli, converged) = pair_moduli(g, p, opts)?;
    let e = -conjugate(p) / p;
    let matrix: Vec<Vec<f64>> = moduli
        .iter()
        .enumerate()
        .map(|(a, row)| row.iter().enumerate().map(|(b, &v)| if a == b { 0.0 } else { v.powf(e) }).collect())
        .collect();
    let mut comparisons = vec![Comparison {
        against: "hop-distance",
        max_relative_deviation: max_rel_dev(&matrix, |a, b| Ok(hop_distance(g, a, b).unwrap_or(usize::MAX) as f64))?,
    }];
    if p == 2.0 {
        comparisons.push(Comparison {
            against: "effective-resistance",
            max_relative_deviation: max_rel_dev(&matrix, |a, b| effective_resistance(g, a, b))?,
        });
    }
    Ok(build_report(MetricKind::DeltaP, p, g, matrix, converged, comparisons))
}

/// Mod_{p,σ}(Γ(a,b))^{−1} for 1 < p < 2, compared against 1/MC(a,b).
pub fn mod_inverse_metric(g: &Arc<Graph>, p: f64, opts: &SolverOptions) -> Result<MetricReport> {
    require_metric_graph(g)?;
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidInput(format!("Mod_p^-1 is a metric for 1 < p < 2, got {p}")));
    }
    let (moduli, converged) = pair_moduli(g, p, opts)?;
    let matrix: Vec<Vec<f64>> = moduli
        .iter()
        .enumerate()
        .map(|(a, row)| row.iter().enumerate().map(|(b, &v)| if a == b { 0.0 } else { 1.0 / v }).collect())
        .collect();
    let sigma = g.weights();
    let comparisons = vec![Comparison {
        against: "inverse-min-cut",
        max_relative_deviation: max_rel_dev(&matrix, |a, b| Ok(1.0 / min_cut(g, a, b, &sigma)?.value))?,
    }];
    Ok(build_report(MetricKind::ModInverse, p, g, matrix, converged, comparisons))
}

/// d_MC = 1/MC with the max-form triangle inequality.
pub fn ultrametric_check(g: &Graph) -> Result<MetricReport> {
    require_metric_graph(g)?;
    let n = g.n();
    let sigma = g.weights();
    let mut matrix = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let d = 1.0 / min_cut(g, a, b, &sigma)?.value;
            matrix[a][b] = d;
            matrix[b][a] = d;
        }
    }
    Ok(build_report(MetricKind::MinCutInverse, 1.0, g, matrix, true, Vec::new()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SnowflakeWitness {
    pub p: f64,
    pub epsilon: f64,
    /// Graph edges {a,c}, {c,b}; the triple is (a, b, c).
    pub labels: [String; 3],
    /// δ_p(a,b), δ_p(a,c), δ_p(c,b) from the solver.
    pub deltas: [f64; 3],
    /// δ_p(a,b)^{1+ε}.
    pub lhs: f64,
    /// δ_p(a,c)^{1+ε} + δ_p(c,b)^{1+ε}.
    pub rhs: f64,
    pub violated: bool,
}

/// The path a–c–b: δ_p(a,b) = 2 = δ_p(a,c) + δ_p(c,b), so δ_p^{1+ε} breaks
/// the triangle inequality for every ε > 0. A violation is reported only
/// when it exceeds the solver accuracy (relative 1e-5).
pub fn anti_snowflake_witness(p: f64, epsilon: f64, opts: &SolverOptions) -> Result<SnowflakeWitness> {
    if !(p > 1.0 && p.is_finite()) || !(epsilon >= 0.0) {
        return Err(Error::InvalidInput("witness needs 1 < p < ∞ and ε ≥ 0".into()));
    }
    let g = Arc::new(crate::fixtures::path(&["a", "c", "b"]));
    let (a, c, b) = (0, 1, 2);
    let delta = |x, y| -> Result<f64> {
        let sol = ModulusProblem::new(Family::connect(g.clone(), x, y)?, p)?.with_options(opts.clone()).solve()?;
        Ok(sol.value.powf(-conjugate(p) / p))
    };
    let deltas = [delta(a, b)?, delta(a, c)?, delta(c, b)?];
    let t = 1.0 + epsilon;
    let lhs = deltas[0].powf(t);
    let rhs = deltas[1].powf(t) + deltas[2].powf(t);
    Ok(SnowflakeWitness {
        p,
        epsilon,
        labels: ["a".into(), "b".into(), "c".into()],
        deltas,
        lhs,
        rhs,
        violated: lhs > rhs * (1.0 + 1e-5),
    })
}

/// Checks that every minimal ab-cut boundary is a minimal ac-cut or cb-cut
/// boundary, the inclusion behind the triangle inequality for δ_p.
pub fn cut_inclusion_check(g: &Arc<Graph>, a: usize, b: usize, c: usize, max_count: usize) -> Result<bool> {
    let cuts = |x, y| -> Result<Vec<Vec<usize>>> {
        Ok(Family::cut(g.clone(), x, y)?
            .enumerate(max_count)?
            .into_iter()
            .map(|r| r.entries().iter().map(|&(e, _)| e).collect())
            .collect())
    };
    let ab = cuts(a, b)?;
    let mut other = cuts(a, c)?;
    other.extend(cuts(c, b)?);
    Ok(ab.iter().all(|s| other.contains(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn p3_degenerate_triangle() {
        let g = Arc::new(fixtures::path(&["a", "c", "b"]));
        for p in [1.5, 2.0, 3.0] {
            let r = delta_p_matrix(&g, p, &SolverOptions::default()).unwrap();
            assert!((r.matrix[0][2] - 2.0).abs() < 1e-5, "p={p}: {}", r.matrix[0][2]);
            assert!(r.triangle_slack.abs() < 1e-5);
            assert!(r.is_metric(1e-6));
        }
    }

    #[test]
    fn delta2_is_effective_resistance() {
        let g = Arc::new(fixtures::triangle());
        let r = delta_p_matrix(&g, 2.0, &SolverOptions::default()).unwrap();
        assert!((r.matrix[0][1] - 2.0 / 3.0).abs() < 1e-6);
        assert!(r.comparisons.iter().any(|c| c.against == "effective-resistance" && c.max_relative_deviation < 1e-5));
    }

    #[test]
    fn mod_inverse_near_one() {
        let g = Arc::new(fixtures::path(&["a", "c", "b"]));
        let r = mod_inverse_metric(&g, 1.5, &SolverOptions::default()).unwrap();
        assert!((r.matrix[0][2] - 2f64.sqrt()).abs() < 1e-5);
        let g = Arc::new(fixtures::triangle());
        let r = mod_inverse_metric(&g, 1.05, &SolverOptions::default()).unwrap();
        assert!((r.matrix[0][1] / 0.5 - 1.0).abs() < 0.15);
        assert!(r.comparisons[0].max_relative_deviation < 0.15);
    }

    #[test]
    fn ultrametric_small_graphs() {
        let r = ultrametric_check(&fixtures::triangle()).unwrap();
        assert!(r.matrix[0][1] == 0.5 && r.triangle_slack >= 0.0);
        let r = ultrametric_check(&fixtures::path(&["a", "b", "c"])).unwrap();
        assert_eq!(r.matrix[0][2], 1.0);
        assert!(r.triangle_slack >= -1e-12);
    }

    #[test]
    fn snowflake() {
        let opts = SolverOptions::default();
        let w = anti_snowflake_witness(2.0, 0.1, &opts).unwrap();
        assert!(w.violated);
        assert!((w.lhs - 2f64.powf(1.1)).abs() < 1e-4);
        let w = anti_snowflake_witness(3.0, 1.0, &opts).unwrap();
        assert!(w.violated && (w.lhs - 4.0).abs() < 1e-4 && (w.rhs - 2.0).abs() < 1e-4);
        assert!(!anti_snowflake_witness(2.0, 0.0, &opts).unwrap().violated);
    }

    #[test]
    fn csv_has_labels() {
        let r = ultrametric_check(&fixtures::triangle()).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with(",a,b,c\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn cut_inclusion_on_triangle() {
        let g = Arc::new(fixtures::triangle());
        assert!(cut_inclusion_check(&g, 0, 1, 2, 100).unwrap());
    }
}
