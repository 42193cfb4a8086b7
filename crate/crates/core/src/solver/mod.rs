//! Modulus solvers: constraint generation over the Lagrangian dual for
//! 1 < p < ∞, and direct combinatorial formulas at p = 1 and p = ∞.

mod dual;

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::duality::{enumerate_blocker_vertices, enumerate_feasible_partitions, PARTITION_VERTEX_LIMIT};
use crate::error::{Error, Result};
use crate::family::{Family, FamilyKind, UsageRow};
use crate::graph::{energy, min_cut, shortest_path_length, Density, DensityRole};

use dual::RestrictedDual;

/// Conjugate exponent q = p/(p−1), with q = ∞ at p = 1 and q = 1 at p = ∞.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Relative duality gap (U − L)/U required for convergence.
    pub eps_rel: f64,
    /// Admissibility slack: the oracle row is not added once ℓ_ρ ≥ 1 − eps_adm.
    pub eps_adm: f64,
    /// Outer iterations; `None` means 10·m, but at least 50.
    pub max_outer: Option<usize>,
    /// Coordinate sweeps per inner solve.
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { eps_rel: 1e-6, eps_adm: 1e-8, max_outer: None, max_sweeps: 100_000 }
    }
}

impl SolverOptions {
    pub fn with_eps_rel(mut self, eps: f64) -> Self {
        self.eps_rel = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_rel > 0.0 && self.eps_rel < 1.0) {
            return Err(Error::InvalidInput(format!("eps_rel must lie in (0, 1), got {}", self.eps_rel)));
        }
        if !(self.eps_adm >= 0.0 && self.eps_adm < 1.0) {
            return Err(Error::InvalidInput(format!("eps_adm must lie in [0, 1), got {}", self.eps_adm)));
        }
        if self.max_outer == Some(0) || self.max_sweeps == 0 {
            return Err(Error::InvalidInput("iteration limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ModulusProblem {
    family: Family,
    p: f64,
    sigma: Vec<f64>,
    options: SolverOptions,
}

impl ModulusProblem {
    /// Problem with the graph's own weights. `p` is 1, ∞, or in (1, ∞).
    pub fn new(family: Family, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidInput(format!("exponent p must be at least 1, got {p}")));
        }
        let sigma = family.graph().weights();
        Ok(Self { family, p, sigma, options: SolverOptions::default() })
    }

    pub fn with_sigma(mut self, sigma: Vec<f64>) -> Result<Self> {
        self.family.graph().check_len(&sigma, "weights")?;
        if let Some(s) = sigma.iter().find(|s| **s <= 0.0) {
            return Err(Error::InvalidInput(format!("weights must be strictly positive, got {s}")));
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    /// σ̂ = σ^{−q/p}. At the endpoints this is σ^{−1}, the weight used
    /// against the blocker in the p = 1 / p = ∞ pairing.
    pub fn dual_weights(&self) -> Vec<f64> {
        let expo = if self.p == 1.0 || self.p.is_infinite() { -1.0 } else { -self.q() / self.p };
        self.sigma.iter().map(|s| s.powf(expo)).collect()
    }

    /// Dispatches on p.
    pub fn solve(&self) -> Result<ModulusSolution> {
        self.options.validate()?;
        if self.p == 1.0 {
            solve_modulus_p1(self)
        } else if self.p.is_infinite() {
            solve_modulus_pinf(self)
        } else {
            solve_modulus(self)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusSolution {
    pub p: f64,
    /// Midpoint of the certified bounds.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Exactly admissible density attaining `upper` (ρ* up to solver accuracy).
    pub rho: Density,
    /// η* = σ ρ*^{p−1} / Mod, when 1 < p < ∞.
    pub eta: Option<Density>,
    /// Active subfamily Γ' (rows with λ > 0).
    pub rows: Vec<UsageRow>,
    pub lambda: Vec<f64>,
    /// μ* = λ / ‖λ‖₁ over `rows`.
    pub pmf: Vec<f64>,
    pub iterations: usize,
    pub oracle_calls: usize,
    pub converged: bool,
    /// ℓ_ρ(Γ) of the reported density, from a final oracle call.
    pub admissibility: f64,
    /// Bound on ‖ρ − ρ*‖_p from the relative gap.
    pub accuracy_radius: Option<f64>,
    pub elapsed_ms: f64,
}

impl ModulusSolution {
    pub fn relative_gap(&self) -> f64 {
        if self.upper > 0.0 {
            (self.upper - self.lower) / self.upper
        } else {
            0.0
        }
    }

    /// JSON with edge-keyed densities and labelled pmf entries.
    pub fn to_json(&self, family: &Family) -> Value {
        let g = family.graph();
        let by_edge = |d: &Density| -> Value {
            let mut map = serde_json::Map::new();
            for (e, v) in d.values().iter().enumerate() {
                map.insert(g.edge_key(e), json!(v));
            }
            Value::Object(map)
        };
        let pmf: Vec<Value> = self
            .rows
            .iter()
            .zip(&self.pmf)
            .enumerate()
            .map(|(i, (r, prob))| json!({"label": r.label().map(str::to_string).unwrap_or_else(|| format!("row{i}")), "prob": prob}))
            .collect();
        json!({
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "p": if self.p.is_infinite() { json!("inf") } else { json!(self.p) },
            "rho": by_edge(&self.rho),
            "eta": self.eta.as_ref().map(by_edge),
            "pmf": pmf,
            "iterations": self.iterations,
            "oracle_calls": self.oracle_calls,
            "converged": self.converged,
            "admissibility": self.admissibility,
            "accuracy_radius": self.accuracy_radius,
        })
    }
}

/// ‖ρ − ρ*‖_p bound for an admissible ρ with energy `upper` given a lower
/// bound `lower` on the modulus, from the Clarkson-type inequality
/// ‖ρ−ρ*‖_p^M ≤ 2^{M−1} σ_min^{−M/p} (E(ρ)^{M/p} − Mod^{M/p}), M = max(p, q).
pub fn clarkson_radius(p: f64, sigma_min: f64, upper: f64, lower: f64) -> f64 {
    let q = conjugate(p);
    let m = p.max(q);
    let diff = (upper.powf(m / p) - lower.max(0.0).powf(m / p)).max(0.0);
    (2f64.powf(m - 1.0) * sigma_min.powf(-m / p) * diff).powf(1.0 / m)
}

/// Mod_{p,σ}(Γ) for 1 < p < ∞ by constraint generation.
///
/// Each outer iteration solves the dual restricted to the rows found so
/// far, asks the family oracle for a ρ-shortest object, and forms the
/// bounds U = E(ρ/ℓ) (exactly admissible) and L = D(λ). Rows are added
/// while they are violated; if the oracle returns a known row while the gap
/// is open, the inner tolerance is tightened instead.
pub fn solve_modulus(prob: &ModulusProblem) -> Result<ModulusSolution> {
    let start = Instant::now();
    let p = prob.p;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("solve_modulus needs 1 < p < ∞, got {p}")));
    }
    if p < 1.1 || p > 20.0 {
        log::warn!("p = {p} is poorly conditioned: the exponent 1/(p−1) amplifies solver noise");
    }
    let opts = &prob.options;
    let family = &prob.family;
    let sigma = &prob.sigma;
    let m = sigma.len();
    let max_outer = opts.max_outer.unwrap_or((10 * m).max(50));

    let rho0 = vec![1.0 / family.n_min(); m];
    let (first, _) = family.shortest_object(&rho0)?;
    let mut oracle_calls = 1;
    let mut dual = RestrictedDual::new(p, sigma);
    dual.push(first);

    let mut inner_tol = opts.eps_rel / 10.0;
    let mut converged = false;
    let mut iterations = 0;
    // (gap, U, L, ρ̃, λ snapshot)
    let mut best: Option<(f64, f64, f64, Vec<f64>, Vec<f64>)> = None;
    while iterations < max_outer {
        iterations += 1;
        let stats = dual.solve(inner_tol, opts.max_sweeps);
        let rho = dual.rho();
        let lower = dual.value();
        let (row, ell) = family.shortest_object(&rho)?;
        oracle_calls += 1;
        let upper = if ell > 0.0 { energy(&rho, p, sigma) / ell.powf(p) } else { f64::INFINITY };
        let gap = (upper - lower) / upper;
        log::debug!(
            "outer {iterations}: rows={} sweeps={} inner_gap={:.2e} L={lower:.10e} U={upper:.10e} ell={ell:.10}",
            dual.rows.len(),
            stats.sweeps,
            stats.gap
        );
        if upper.is_finite() && best.as_ref().is_none_or(|b| gap < b.0) {
            let scaled: Vec<f64> = rho.iter().map(|r| r / ell).collect();
            best = Some((gap, upper, lower, scaled, dual.lambda.clone()));
        }
        if gap <= opts.eps_rel {
            converged = true;
            break;
        }
        if ell < 1.0 - opts.eps_adm && !dual.contains(&row) {
            dual.push(row);
        } else if inner_tol > 1e-15 {
            inner_tol = (inner_tol / 10.0).max(1e-15);
        } else {
            log::warn!("solver stalled at relative gap {gap:.3e}");
            break;
        }
    }

    let (_, upper, lower, rho, lambda) =
        best.ok_or_else(|| Error::Numerical("no admissible density was found".into()))?;
    // D(λ) ≤ E(ρ̃) holds exactly; rounding can invert it by a few ulps.
    let lower = lower.min(upper);
    let lambda_sum: f64 = lambda.iter().sum();
    assert!(lambda_sum > 0.0, "non-trivial family with zero multipliers");
    let admissibility = family.shortest_object(&rho)?.1;
    oracle_calls += 1;

    let value = 0.5 * (upper + lower);
    let eta: Vec<f64> = rho.iter().zip(sigma).map(|(r, s)| s * r.powf(p - 1.0) / value).collect();
    let mut rows = Vec::new();
    let mut active_lambda = Vec::new();
    for (row, &l) in dual.rows.iter().zip(&lambda) {
        if l > 0.0 {
            rows.push(row.clone());
            active_lambda.push(l);
        }
    }
    let pmf = active_lambda.iter().map(|l| l / lambda_sum).collect();
    let sigma_min = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
    if !converged {
        log::warn!("modulus solve stopped after {iterations} outer iterations with gap {:.3e}", (upper - lower) / upper);
    }
    Ok(ModulusSolution {
        p,
        value,
        lower,
        upper,
        rho: Density::new(rho, DensityRole::Primal)?,
        eta: Some(Density::new(eta, DensityRole::Blocker)?),
        rows,
        lambda: active_lambda,
        pmf,
        iterations,
        oracle_calls,
        converged,
        admissibility,
        accuracy_radius: Some(clarkson_radius(p, sigma_min, upper, lower)),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Mod_{1,σ}(Γ) as the minimum of σ·γ̂ over blocker vertices γ̂, computed per
/// family: a minimum cut for connecting paths, a shortest path for cuts,
/// feasible partitions for spanning trees, and enumerated blocker vertices
/// for explicit families. The reported density is the minimizing vertex.
pub fn solve_modulus_p1(prob: &ModulusProblem) -> Result<ModulusSolution> {
    let start = Instant::now();
    let family = &prob.family;
    let g = family.graph();
    let sigma = &prob.sigma;
    let m = sigma.len();
    let (rho, value) = match family.kind() {
        FamilyKind::Connect { a, b } => {
            if g.is_directed() {
                return Err(Error::Unsupported("p = 1 for directed connecting families".into()));
            }
            let cut = min_cut(g, *a, *b, sigma)?;
            (indicator(m, &cut.edges, 1.0), cut.value)
        }
        FamilyKind::Cut { a, b } => {
            let sp = shortest_path_length(g, *a, *b, sigma)?;
            (indicator(m, &sp.edges, 1.0), sp.length)
        }
        FamilyKind::SpanningTree => {
            if g.n() > PARTITION_VERTEX_LIMIT {
                return Err(Error::GuardExceeded(format!(
                    "feasible partitions need n ≤ {PARTITION_VERTEX_LIMIT}, graph has {}",
                    g.n()
                )));
            }
            let parts = enumerate_feasible_partitions(g)?;
            let best = parts
                .iter()
                .map(|fp| (fp, fp.cut_edges.iter().map(|&e| sigma[e]).sum::<f64>() / (fp.k() - 1) as f64))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::EmptyFamily("no feasible partition".into()))?;
            (best.0.blocker_vector(m), best.1)
        }
        FamilyKind::Explicit(rows) => {
            let verts = enumerate_blocker_vertices(rows, m)?;
            verts
                .into_iter()
                .map(|v| {
                    let c: f64 = v.coords.iter().zip(sigma).map(|(x, s)| x * s).sum();
                    (v.coords, c)
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::Numerical("blocker enumeration returned no vertex".into()))?
        }
    };
    let admissibility = family.shortest_object(&rho)?.1;
    endpoint_solution(1.0, value, rho, admissibility, start)
}

/// Mod_{∞,w}(Γ) = (min_γ Σ_e N(γ,e)/w(e))^{−1} with w the problem weights.
/// The reported density is ρ = Mod/w, which is admissible with equality on
/// the minimizing object.
pub fn solve_modulus_pinf(prob: &ModulusProblem) -> Result<ModulusSolution> {
    let start = Instant::now();
    let inv: Vec<f64> = prob.sigma.iter().map(|w| 1.0 / w).collect();
    let (_, len) = prob.family.shortest_object(&inv)?;
    let value = 1.0 / len;
    let rho: Vec<f64> = inv.iter().map(|x| x * value).collect();
    let admissibility = prob.family.shortest_object(&rho)?.1;
    endpoint_solution(f64::INFINITY, value, rho, admissibility, start)
}

fn indicator(m: usize, edges: &[usize], v: f64) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for &e in edges {
        out[e] = v;
    }
    out
}

fn endpoint_solution(p: f64, value: f64, rho: Vec<f64>, admissibility: f64, start: Instant) -> Result<ModulusSolution> {
    Ok(ModulusSolution {
        p,
        value,
        lower: value,
        upper: value,
        rho: Density::new(rho, DensityRole::Primal)?,
        eta: None,
        rows: Vec::new(),
        lambda: Vec::new(),
        pmf: Vec::new(),
        iterations: 1,
        oracle_calls: 1,
        converged: true,
        admissibility,
        accuracy_radius: None,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
