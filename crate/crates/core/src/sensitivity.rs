//! Diagnostics for φ(σ) = Mod_{p,σ}(Γ) as a function of the weights:
//! ∂φ/∂σ(e) = ρ*(e)^p, concavity, Lipschitz continuity, continuity of ρ*,
//! and monotonicity of Mod, ρ*(e) and η*(e) in σ(e).

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::solver::{ModulusProblem, ModulusSolution, SolverOptions};

/// Solver options used by the finite-difference and sweep checks: the
/// difference quotients divide solver error by h, so solves are much tighter
/// than the default.
pub fn sensitivity_options() -> SolverOptions {
    SolverOptions::default().with_eps_rel(1e-11)
}

fn solve(f: &Family, p: f64, sigma: &[f64], opts: &SolverOptions) -> Result<ModulusSolution> {
    let sol = ModulusProblem::new(f.clone(), p)?.with_sigma(sigma.to_vec())?.with_options(opts.clone()).solve()?;
    if !sol.converged {
        return Err(Error::NotConverged(format!("modulus solve at p = {p} did not reach the requested gap")));
    }
    Ok(sol)
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("sensitivity checks need 1 < p < ∞, got {p}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientEntry {
    pub edge: usize,
    pub key: String,
    /// (φ(σ + h1_e) − φ(σ − h1_e)) / 2h.
    pub finite_difference: f64,
    /// ρ*(e)^p.
    pub analytic: f64,
    pub deviation: f64,
    pub tolerance: f64,
    /// Curvature estimate C in the O(C h²) truncation term.
    pub curvature: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientReport {
    pub p: f64,
    pub modulus: f64,
    /// Step relative to σ(e).
    pub h_rel: f64,
    pub eps_rel: f64,
    pub entries: Vec<GradientEntry>,
    pub max_relative_deviation: f64,
    pub passed: bool,
}

/// Central differences against ρ*(e)^p on every edge. The per-edge
/// tolerance is max(1e-3·ρ*(e)^p, 10·ε_rel·φ/h + C·h²), where the middle term
/// is the solver noise carried through the difference quotient and C is
/// estimated by comparing the quotients at h and 2h.
pub fn gradient_check(f: &Family, p: f64, sigma: &[f64], h_rel: f64, opts: &SolverOptions) -> Result<GradientReport> {
    check_p(p)?;
    if !(h_rel > 0.0 && h_rel < 0.5) {
        return Err(Error::InvalidInput(format!("relative step must lie in (0, 0.5), got {h_rel}")));
    }
    let base = solve(f, p, sigma, opts)?;
    let phi = base.value;
    let eps = opts.eps_rel;
    let entries: Vec<GradientEntry> = (0..sigma.len())
        .into_par_iter()
        .map(|e| {
            let h = h_rel * sigma[e];
            let at = |delta: f64| -> Result<f64> {
                let mut s = sigma.to_vec();
                s[e] += delta;
                Ok(solve(f, p, &s, opts)?.value)
            };
            let d1 = (at(h)? - at(-h)?) / (2.0 * h);
            let d2 = (at(2.0 * h)? - at(-2.0 * h)?) / (4.0 * h);
            let curvature = (d2 - d1).abs() / (3.0 * h * h);
            let analytic = base.rho[e].powf(p);
            let deviation = (d1 - analytic).abs();
            let tolerance = (1e-3 * analytic).max(10.0 * eps * phi / h + curvature * h * h);
            Ok(GradientEntry {
                edge: e,
                key: f.graph().edge_key(e),
                finite_difference: d1,
                analytic,
                deviation,
                tolerance,
                curvature,
                passed: deviation <= tolerance,
            })
        })
        .collect::<Result<_>>()?;
    let max_relative_deviation = entries
        .iter()
        .map(|g| if g.analytic > 0.0 { g.deviation / g.analytic } else { g.deviation })
        .fold(0.0, f64::max);
    let passed = entries.iter().all(|g| g.passed);
    Ok(GradientReport { p, modulus: phi, h_rel, eps_rel: eps, entries, max_relative_deviation, passed })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub sigma_e: f64,
    pub modulus: f64,
    pub lower: f64,
    pub upper: f64,
    pub rho_e: f64,
    pub eta_e: f64,
    /// Certified ‖ρ − ρ*‖_p bound for this grid point.
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub quantity: &'static str,
    /// Grid index i where the step i−1 → i goes the wrong way.
    pub index: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub p: f64,
    pub edge: usize,
    pub key: String,
    pub rows: Vec<SweepRow>,
    pub slack: f64,
    pub violations: Vec<Violation>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma_e,modulus,rho_e,eta_e\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.sigma_e, r.modulus, r.rho_e, r.eta_e);
        }
        out
    }
}

/// Sweeps σ(e) over an increasing grid. Mod must not decrease, ρ*(e) must
/// not increase and η*(e) must not decrease. Each point is an approximate
/// solve, so a step is flagged only when the certified intervals (bounds
/// [L, U] for Mod, ρ(e) ± radius for ρ*(e), and the induced range for
/// η*(e)) are out of order by more than 10·ε_rel.
pub fn monotonicity_sweep(
    f: &Family,
    p: f64,
    sigma: &[f64],
    edge: usize,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<SweepReport> {
    check_p(p)?;
    if edge >= sigma.len() {
        return Err(Error::UnknownEdge(edge.to_string()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|s| *s <= 0.0) {
        return Err(Error::InvalidInput("sweep grid must be positive and strictly increasing".into()));
    }
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&s| {
            let mut w = sigma.to_vec();
            w[edge] = s;
            let sol = solve(f, p, &w, opts)?;
            Ok(SweepRow {
                sigma_e: s,
                modulus: sol.value,
                lower: sol.lower,
                upper: sol.upper,
                rho_e: sol.rho[edge],
                eta_e: sol.eta.as_ref().map_or(0.0, |e| e[edge]),
                radius: sol.accuracy_radius.unwrap_or(0.0),
            })
        })
        .collect::<Result<_>>()?;

    let slack = 10.0 * opts.eps_rel;
    let eta_range = |r: &SweepRow| {
        let lo = r.sigma_e * (r.rho_e - r.radius).max(0.0).powf(p - 1.0) / r.upper;
        let hi = r.sigma_e * (r.rho_e + r.radius).powf(p - 1.0) / r.lower;
        (lo, hi)
    };
    let mut violations = Vec::new();
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        let d = a.lower - b.upper;
        if d > slack * a.upper {
            violations.push(Violation { quantity: "modulus", index: i, magnitude: d });
        }
        let d = (b.rho_e - b.radius) - (a.rho_e + a.radius);
        if d > slack {
            violations.push(Violation { quantity: "rho", index: i, magnitude: d });
        }
        let d = eta_range(a).0 - eta_range(b).1;
        if d > slack {
            violations.push(Violation { quantity: "eta", index: i, magnitude: d });
        }
    }
    Ok(SweepReport { p, edge, key: f.graph().edge_key(edge), rows, slack, violations })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityReport {
    pub p: f64,
    pub t: Vec<f64>,
    /// φ(tσ₁ + (1−t)σ₀) − [tφ(σ₁) + (1−t)φ(σ₀)] at each t.
    pub slacks: Vec<f64>,
    pub min_slack: f64,
}

pub fn concavity_check(
    f: &Family,
    p: f64,
    sigma0: &[f64],
    sigma1: &[f64],
    t_grid: &[f64],
    opts: &SolverOptions,
) -> Result<ConcavityReport> {
    check_p(p)?;
    let phi0 = solve(f, p, sigma0, opts)?.value;
    let phi1 = solve(f, p, sigma1, opts)?.value;
    let slacks: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            let s: Vec<f64> = sigma0.iter().zip(sigma1).map(|(a, b)| t * b + (1.0 - t) * a).collect();
            Ok(solve(f, p, &s, opts)?.value - (t * phi1 + (1.0 - t) * phi0))
        })
        .collect::<Result<_>>()?;
    let min_slack = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(ConcavityReport { p, t: t_grid.to_vec(), slacks, min_slack })
}

/// t ∈ {0.1, …, 0.9}.
pub fn default_t_grid() -> Vec<f64> {
    (1..10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    /// |φ(σ₁) − φ(σ₂)|.
    pub lhs: f64,
    /// N_min^{−p} ‖σ₁ − σ₂‖₁.
    pub rhs: f64,
    pub holds: bool,
}

pub fn lipschitz_check(f: &Family, p: f64, sigma1: &[f64], sigma2: &[f64], opts: &SolverOptions) -> Result<LipschitzReport> {
    check_p(p)?;
    let a = solve(f, p, sigma1, opts)?;
    let b = solve(f, p, sigma2, opts)?;
    let lhs = (a.value - b.value).abs();
    let l1: f64 = sigma1.iter().zip(sigma2).map(|(x, y)| (x - y).abs()).sum();
    let rhs = f.n_min().powf(-p) * l1;
    // Both values carry a relative error of at most ε_rel.
    let noise = opts.eps_rel * (a.upper + b.upper);
    Ok(LipschitzReport { lhs, rhs, holds: lhs <= rhs + noise })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub h: Vec<f64>,
    /// ‖ρ*_{σ+h1_e} − ρ*_σ‖_p.
    pub deviations: Vec<f64>,
    pub decreasing: bool,
}

pub fn rho_continuity(f: &Family, p: f64, sigma: &[f64], edge: usize, hs: &[f64], opts: &SolverOptions) -> Result<ContinuityReport> {
    check_p(p)?;
    let base = solve(f, p, sigma, opts)?;
    let deviations: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let mut s = sigma.to_vec();
            s[edge] += h;
            let sol = solve(f, p, &s, opts)?;
            Ok(sol
                .rho
                .values()
                .iter()
                .zip(base.rho.values())
                .map(|(a, b)| (a - b).abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p))
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..hs.len()).collect();
    order.sort_by(|&a, &b| hs[b].total_cmp(&hs[a]));
    let decreasing = order.windows(2).all(|w| deviations[w[1]] <= deviations[w[0]] + 1e-9);
    Ok(ContinuityReport { h: hs.to_vec(), deviations, decreasing })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fixtures;
    use crate::graph::Graph;

    fn p3() -> Family {
        let g = Arc::new(fixtures::path(&["a", "b", "c"]));
        Family::connect(g, 0, 2).unwrap()
    }

    #[test]
    fn p3_gradient_quarter() {
        let r = gradient_check(&p3(), 2.0, &[1.0, 1.0], 1e-4, &sensitivity_options()).unwrap();
        assert!(r.passed);
        for e in &r.entries {
            assert!((e.analytic - 0.25).abs() < 1e-5);
            assert!((e.finite_difference - 0.25).abs() < 1e-4);
        }
    }

    #[test]
    fn single_edge_gradient_one() {
        let g = Arc::new(Graph::from_indexed_edges(2, false, &[(0, 1, 1.0)]).unwrap());
        let f = Family::connect(g, 0, 1).unwrap();
        let r = gradient_check(&f, 3.0, &[1.0], 1e-4, &sensitivity_options()).unwrap();
        assert!(r.passed && (r.entries[0].finite_difference - 1.0).abs() < 1e-6);
    }

    #[test]
    fn p3_sweep() {
        let r = monotonicity_sweep(&p3(), 2.0, &[1.0, 1.0], 0, &[0.5, 1.0, 2.0, 4.0], &sensitivity_options()).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        for row in &r.rows {
            let s = row.sigma_e;
            assert!((row.modulus - s / (s + 1.0)).abs() < 1e-8);
            assert!((row.rho_e - 1.0 / (s + 1.0)).abs() < 1e-5);
            assert!((row.eta_e - 1.0).abs() < 1e-5);
        }
        assert!(r.to_csv().starts_with("sigma_e,modulus,rho_e,eta_e\n"));
    }

    #[test]
    fn current_split_sweep() {
        let g = Arc::new(fixtures::parallel_paths(2, 1));
        let f = Family::connect(g, 0, 1).unwrap();
        let r = monotonicity_sweep(&f, 2.0, &[1.0, 1.0], 0, &[0.5, 1.0, 2.0], &sensitivity_options()).unwrap();
        assert!(r.violations.is_empty());
        for row in &r.rows {
            assert!((row.eta_e - row.sigma_e / (row.sigma_e + 1.0)).abs() < 1e-5);
        }
    }

    #[test]
    fn p3_concave() {
        let r = concavity_check(&p3(), 2.0, &[1.0, 1.0], &[4.0, 1.0], &default_t_grid(), &sensitivity_options()).unwrap();
        assert!(r.min_slack >= -1e-9);
        let r = concavity_check(&p3(), 2.0, &[1.0, 1.0], &[1.0, 1.0], &default_t_grid(), &sensitivity_options()).unwrap();
        assert!(r.min_slack.abs() < 1e-9);
    }

    #[test]
    fn lipschitz_and_continuity() {
        let opts = sensitivity_options();
        assert!(lipschitz_check(&p3(), 2.0, &[1.0, 1.0], &[2.0, 0.5], &opts).unwrap().holds);
        let r = rho_continuity(&p3(), 2.0, &[1.0, 1.0], 0, &[1e-1, 1e-2, 1e-3], &opts).unwrap();
        assert!(r.decreasing, "{:?}", r.deviations);
    }
}
