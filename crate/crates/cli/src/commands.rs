//! Subcommand bodies. Each one fills in its defaults on the config (so the
//! echoed config is complete), runs, and returns a JSON result, a CSV
//! rendering, a short human summary and an exit code.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use pmodulus::duality::{blocker_family, blocker_vertices, verify_duality_product, verify_p1_pinf_duality};
use pmodulus::metrics::{delta_p_matrix, mod_inverse_metric, ultrametric_check, MetricReport};
use pmodulus::sensitivity::{gradient_check, monotonicity_sweep, sensitivity_options};
use pmodulus::stochastic::{expmin_check, verify_jensen_and_bounds, verify_lovasz_bound, MonteCarloReport, WeightSampler};
use pmodulus::verify::run_all;
use pmodulus::{Error, Family, Graph, ModulusProblem, Result, SolverOptions};
use serde_json::{json, Value};

use crate::config::{Exponent, RunConfig};
use crate::exit;

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_RATE: f64 = 1.0;
pub const DEFAULT_H_REL: f64 = 1e-4;
const SWEEP_FACTORS: [f64; 5] = [0.5, 0.75, 1.0, 1.5, 2.0];

pub struct Outcome {
    pub result: Value,
    pub csv: String,
    pub summary: String,
    pub code: i32,
    /// Time spent reading the graph and family.
    pub load_ms: f64,
}

impl Outcome {
    fn new(result: Value, csv: String, summary: String, code: i32) -> Self {
        Self { result, csv, summary, code, load_ms: 0.0 }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn p_json(p: f64) -> Value {
    if p.is_infinite() {
        json!("inf")
    } else {
        json!(p)
    }
}

/// Graph and family, with the load time.
fn load(cfg: &RunConfig) -> Result<(Arc<Graph>, Family, f64)> {
    let t = Instant::now();
    let g = cfg.load_graph()?;
    let f = cfg.load_family(&g)?;
    Ok((g, f, ms(t)))
}

pub fn run(cfg: &mut RunConfig) -> Result<Outcome> {
    match cfg.subcommand.as_deref() {
        Some("solve") => solve(cfg),
        Some("duality") => duality(cfg),
        Some("blocker") => blocker(cfg),
        Some("metric") => metric(cfg),
        Some("sensitivity") => sensitivity(cfg),
        Some("random") => random(cfg),
        Some("verify") => verify(cfg),
        Some(other) => Err(Error::InvalidInput(format!("unknown subcommand `{other}`"))),
        None => Err(Error::InvalidInput("no subcommand".into())),
    }
}

fn solve(cfg: &mut RunConfig) -> Result<Outcome> {
    let p = cfg.require_p()?;
    let opts = cfg.solver_or(SolverOptions::default());
    cfg.solver = Some(opts.clone());
    let (g, f, load_ms) = load(cfg)?;
    let sol = ModulusProblem::new(f.clone(), p)?.with_options(opts).solve()?;

    let mut result = sol.to_json(&f);
    result["family"] = json!(f.describe());
    result["relative_gap"] = json!(sol.relative_gap());
    let mut csv = String::from("edge,sigma,rho,eta\n");
    for e in 0..g.m() {
        let eta = sol.eta.as_ref().map_or(String::new(), |d| d.values()[e].to_string());
        let _ = writeln!(csv, "{},{},{},{}", g.edge_key(e), g.edge(e).weight, sol.rho.values()[e], eta);
    }
    let summary = format!(
        "Mod_{}({}) = {:.12} in [{:.12}, {:.12}], {} after {} iterations",
        Exponent(p),
        f,
        sol.value,
        sol.lower,
        sol.upper,
        if sol.converged { "converged" } else { "NOT converged" },
        sol.iterations
    );
    let code = if sol.converged { exit::OK } else { exit::NOT_CONVERGED };
    Ok(Outcome { load_ms, ..Outcome::new(result, csv, summary, code) })
}

fn duality(cfg: &mut RunConfig) -> Result<Outcome> {
    let p = cfg.require_p()?;
    let opts = cfg.solver_or(SolverOptions::default());
    cfg.solver = Some(opts.clone());
    let (g, f, load_ms) = load(cfg)?;
    if p > 1.0 && p.is_finite() {
        let r = verify_duality_product(&ModulusProblem::new(f.clone(), p)?.with_options(opts))?;
        let csv = format!(
            "p,q,modulus,blocker_modulus,product,residual,eta_residual\n{},{},{},{},{},{},{}\n",
            r.p, r.q, r.modulus, r.blocker_modulus, r.product, r.residual, r.eta_residual
        );
        let summary = format!(
            "Mod_p^(1/p) Mod_q(blocker)^(1/q) = {:.12} (residual {:.2e}), η residual {:.2e}",
            r.product, r.residual, r.eta_residual
        );
        let code = if r.converged { exit::OK } else { exit::NOT_CONVERGED };
        return Ok(Outcome { load_ms, ..Outcome::new(serde_json::to_value(&r)?, csv, summary, code) });
    }
    // At p = ∞ the pairing is read from the other side: Mod_{∞,σ}(Γ) pairs
    // with Mod_{1,σ⁻¹}(Γ̂).
    let (r, pairing) = if p == 1.0 {
        (verify_p1_pinf_duality(&f, &g.weights())?, "Mod_{1,σ}(Γ) · Mod_{∞,1/σ}(blocker)")
    } else {
        let inv: Vec<f64> = g.weights().iter().map(|s| 1.0 / s).collect();
        (verify_p1_pinf_duality(&blocker_family(&f)?, &inv)?, "Mod_{1,1/σ}(blocker) · Mod_{∞,σ}(Γ)")
    };
    let mut result = serde_json::to_value(&r)?;
    result["p"] = p_json(p);
    result["pairing"] = json!(pairing);
    let csv = format!("mod1,mod_inf,product,residual\n{},{},{},{}\n", r.mod1, r.mod_inf_blocker, r.product, r.residual);
    let summary = format!("{pairing} = {:.12} (residual {:.2e})", r.product, r.residual);
    Ok(Outcome { load_ms, ..Outcome::new(result, csv, summary, exit::OK) })
}

fn blocker(cfg: &mut RunConfig) -> Result<Outcome> {
    let (g, f, load_ms) = load(cfg)?;
    let verts = blocker_vertices(&f)?;
    let keys: Vec<String> = (0..g.m()).map(|e| g.edge_key(e)).collect();
    let list: Vec<Value> = verts
        .iter()
        .map(|v| {
            let coords: serde_json::Map<String, Value> =
                keys.iter().zip(&v.coords).filter(|(_, x)| **x != 0.0).map(|(k, x)| (k.clone(), json!(x))).collect();
            json!({"coords": coords, "provenance": v.provenance})
        })
        .collect();
    let result = json!({"family": f.describe(), "edges": keys, "count": verts.len(), "vertices": list});
    let mut csv = String::new();
    let header: Vec<String> = keys.iter().map(|k| csv_field(k)).collect();
    let _ = writeln!(csv, "{},provenance", header.join(","));
    for v in &verts {
        let coords: Vec<String> = v.coords.iter().map(f64::to_string).collect();
        let prov = serde_json::to_value(v.provenance)?;
        let _ = writeln!(csv, "{},{}", coords.join(","), prov.as_str().unwrap_or_default());
    }
    let summary = format!("blocker of {f}: {} vertices", verts.len());
    Ok(Outcome { load_ms, ..Outcome::new(result, csv, summary, exit::OK) })
}

fn metric(cfg: &mut RunConfig) -> Result<Outcome> {
    let kind = cfg.kind.get_or_insert_with(|| "delta-p".into()).clone();
    let t = Instant::now();
    let g = cfg.load_graph()?;
    let load_ms = ms(t);
    let report: MetricReport = match kind.as_str() {
        "min-cut" => ultrametric_check(&g)?,
        k => {
            let p = cfg.require_p()?;
            let opts = cfg.solver_or(SolverOptions::default());
            cfg.solver = Some(opts.clone());
            if k == "delta-p" {
                delta_p_matrix(&g, p, &opts)?
            } else {
                mod_inverse_metric(&g, p, &opts)?
            }
        }
    };
    let tol = cfg.solver.as_ref().map_or(1e-9, |s| 10.0 * s.eps_rel);
    let is_metric = report.is_metric(tol);
    let mut summary = format!(
        "{kind} on {} vertices: metric {} (triangle slack {:.3e}, symmetry error {:.2e})",
        g.n(),
        if is_metric { "yes" } else { "no" },
        report.triangle_slack,
        report.symmetry_error
    );
    for c in &report.comparisons {
        let _ = write!(summary, "\n  vs {}: max relative deviation {:.3e}", c.against, c.max_relative_deviation);
    }
    let mut result = serde_json::to_value(&report)?;
    result["is_metric"] = json!(is_metric);
    result["tolerance"] = json!(tol);
    let code = if report.converged { exit::OK } else { exit::NOT_CONVERGED };
    Ok(Outcome { load_ms, ..Outcome::new(result, report.to_csv(), summary, code) })
}

fn sensitivity(cfg: &mut RunConfig) -> Result<Outcome> {
    let p = cfg.require_p()?;
    let opts = cfg.solver_or(sensitivity_options());
    cfg.solver = Some(opts.clone());
    let h_rel = *cfg.h_rel.get_or_insert(DEFAULT_H_REL);
    let (g, f, load_ms) = load(cfg)?;
    let edge = g.resolve_edge(cfg.edge.get_or_insert_with(|| g.edge_key(0)))?;
    let sigma = g.weights();
    let grid = cfg.grid.get_or_insert_with(|| SWEEP_FACTORS.iter().map(|k| k * sigma[edge]).collect()).clone();

    let gradient = gradient_check(&f, p, &sigma, h_rel, &opts)?;
    let sweep = monotonicity_sweep(&f, p, &sigma, edge, &grid, &opts)?;
    let passed = gradient.passed && sweep.violations.is_empty();
    let result = json!({"family": f.describe(), "gradient": gradient, "sweep": sweep, "passed": passed});
    let mut summary = format!(
        "gradient ∂Mod/∂σ = ρ*^p: max relative deviation {:.3e} over {} edges ({})",
        gradient.max_relative_deviation,
        gradient.entries.len(),
        if gradient.passed { "ok" } else { "FAILED" }
    );
    let _ = write!(
        summary,
        "\nsweep of σ({}) over {} points: {} monotonicity violations",
        sweep.key,
        sweep.rows.len(),
        sweep.violations.len()
    );
    let code = if passed { exit::OK } else { exit::CHECK_FAILED };
    Ok(Outcome { load_ms, ..Outcome::new(result, sweep.to_csv(), summary, code) })
}

fn sampler_rates(cfg: &RunConfig, g: &Graph) -> Result<Vec<f64>> {
    let mut rates = vec![cfg.rate.unwrap_or(DEFAULT_RATE); g.m()];
    for (key, &theta) in cfg.rates.iter().flatten() {
        rates[g.resolve_edge(key)?] = theta;
    }
    Ok(rates)
}

fn random(cfg: &mut RunConfig) -> Result<Outcome> {
    let p = cfg.require_p()?;
    if p > 2.0 {
        return Err(Error::InvalidInput(format!("random-weight bounds hold for 1 ≤ p ≤ 2, got {p}")));
    }
    let opts = cfg.solver_or(SolverOptions::default());
    cfg.solver = Some(opts.clone());
    let trials = *cfg.trials.get_or_insert(DEFAULT_TRIALS);
    cfg.rate.get_or_insert(DEFAULT_RATE);
    let (g, f, load_ms) = load(cfg)?;
    let sampler = WeightSampler::new(sampler_rates(cfg, &g)?, cfg.seed)?;

    let mut reports: Vec<MonteCarloReport> = Vec::new();
    if p == 1.0 {
        reports.push(verify_lovasz_bound(&f, &sampler, trials, &opts)?);
    }
    reports.push(verify_jensen_and_bounds(&f, &sampler, p, trials, &opts)?);
    let expmin = expmin_check(&sampler, trials);

    let mut csv = String::from("trial,modulus\n");
    for (t, v) in reports[0].values.iter().enumerate() {
        let _ = writeln!(csv, "{t},{v}");
    }
    let mut summary = format!("{trials} trials of {f} at p = {p}, seed {}", cfg.seed);
    for r in &reports {
        let _ = write!(
            summary,
            "\n  {:?}: mean {:.6} ± {:.2e}, lower {:.6} (z {:.2}){} {}",
            r.kind,
            r.mean,
            r.std_err,
            r.lower_bound,
            r.z_lower,
            r.upper_bound.map_or(String::new(), |u| format!(", upper {u:.6} (z {:.2})", r.z_upper.unwrap_or(0.0))),
            if r.passed { "ok" } else { "FAILED" }
        );
    }
    let _ = write!(summary, "\n  E[min σ]: {:.6} vs exact {:.6} (z {:.2})", expmin.mean, expmin.exact, expmin.z_exact);
    let passed = reports.iter().all(|r| r.passed) && expmin.passed;
    for r in &mut reports {
        r.values.clear();
    }
    let result = json!({
        "family": f.describe(),
        "rates": g.edges().iter().enumerate().map(|(e, _)| (g.edge_key(e), sampler.rates()[e])).collect::<BTreeMap<_, _>>(),
        "bounds": reports,
        "expmin": expmin,
        "passed": passed,
    });
    let code = if passed { exit::OK } else { exit::STOCHASTIC_FAILED };
    Ok(Outcome { load_ms, ..Outcome::new(result, csv, summary, code) })
}

fn verify(cfg: &mut RunConfig) -> Result<Outcome> {
    let results = run_all(cfg.seed);
    let summary = results.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
    let mut csv = String::from("id,name,passed,elapsed_ms,detail\n");
    for r in &results {
        let _ = writeln!(csv, "{},{},{},{:.1},{}", r.id, csv_field(r.name), r.passed, r.elapsed_ms, csv_field(&r.detail));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let result = json!({"criteria": results, "passed": passed, "total": results.len()});
    let code = if passed == results.len() { exit::OK } else { exit::CHECK_FAILED };
    Ok(Outcome::new(result, csv, summary, code))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
