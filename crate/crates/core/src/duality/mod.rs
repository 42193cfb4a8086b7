//! Fulkerson blocking duality: the blocker Γ̂, η*, the duality product
//! Mod_{p,σ}(Γ)^{1/p} Mod_{q,σ̂}(Γ̂)^{1/q} = 1 and its p = 1 / p = ∞ limit, and
//! the expected-usage identity η* = E_{μ*}[N].

mod partition;
mod vertices;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Family, FamilyKind, UsageRow};
use crate::graph::{Density, DensityRole};
use crate::solver::{solve_modulus_p1, solve_modulus_pinf, ModulusProblem, ModulusSolution};

pub use partition::{enumerate_feasible_partitions, FeasiblePartition, PARTITION_VERTEX_LIMIT};
pub use vertices::{enumerate_blocker_vertices, rank, BlockerVertex, Provenance, MAX_EDGES, MAX_ROWS};

/// Largest analytic blocker family enumerated when building explicit rows.
pub const BLOCKER_ENUMERATION_LIMIT: usize = 4096;

/// η*(e) = σ(e) ρ*(e)^{p−1} / Mod_{p,σ}(Γ).
pub fn blocker_density(sol: &ModulusSolution, prob: &ModulusProblem) -> Result<Density> {
    if !sol.converged {
        return Err(Error::NotConverged("η* needs a converged solution".into()));
    }
    let p = prob.p();
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput("η* is defined for 1 < p < ∞".into()));
    }
    let eta = sol
        .rho
        .values()
        .iter()
        .zip(prob.sigma())
        .map(|(r, s)| s * r.powf(p - 1.0) / sol.value)
        .collect();
    Density::new(eta, DensityRole::Blocker)
}

/// Vertices of Adm(Γ): minimal cuts for connecting families, paths for cut
/// families, scaled partition indicators for spanning trees, and double
/// description enumeration for explicit rows.
pub fn blocker_vertices(f: &Family) -> Result<Vec<BlockerVertex>> {
    let m = f.graph().m();
    let from_rows = |rows: Vec<UsageRow>, provenance| {
        rows.into_iter().map(|r| BlockerVertex { coords: r.to_dense(m), provenance }).collect()
    };
    Ok(match f.kind() {
        FamilyKind::Connect { a, b } => {
            let cuts = Family::cut(f.graph_arc().clone(), *a, *b)?;
            from_rows(cuts.enumerate(BLOCKER_ENUMERATION_LIMIT)?, Provenance::AnalyticCut)
        }
        FamilyKind::Cut { a, b } => {
            let paths = Family::connect(f.graph_arc().clone(), *a, *b)?;
            from_rows(paths.enumerate(BLOCKER_ENUMERATION_LIMIT)?, Provenance::AnalyticPath)
        }
        FamilyKind::SpanningTree => enumerate_feasible_partitions(f.graph())?
            .iter()
            .map(|fp| BlockerVertex { coords: fp.blocker_vector(m), provenance: Provenance::FeasiblePartition })
            .collect(),
        FamilyKind::Explicit(rows) => enumerate_blocker_vertices(rows, m)?,
    })
}

/// The blocker Γ̂ as a family. Connecting paths and cuts block each other
/// and keep their oracles; the other kinds become explicit families.
pub fn blocker_family(f: &Family) -> Result<Family> {
    let g = f.graph_arc().clone();
    match f.kind() {
        FamilyKind::Connect { a, b } => Family::cut(g, *a, *b),
        FamilyKind::Cut { a, b } => Family::connect(g, *a, *b),
        _ => {
            let rows = blocker_vertices(f)?
                .iter()
                .enumerate()
                .map(|(i, v)| Ok(v.to_row()?.with_label(format!("blocker{i}"))))
                .collect::<Result<Vec<_>>>()?;
            Family::explicit(g, rows)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub p: f64,
    pub q: f64,
    pub modulus: f64,
    pub blocker_modulus: f64,
    /// Mod_{p,σ}(Γ)^{1/p} · Mod_{q,σ̂}(Γ̂)^{1/q}.
    pub product: f64,
    pub residual: f64,
    /// ‖η* − η_blocker‖_∞, η* from ρ* and η_blocker the optimal density of the
    /// blocker problem.
    pub eta_residual: f64,
    pub converged: bool,
}

/// Solves Mod_{p,σ}(Γ) and Mod_{q,σ̂}(Γ̂) independently and compares.
pub fn verify_duality_product(prob: &ModulusProblem) -> Result<DualityReport> {
    let p = prob.p();
    let q = prob.q();
    let primal = prob.solve()?;
    let blocker = blocker_family(prob.family())?;
    let dual_prob = ModulusProblem::new(blocker, q)?
        .with_sigma(prob.dual_weights())?
        .with_options(prob.options().clone());
    let dual = dual_prob.solve()?;
    let product = primal.value.powf(1.0 / p) * dual.value.powf(1.0 / q);
    let eta = blocker_density(&primal, prob)?;
    let eta_residual = eta
        .values()
        .iter()
        .zip(dual.rho.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(DualityReport {
        p,
        q,
        modulus: primal.value,
        blocker_modulus: dual.value,
        product,
        residual: (product - 1.0).abs(),
        eta_residual,
        converged: primal.converged && dual.converged,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EndpointDualityReport {
    pub mod1: f64,
    pub mod_inf_blocker: f64,
    pub product: f64,
    pub residual: f64,
    /// How the blocker side was evaluated.
    pub blocker_route: &'static str,
}

/// Mod_{1,σ}(Γ) · Mod_{∞,σ⁻¹}(Γ̂) = 1. The blocker side is evaluated over an
/// explicitly enumerated Γ̂ when it is small enough, so the two sides are
/// computed by different algorithms.
pub fn verify_p1_pinf_duality(f: &Family, sigma: &[f64]) -> Result<EndpointDualityReport> {
    let primal = ModulusProblem::new(f.clone(), 1.0)?.with_sigma(sigma.to_vec())?;
    let mod1 = solve_modulus_p1(&primal)?.value;
    let inv: Vec<f64> = sigma.iter().map(|s| 1.0 / s).collect();
    let (blocker, route) = match blocker_vertices(f) {
        Ok(verts) => {
            let rows = verts.iter().map(BlockerVertex::to_row).collect::<Result<Vec<_>>>()?;
            (Family::explicit(f.graph_arc().clone(), rows)?, "enumerated")
        }
        Err(Error::GuardExceeded(_)) => (blocker_family(f)?, "oracle"),
        Err(e) => return Err(e),
    };
    let dual = ModulusProblem::new(blocker, f64::INFINITY)?.with_sigma(inv)?;
    let mod_inf = solve_modulus_pinf(&dual)?.value;
    let product = mod1 * mod_inf;
    Ok(EndpointDualityReport { mod1, mod_inf_blocker: mod_inf, product, residual: (product - 1.0).abs(), blocker_route: route })
}

/// E_{μ*}[N(γ,·)] = Σ_γ μ*(γ) N(γ,·).
pub fn expected_usage(sol: &ModulusSolution, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (row, &mu) in sol.rows.iter().zip(&sol.pmf) {
        for &(e, u) in row.entries() {
            out[e] += mu * u;
        }
    }
    out
}

/// max_e |η*(e) − E_{μ*}[N(γ,e)]|.
pub fn verify_expected_usage(sol: &ModulusSolution) -> Result<f64> {
    let eta = sol.eta.as_ref().ok_or_else(|| Error::InvalidInput("solution has no η*".into()))?;
    if !sol.converged {
        return Err(Error::NotConverged("expected usage needs a converged solution".into()));
    }
    let usage = expected_usage(sol, eta.len());
    Ok(eta.values().iter().zip(&usage).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Relative residual of Σ_e σ̂(e) E_{μ*}[N(γ,e)]^q = Mod_{p,σ}(Γ)^{−q/p}.
pub fn verify_pmf_value_identity(sol: &ModulusSolution, prob: &ModulusProblem) -> Result<f64> {
    let (p, q) = (prob.p(), prob.q());
    let usage = expected_usage(sol, prob.sigma().len());
    let lhs: f64 = prob.dual_weights().iter().zip(&usage).map(|(s, u)| s * u.powf(q)).sum();
    let rhs = sol.value.powf(-q / p);
    Ok(((lhs - rhs) / rhs).abs())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fixtures;

    fn p3_connect() -> Family {
        let g = Arc::new(fixtures::path(&["a", "b", "c"]));
        Family::connect(g, 0, 2).unwrap()
    }

    fn parallel(k: usize, len: usize) -> Family {
        let g = Arc::new(fixtures::parallel_paths(k, len));
        let (s, t) = (g.vertex("s").unwrap(), g.vertex("t").unwrap());
        Family::connect(g, s, t).unwrap()
    }

    #[test]
    fn eta_on_p3_and_parallel() {
        let prob = ModulusProblem::new(p3_connect(), 2.0).unwrap();
        let sol = prob.solve().unwrap();
        let eta = blocker_density(&sol, &prob).unwrap();
        for v in eta.values() {
            assert!((v - 1.0).abs() < 1e-5);
        }
        let prob = ModulusProblem::new(parallel(3, 2), 2.0).unwrap();
        let sol = prob.solve().unwrap();
        for v in blocker_density(&sol, &prob).unwrap().values() {
            assert!((v - 1.0 / 3.0).abs() < 1e-5);
        }
    }

    #[test]
    fn duality_product_p3() {
        let prob = ModulusProblem::new(p3_connect(), 2.0).unwrap();
        let r = verify_duality_product(&prob).unwrap();
        assert!((r.modulus - 0.5).abs() < 1e-6 && (r.blocker_modulus - 2.0).abs() < 1e-5);
        assert!(r.residual < 1e-5 && r.eta_residual < 1e-4);
    }

    #[test]
    fn duality_product_parallel_p3() {
        let prob = ModulusProblem::new(parallel(3, 2), 3.0).unwrap();
        let r = verify_duality_product(&prob).unwrap();
        assert!((r.modulus - 0.75).abs() < 1e-6);
        assert!(r.residual <= 1e-5);
    }

    #[test]
    fn endpoint_duality() {
        let r = verify_p1_pinf_duality(&parallel(3, 2), &[1.0; 6]).unwrap();
        assert_eq!((r.mod1, r.mod_inf_blocker), (3.0, 1.0 / 3.0));
        assert!(r.residual < 1e-15);
        let single = parallel(1, 1);
        let r = verify_p1_pinf_duality(&single, &[2.5]).unwrap();
        assert!((r.mod1 - 2.5).abs() < 1e-15 && (r.mod_inf_blocker - 0.4).abs() < 1e-15);
        let g = Arc::new(fixtures::triangle());
        let r = verify_p1_pinf_duality(&Family::connect(g, 0, 1).unwrap(), &[1.0; 3]).unwrap();
        assert_eq!((r.mod1, r.mod_inf_blocker), (2.0, 0.5));
    }

    #[test]
    fn expected_usage_identities() {
        for f in [p3_connect(), parallel(3, 2)] {
            let prob = ModulusProblem::new(f, 2.0).unwrap();
            let sol = prob.solve().unwrap();
            assert!(verify_expected_usage(&sol).unwrap() <= 1e-5);
            assert!(verify_pmf_value_identity(&sol, &prob).unwrap() <= 1e-4);
        }
    }

    #[test]
    fn p3_connect_blocker_is_single_edge_cuts() {
        let g = Arc::new(fixtures::path(&["a", "b", "c"]));
        let f = Family::explicit(g, vec![UsageRow::indicator(&[0, 1], None)]).unwrap();
        let v: Vec<_> = blocker_vertices(&f).unwrap().into_iter().map(|v| v.coords).collect();
        assert_eq!(v, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }
}
