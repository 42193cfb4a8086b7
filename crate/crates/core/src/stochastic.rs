//! Monte Carlo checks of modulus bounds for random independent exponential
//! weights.
//!
//! Trial `i` draws from a ChaCha stream keyed by (seed, i), so reports are
//! reproducible and independent of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::graph::{Density, DensityRole};
use crate::solver::{solve_modulus_p1, ModulusProblem, SolverOptions};

/// Acceptance band in standard errors.
pub const Z_BAND: f64 = 3.0;

/// Independent σ(e) ~ Exp(θ(e)).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSampler {
    rates: Vec<f64>,
    seed: u64,
}

impl WeightSampler {
    pub fn new(rates: Vec<f64>, seed: u64) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidInput("sampler needs at least one rate".into()));
        }
        if let Some(r) = rates.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidInput(format!("exponential rates must be positive, got {r}")));
        }
        Ok(Self { rates, seed })
    }

    pub fn uniform(m: usize, rate: f64, seed: u64) -> Result<Self> {
        Self::new(vec![rate; m], seed)
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// E σ(e) = 1/θ(e).
    pub fn means(&self) -> Vec<f64> {
        self.rates.iter().map(|r| 1.0 / r).collect()
    }

    fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    /// Weights for trial `trial`.
    pub fn sample(&self, trial: u64) -> Vec<f64> {
        let mut rng = self.rng(trial);
        self.rates
            .iter()
            .map(|&r| loop {
                // σ = 0 has probability zero but is excluded so weights stay valid.
                let x: f64 = Exp::new(r).expect("positive rate").sample(&mut rng);
                if x > 0.0 {
                    break x;
                }
            })
            .collect()
    }
}

pub fn sample_weights(sampler: &WeightSampler, trial: u64) -> Density {
    Density::new(sampler.sample(trial), DensityRole::Primal).expect("exponential draws are positive")
}

/// Pairwise summation, independent of how the values were produced.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Sample mean and standard error (unbiased variance).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// E Mod₁ ≥ N_min · Mod_{2,Eσ}.
    Lovasz,
    /// (N_min^p / Eσ(E)) Mod_{p,Eσ}² ≤ E Mod_p ≤ Mod_{p,Eσ}.
    JensenAndLower,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub kind: BoundKind,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_err: f64,
    pub lower_bound: f64,
    pub upper_bound: Option<f64>,
    /// (mean − lower)/SE.
    pub z_lower: f64,
    /// (upper − mean)/SE.
    pub z_upper: Option<f64>,
    /// Mod_{p,Eσ} ≤ Eσ(E)/N_min^p on the expected graph.
    pub consistent: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

fn z(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff >= 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}

fn per_trial(f: &Family, sampler: &WeightSampler, p: f64, trials: usize, opts: &SolverOptions) -> Result<Vec<f64>> {
    if sampler.rates().len() != f.graph().m() {
        return Err(Error::InvalidInput("sampler rates must match the edge count".into()));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let prob = ModulusProblem::new(f.clone(), p)?.with_sigma(sampler.sample(t))?.with_options(opts.clone());
            if p == 1.0 {
                Ok(solve_modulus_p1(&prob)?.value)
            } else {
                let sol = prob.solve()?;
                if !sol.converged {
                    return Err(Error::NotConverged(format!("trial {t}")));
                }
                Ok(sol.value)
            }
        })
        .collect()
}

fn expected_modulus(f: &Family, sampler: &WeightSampler, p: f64, opts: &SolverOptions) -> Result<f64> {
    Ok(ModulusProblem::new(f.clone(), p)?.with_sigma(sampler.means())?.with_options(opts.clone()).solve()?.value)
}

/// E Mod_{1,σ}(Γ) ≥ N_min · Mod_{2,Eσ}(Γ), one-sided at 3 SE.
pub fn verify_lovasz_bound(f: &Family, sampler: &WeightSampler, trials: usize, opts: &SolverOptions) -> Result<MonteCarloReport> {
    let values = per_trial(f, sampler, 1.0, trials, opts)?;
    let (mean, se) = mean_and_se(&values);
    let mod2 = expected_modulus(f, sampler, 2.0, opts)?;
    let lower = f.n_min() * mod2;
    let total: f64 = sampler.means().iter().sum();
    let z_lower = z(mean - lower, se);
    Ok(MonteCarloReport {
        kind: BoundKind::Lovasz,
        p: 1.0,
        trials,
        seed: sampler.seed(),
        mean,
        std_err: se,
        lower_bound: lower,
        upper_bound: None,
        z_lower,
        z_upper: None,
        consistent: mod2 <= total / f.n_min().powi(2) * (1.0 + 1e-9),
        passed: z_lower >= -Z_BAND,
        values,
    })
}

/// Jensen upper bound E Mod_p ≤ Mod_{p,Eσ} and the lower bound
/// E Mod_p ≥ (N_min^p / Eσ(E)) Mod_{p,Eσ}², for 1 ≤ p ≤ 2.
pub fn verify_jensen_and_bounds(
    f: &Family,
    sampler: &WeightSampler,
    p: f64,
    trials: usize,
    opts: &SolverOptions,
) -> Result<MonteCarloReport> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidInput(format!("the bounds hold for 1 ≤ p ≤ 2, got {p}")));
    }
    let values = per_trial(f, sampler, p, trials, opts)?;
    let (mean, se) = mean_and_se(&values);
    let upper = expected_modulus(f, sampler, p, opts)?;
    let total: f64 = sampler.means().iter().sum();
    let np = f.n_min().powf(p);
    let lower = np / total * upper * upper;
    let (z_lower, z_upper) = (z(mean - lower, se), z(upper - mean, se));
    Ok(MonteCarloReport {
        kind: BoundKind::JensenAndLower,
        p,
        trials,
        seed: sampler.seed(),
        mean,
        std_err: se,
        lower_bound: lower,
        upper_bound: Some(upper),
        z_lower,
        z_upper: Some(z_upper),
        consistent: upper <= total / np * (1.0 + 1e-9),
        passed: z_lower >= -Z_BAND && z_upper >= -Z_BAND,
        values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpMinReport {
    pub trials: usize,
    pub mean: f64,
    pub std_err: f64,
    /// (Σ 1/Eσ(e))^{−1}.
    pub bound: f64,
    /// 1/Σθ, the exact mean of the minimum of independent exponentials.
    pub exact: f64,
    pub z_bound: f64,
    pub z_exact: f64,
    pub passed: bool,
}

/// E[min_e σ(e)] against (Σ 1/Eσ(e))^{−1}; for exponentials min σ ~ Exp(Σθ),
/// so both should agree with the empirical mean.
pub fn expmin_check(sampler: &WeightSampler, trials: usize) -> ExpMinReport {
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| sampler.sample(t).into_iter().fold(f64::INFINITY, f64::min))
        .collect();
    let (mean, se) = mean_and_se(&values);
    let bound = 1.0 / sampler.means().iter().map(|m| 1.0 / m).sum::<f64>();
    let exact = 1.0 / sampler.rates().iter().sum::<f64>();
    let (z_bound, z_exact) = (z(mean - bound, se), z(mean - exact, se));
    ExpMinReport { trials, mean, std_err: se, bound, exact, z_bound, z_exact, passed: z_bound >= -Z_BAND && z_exact.abs() <= Z_BAND }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fixtures;
    use crate::graph::Graph;

    #[test]
    fn seeded_replay() {
        let s = WeightSampler::uniform(4, 1.0, 42).unwrap();
        assert_eq!(s.sample(3), s.sample(3));
        assert_ne!(s.sample(3), s.sample(4));
        assert_ne!(s.sample(0), WeightSampler::uniform(4, 1.0, 43).unwrap().sample(0));
    }

    #[test]
    fn rate_two_mean() {
        let s = WeightSampler::uniform(1, 2.0, 1).unwrap();
        let v: Vec<f64> = (0..100_000).map(|t| s.sample(t)[0]).collect();
        let (mean, se) = mean_and_se(&v);
        assert!((mean - 0.5).abs() <= 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn survival_is_log_concave_on_grid() {
        // For Exp(θ), log S(t) = −θt is linear; the empirical version should
        // have nonpositive second differences up to sampling noise.
        let s = WeightSampler::uniform(1, 1.0, 9).unwrap();
        let n = 200_000;
        let v: Vec<f64> = (0..n).map(|t| s.sample(t)[0]).collect();
        let grid: Vec<f64> = (0..8).map(|i| 0.25 * i as f64).collect();
        let log_s: Vec<f64> = grid.iter().map(|&t| (v.iter().filter(|&&x| x >= t).count() as f64 / n as f64).ln()).collect();
        for w in log_s.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] <= 0.02);
        }
    }

    #[test]
    fn single_edge_lovasz_tight() {
        let g = Arc::new(Graph::from_indexed_edges(2, false, &[(0, 1, 1.0)]).unwrap());
        let f = Family::connect(g, 0, 1).unwrap();
        let s = WeightSampler::uniform(1, 1.0, 0).unwrap();
        let r = verify_lovasz_bound(&f, &s, 2000, &SolverOptions::default()).unwrap();
        assert!((r.lower_bound - 1.0).abs() < 1e-6);
        assert!(r.passed && r.consistent);
        let r = verify_jensen_and_bounds(&f, &s, 2.0, 2000, &SolverOptions::default()).unwrap();
        assert!((r.upper_bound.unwrap() - 1.0).abs() < 1e-6);
        assert!(r.passed);
    }

    #[test]
    fn parallel_bounds() {
        let g = Arc::new(fixtures::parallel_paths(3, 2));
        let (s, t) = (g.vertex("s").unwrap(), g.vertex("t").unwrap());
        let f = Family::connect(g, s, t).unwrap();
        let sampler = WeightSampler::uniform(6, 1.0, 7).unwrap();
        let r = verify_jensen_and_bounds(&f, &sampler, 2.0, 1000, &SolverOptions::default()).unwrap();
        assert!((r.upper_bound.unwrap() - 1.5).abs() < 1e-6);
        assert!((r.lower_bound - 0.375).abs() < 1e-6);
        assert!(r.passed);
        let r = verify_lovasz_bound(&f, &sampler, 1000, &SolverOptions::default()).unwrap();
        assert!((r.lower_bound - 1.5).abs() < 1e-6);
    }

    #[test]
    fn expmin() {
        let s = WeightSampler::new(vec![1.0, 2.0, 0.5, 3.0], 5).unwrap();
        let r = expmin_check(&s, 20_000);
        assert!(r.passed, "{r:?}");
        assert!((r.exact - 1.0 / 6.5).abs() < 1e-15);
        // For exponentials the bound is attained.
        assert!((r.bound - r.exact).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(WeightSampler::new(vec![0.0], 0).is_err());
        assert!(WeightSampler::new(vec![], 0).is_err());
    }
}
