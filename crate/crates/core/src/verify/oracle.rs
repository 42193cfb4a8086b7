//! Primal brute-force ρ* for small explicit families: log-barrier Newton on
//! min Σσρ^p subject to Nρ ≥ 1, ρ ≥ 0, with every row present. Shares no
//! code with the constraint-generation solver.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::family::UsageRow;

pub struct BarrierSolution {
    pub rho: Vec<f64>,
    pub energy: f64,
    /// Duality-gap bound (rows + m)/t of the last centering step.
    pub gap_bound: f64,
    /// Whether the KKT refinement succeeded, making `rho` exact to rounding.
    pub refined: bool,
}

pub fn barrier_modulus(rows: &[UsageRow], sigma: &[f64], p: f64) -> Result<BarrierSolution> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("barrier oracle needs 1 < p < ∞, got {p}")));
    }
    let m = sigma.len();
    let n = DMatrix::from_fn(rows.len(), m, |i, e| rows[i].get(e));
    let min_sum = rows.iter().map(|r| r.entries().iter().map(|(_, u)| u).sum::<f64>()).fold(f64::INFINITY, f64::min);
    let mut rho = DVector::from_element(m, 2.0 / min_sum);
    let constraints = (rows.len() + m) as f64;

    let objective = |rho: &DVector<f64>, t: f64| -> f64 {
        let slack = &n * rho;
        if rho.iter().any(|&r| r <= 0.0) || slack.iter().any(|&s| s <= 1.0) {
            return f64::INFINITY;
        }
        let energy: f64 = rho.iter().zip(sigma).map(|(r, s)| s * r.powf(p)).sum();
        t * energy - slack.iter().map(|s| (s - 1.0).ln()).sum::<f64>() - rho.iter().map(|r| r.ln()).sum::<f64>()
    };

    let mut t = 1.0;
    loop {
        for _ in 0..200 {
            let slack = (&n * &rho).add_scalar(-1.0);
            let inv_s = slack.map(|s| 1.0 / s);
            let mut grad = n.transpose() * &inv_s;
            grad.neg_mut();
            let mut h = n.transpose() * DMatrix::from_diagonal(&inv_s.component_mul(&inv_s)) * &n;
            for e in 0..m {
                let r = rho[e];
                grad[e] += t * p * sigma[e] * r.powf(p - 1.0) - 1.0 / r;
                h[(e, e)] += t * p * (p - 1.0) * sigma[e] * r.powf(p - 2.0) + 1.0 / (r * r);
            }
            let step = h
                .cholesky()
                .ok_or_else(|| Error::Numerical("barrier Hessian is not positive definite".into()))?
                .solve(&(-&grad));
            let decrement = -grad.dot(&step);
            if decrement / 2.0 < 1e-14 {
                break;
            }
            let f0 = objective(&rho, t);
            let mut a = 1.0;
            loop {
                let trial = &rho + &step * a;
                if objective(&trial, t) <= f0 - 0.25 * a * decrement {
                    rho = trial;
                    break;
                }
                a *= 0.5;
                if a < 1e-20 {
                    break;
                }
            }
            if a < 1e-20 {
                break;
            }
        }
        if constraints / t < 1e-13 {
            break;
        }
        t *= 8.0;
    }
    let gap_bound = constraints / t;
    let barrier = rho.as_slice().to_vec();
    let (rho, refined) = match refine(rows, sigma, p, &barrier) {
        Some(r) => (r, true),
        None => (barrier, false),
    };
    let energy = rho.iter().zip(sigma).map(|(r, s)| s * r.powf(p)).sum();
    Ok(BarrierSolution { rho, energy, gap_bound, refined })
}

/// Guesses the support and active rows from the barrier point, solves the
/// KKT equations pσρ^{p−1} = N_Aᵀλ, N_A ρ = 1 on that support by Newton,
/// and accepts the result only if it is feasible, λ ≥ 0, and no active row
/// with λ > 0 touches an edge outside the support (stationarity at ρ(e) = 0).
fn refine(rows: &[UsageRow], sigma: &[f64], p: f64, rho: &[f64]) -> Option<Vec<f64>> {
    let top = rho.iter().cloned().fold(0.0, f64::max);
    let support: Vec<usize> = (0..rho.len()).filter(|&e| rho[e] > 1e-3 * top).collect();
    // A row touching an edge off the support must carry λ = 0.
    let active: Vec<&UsageRow> = rows
        .iter()
        .filter(|r| r.cost(rho) - 1.0 <= 1e-5 && r.entries().iter().all(|(e, _)| support.contains(e)))
        .collect();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for r in &active {
        let v = DVector::from_iterator(support.len(), support.iter().map(|&e| r.get(e)));
        let mut w = v.clone();
        for b in &basis {
            w -= b * b.dot(&v);
        }
        if w.norm() > 1e-9 * v.norm().max(1.0) {
            basis.push(w.normalize());
            chosen.push(*r);
        }
    }
    let (k, a) = (support.len(), chosen.len());
    if a == 0 {
        return None;
    }
    let na = DMatrix::from_fn(a, k, |i, j| chosen[i].get(support[j]));
    let mut x = DVector::from_iterator(k, support.iter().map(|&e| rho[e]));
    let grad = |x: &DVector<f64>| DVector::from_iterator(k, (0..k).map(|j| p * sigma[support[j]] * x[j].powf(p - 1.0)));
    let mut lambda = na.transpose().svd(true, true).solve(&grad(&x), 1e-14).ok()?;
    for _ in 0..100 {
        let r1 = grad(&x) - na.transpose() * &lambda;
        let r2 = (&na * &x).add_scalar(-1.0);
        if r1.amax().max(r2.amax()) < 1e-15 {
            break;
        }
        let mut kkt = DMatrix::zeros(k + a, k + a);
        for j in 0..k {
            kkt[(j, j)] = p * (p - 1.0) * sigma[support[j]] * x[j].powf(p - 2.0);
        }
        kkt.view_mut((0, k), (k, a)).copy_from(&(-na.transpose()));
        kkt.view_mut((k, 0), (a, k)).copy_from(&na);
        let mut rhs = DVector::zeros(k + a);
        rhs.rows_mut(0, k).copy_from(&(-r1));
        rhs.rows_mut(k, a).copy_from(&(-r2));
        let step = kkt.lu().solve(&rhs)?;
        x += step.rows(0, k);
        lambda += step.rows(k, a);
        if x.iter().any(|&v| v <= 0.0) {
            return None;
        }
    }
    if lambda.iter().any(|&l| l < -1e-12) {
        return None;
    }
    let scale = lambda.amax().max(1.0);
    for e in (0..rho.len()).filter(|e| !support.contains(e)) {
        let pull: f64 = chosen.iter().zip(lambda.iter()).map(|(r, l)| r.get(e) * l).sum();
        if pull > 1e-12 * scale {
            return None;
        }
    }
    let mut out = vec![0.0; rho.len()];
    for (j, &e) in support.iter().enumerate() {
        out[e] = x[j];
    }
    rows.iter().all(|r| r.cost(&out) >= 1.0 - 1e-12).then_some(out)
}
