//! Lagrangian dual of the modulus problem restricted to a finite subfamily:
//!
//! ```text
//! maximize  D(λ) = Σ_γ λ(γ) − (p−1) Σ_e σ(e) (x(e) / (p σ(e)))^q,   x = Nᵀλ,  λ ≥ 0.
//! ```
//!
//! The primal density is recovered as ρ(e) = (x(e)/(pσ(e)))^{1/(p−1)} and
//! ∂D/∂λ(γ) = 1 − ℓ_ρ(γ).

use nalgebra::{DMatrix, DVector};

use crate::family::UsageRow;

pub(crate) struct RestrictedDual<'a> {
    p: f64,
    q: f64,
    sigma: &'a [f64],
    pub(crate) rows: Vec<UsageRow>,
    pub(crate) lambda: Vec<f64>,
    x: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct InnerStats {
    pub sweeps: usize,
    pub gap: f64,
}

impl<'a> RestrictedDual<'a> {
    pub(crate) fn new(p: f64, sigma: &'a [f64]) -> Self {
        Self { p, q: p / (p - 1.0), sigma, rows: Vec::new(), lambda: Vec::new(), x: vec![0.0; sigma.len()] }
    }

    pub(crate) fn contains(&self, row: &UsageRow) -> bool {
        self.rows.iter().any(|r| r.same_usage(row))
    }

    pub(crate) fn push(&mut self, row: UsageRow) {
        self.rows.push(row);
        self.lambda.push(0.0);
    }

    #[inline]
    fn rho_of(&self, e: usize, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (x / (self.p * self.sigma[e])).powf(1.0 / (self.p - 1.0))
        }
    }

    pub(crate) fn rho(&self) -> Vec<f64> {
        self.x.iter().enumerate().map(|(e, &x)| self.rho_of(e, x)).collect()
    }

    fn dual_value_at(&self, lambda: &[f64], x: &[f64]) -> f64 {
        let s: f64 = lambda.iter().sum();
        let pen: f64 = x
            .iter()
            .zip(self.sigma)
            .filter(|(x, _)| **x > 0.0)
            .map(|(x, s)| s * (x / (self.p * s)).powf(self.q))
            .sum();
        s - (self.p - 1.0) * pen
    }

    pub(crate) fn value(&self) -> f64 {
        self.dual_value_at(&self.lambda, &self.x)
    }

    fn recompute_x(&mut self) {
        self.x = transpose_apply(&self.rows, &self.lambda, self.sigma.len());
    }

    /// Upper bound for the subfamily from ρ scaled to be admissible on it,
    /// together with D(λ); returns the relative gap.
    pub(crate) fn restricted_gap(&self) -> f64 {
        let rho = self.rho();
        let ell = self.rows.iter().map(|r| r.cost(&rho)).fold(f64::INFINITY, f64::min);
        if ell <= 0.0 {
            return f64::INFINITY;
        }
        let upper = crate::graph::energy(&rho, self.p, self.sigma) / ell.powf(self.p);
        (upper - self.value()) / upper
    }

    /// Exact maximization of D along λ(γ_i).
    fn coordinate_step(&mut self, i: usize) {
        let row = &self.rows[i];
        let old = self.lambda[i];
        let base: Vec<(usize, f64, f64)> =
            row.entries().iter().map(|&(e, u)| (e, u, (self.x[e] - u * old).max(0.0))).collect();

        // g(t) = 1 − Σ N ρ(base + N t), decreasing in t.
        let g = |t: f64| -> (f64, f64) {
            let mut val = 1.0;
            let mut deriv = 0.0;
            for &(e, u, b) in &base {
                let x = b + u * t;
                let r = self.rho_of(e, x);
                val -= u * r;
                if x > 0.0 {
                    deriv -= u * u * r / ((self.p - 1.0) * x);
                }
            }
            (val, deriv)
        };

        let t = if g(0.0).0 <= 0.0 {
            0.0
        } else {
            // At t_hi some single edge already reaches N ρ ≥ 1.
            let mut hi = base
                .iter()
                .map(|&(e, u, _)| self.p * self.sigma[e] * u.powf(-self.p))
                .fold(f64::INFINITY, f64::min);
            let mut lo = 0.0_f64;
            let mut t = if old > 0.0 && old < hi { old } else { hi * 0.5 };
            for _ in 0..300 {
                let (val, deriv) = g(t);
                if val > 0.0 {
                    lo = t;
                } else {
                    hi = t;
                }
                if val.abs() <= 1e-15 || (lo > 0.0 && hi - lo <= 1e-15 * hi) {
                    break;
                }
                // Newton in log t, falling back to bisection (geometric once
                // a positive lower bracket exists).
                let mut next = f64::NAN;
                if deriv < 0.0 && t > 0.0 {
                    let s = t.ln() - val / (t * deriv);
                    next = s.exp();
                }
                if !(next > lo && next < hi) {
                    next = if lo > 0.0 { (lo * hi).sqrt() } else { hi * 1e-3 };
                }
                t = next;
            }
            t
        };
        for &(e, u, b) in &base {
            self.x[e] = b + u * t;
        }
        self.lambda[i] = t;
    }

    /// Projected Newton step on the rows with λ > 0. Returns whether D
    /// increased.
    fn newton_polish(&mut self) -> bool {
        let free: Vec<usize> = (0..self.rows.len()).filter(|&i| self.lambda[i] > 0.0).collect();
        if free.is_empty() {
            return false;
        }
        let rho = self.rho();
        let d: Vec<f64> = self
            .x
            .iter()
            .zip(&rho)
            .map(|(&x, &r)| if x > 0.0 { r / ((self.p - 1.0) * x) } else { 0.0 })
            .collect();
        let k = free.len();
        let mut h = DMatrix::<f64>::zeros(k, k);
        let mut grad = DVector::<f64>::zeros(k);
        for (a, &i) in free.iter().enumerate() {
            grad[a] = 1.0 - self.rows[i].cost(&rho);
            for (b, &j) in free.iter().enumerate().skip(a) {
                let v = sparse_weighted_dot(&self.rows[i], &self.rows[j], &d);
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        let scale = (0..k).map(|a| h[(a, a)]).fold(0.0, f64::max);
        if !(scale > 0.0 && scale.is_finite()) {
            return false;
        }
        for a in 0..k {
            h[(a, a)] += 1e-12 * scale;
        }
        let Some(chol) = h.cholesky() else {
            return false;
        };
        let step = chol.solve(&grad);
        let d0 = self.value();
        let mut alpha = 1.0;
        let mut trial = self.lambda.clone();
        for _ in 0..40 {
            for (a, &i) in free.iter().enumerate() {
                trial[i] = (self.lambda[i] + alpha * step[a]).max(0.0);
            }
            let x = transpose_apply(&self.rows, &trial, self.sigma.len());
            if self.dual_value_at(&trial, &x) > d0 {
                self.lambda.copy_from_slice(&trial);
                self.x = x;
                return true;
            }
            alpha *= 0.5;
        }
        false
    }

    /// Alternates cyclic coordinate sweeps with Newton polishing until the
    /// restricted relative gap is at most `tol`.
    pub(crate) fn solve(&mut self, tol: f64, max_sweeps: usize) -> InnerStats {
        let mut gap = self.restricted_gap();
        let mut sweeps = 0;
        while sweeps < max_sweeps && !(gap <= tol) {
            sweeps += 1;
            for i in 0..self.rows.len() {
                self.coordinate_step(i);
            }
            if sweeps % 64 == 0 {
                self.recompute_x();
            }
            if sweeps % 2 == 0 {
                self.newton_polish();
            }
            gap = self.restricted_gap();
        }
        InnerStats { sweeps, gap }
    }
}

pub(crate) fn transpose_apply(rows: &[UsageRow], lambda: &[f64], m: usize) -> Vec<f64> {
    let mut x = vec![0.0; m];
    for (row, &l) in rows.iter().zip(lambda) {
        if l != 0.0 {
            for &(e, u) in row.entries() {
                x[e] += u * l;
            }
        }
    }
    x
}

fn sparse_weighted_dot(a: &UsageRow, b: &UsageRow, w: &[f64]) -> f64 {
    let (ea, eb) = (a.entries(), b.entries());
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < ea.len() && j < eb.len() {
        match ea[i].0.cmp(&eb[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += ea[i].1 * eb[j].1 * w[ea[i].0];
                i += 1;
                j += 1;
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row_closed_form() {
        // One path over two unit edges, p = 2: ρ = 1/2, Mod = 1/2, λ = 1.
        let sigma = [1.0, 1.0];
        let mut d = RestrictedDual::new(2.0, &sigma);
        d.push(UsageRow::indicator(&[0, 1], None));
        let stats = d.solve(1e-12, 100);
        assert!(stats.gap <= 1e-12);
        assert!((d.value() - 0.5).abs() < 1e-12);
        assert!((d.lambda[0] - 1.0).abs() < 1e-10);
        let rho = d.rho();
        assert!((rho[0] - 0.5).abs() < 1e-10 && (rho[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn overlapping_rows_converge() {
        // Spanning trees of a triangle: Mod_2 = 3/4.
        let sigma = [1.0; 3];
        for p in [1.3, 2.0, 4.0, 20.0] {
            let mut d = RestrictedDual::new(p, &sigma);
            for r in [[0, 1], [0, 2], [1, 2]] {
                d.push(UsageRow::indicator(&r, None));
            }
            let stats = d.solve(1e-10, 10_000);
            assert!(stats.gap <= 1e-10, "p={p} gap={}", stats.gap);
            let expected = 3.0 * 0.5f64.powf(p);
            assert!((d.value() - expected).abs() <= 1e-9 * expected, "p={p}");
        }
    }

    #[test]
    fn dominated_row_gets_zero_multiplier() {
        // Row {0,1} dominates row {0}: only {0} is active and ρ = (1, 0).
        let sigma = [1.0, 1.0];
        let mut d = RestrictedDual::new(2.0, &sigma);
        d.push(UsageRow::indicator(&[0, 1], None));
        d.push(UsageRow::indicator(&[0], None));
        d.solve(1e-12, 1000);
        assert!((d.value() - 1.0).abs() < 1e-10);
        assert!(d.lambda[0].abs() < 1e-10);
    }
}
