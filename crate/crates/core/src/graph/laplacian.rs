use nalgebra::{DMatrix, DVector};

use super::Graph;
use crate::error::{Error, Result};

const DENSE_LIMIT: usize = 2000;
const RESIDUAL_TOL: f64 = 1e-10;

/// Effective resistance between `a` and `b` with conductances σ: inject a
/// unit current at `a`, ground `b`, and read off the potential at `a`.
pub fn effective_resistance(g: &Graph, a: usize, b: usize) -> Result<f64> {
    g.require_undirected()?;
    if a >= g.n() || b >= g.n() || a == b {
        return Err(Error::InvalidInput("effective resistance needs two distinct vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    // Grounded Laplacian: drop row/column b.
    let reduced = |v: usize| if v < b { v } else { v - 1 };
    let n = g.n() - 1;
    let ia = reduced(a);

    if g.n() <= DENSE_LIMIT {
        let mut lap = DMatrix::<f64>::zeros(n, n);
        for e in g.edges() {
            let c = e.weight;
            let (u, v) = (e.tail, e.head);
            if u != b {
                lap[(reduced(u), reduced(u))] += c;
            }
            if v != b {
                lap[(reduced(v), reduced(v))] += c;
            }
            if u != b && v != b {
                lap[(reduced(u), reduced(v))] -= c;
                lap[(reduced(v), reduced(u))] -= c;
            }
        }
        let mut rhs = DVector::<f64>::zeros(n);
        rhs[ia] = 1.0;
        let chol = lap.clone().cholesky().ok_or_else(|| Error::Numerical("grounded Laplacian not positive definite".into()))?;
        let x = chol.solve(&rhs);
        let residual = (&lap * &x - &rhs).norm();
        if residual > RESIDUAL_TOL {
            return Err(Error::Numerical(format!("Laplacian residual {residual:e} above {RESIDUAL_TOL:e}")));
        }
        Ok(x[ia])
    } else {
        conjugate_gradient(g, b, ia, reduced)
    }
}

fn conjugate_gradient(g: &Graph, ground: usize, ia: usize, reduced: impl Fn(usize) -> usize) -> Result<f64> {
    let n = g.n() - 1;
    let mut diag = vec![0.0; n];
    let mut off: Vec<(usize, usize, f64)> = Vec::new();
    for e in g.edges() {
        let (u, v, c) = (e.tail, e.head, e.weight);
        if u != ground {
            diag[reduced(u)] += c;
        }
        if v != ground {
            diag[reduced(v)] += c;
        }
        if u != ground && v != ground {
            off.push((reduced(u), reduced(v), c));
        }
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            out[i] = diag[i] * x[i];
        }
        for &(u, v, c) in &off {
            out[u] -= c * x[v];
            out[v] -= c * x[u];
        }
    };
    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    r[ia] = 1.0;
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for _ in 0..(10 * n).max(1000) {
        apply(&p, &mut ap);
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if r.iter().map(|v| v * v).sum::<f64>().sqrt() <= RESIDUAL_TOL {
            return Ok(x[ia]);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Numerical("conjugate gradient did not reach the residual target".into()))
}
