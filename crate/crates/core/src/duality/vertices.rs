//! Extreme points of Adm(Γ) = {x ≥ 0 : N x ≥ 1}.
//!
//! The polyhedron is homogenized to the cone {(x, t) ≥ 0 : N x − t ≥ 0},
//! whose extreme rays with t > 0 are the vertices. Rays are generated by
//! the double description method with the combinatorial adjacency test,
//! and every candidate is then re-checked independently: feasibility, and
//! full rank m of its active constraints with pivot tolerance 1e-9.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::UsageRow;

pub const MAX_EDGES: usize = 16;
pub const MAX_ROWS: usize = 2048;
const MAX_RAYS: usize = 250_000;
const RANK_TOL: f64 = 1e-9;
const DEDUP_GRID: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Enumerated,
    AnalyticCut,
    AnalyticPath,
    FeasiblePartition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockerVertex {
    pub coords: Vec<f64>,
    pub provenance: Provenance,
}

impl BlockerVertex {
    pub fn to_row(&self) -> Result<UsageRow> {
        UsageRow::from_dense(&self.coords, None)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *a)
    }
}

struct Ray {
    v: Vec<f64>,
    zero: Bits,
}

/// All extreme points of {x ≥ 0 : N x ≥ 1} for the rows given.
pub fn enumerate_blocker_vertices(rows: &[UsageRow], m: usize) -> Result<Vec<BlockerVertex>> {
    if rows.is_empty() {
        return Err(Error::EmptyFamily("no rows to block".into()));
    }
    if m > MAX_EDGES || rows.len() > MAX_ROWS {
        return Err(Error::GuardExceeded(format!(
            "blocker enumeration needs m ≤ {MAX_EDGES} and |Γ| ≤ {MAX_ROWS}, got m = {m}, |Γ| = {}",
            rows.len()
        )));
    }
    let dense: Vec<Vec<f64>> = minimal_rows(rows, m);
    let d = m + 1;
    let total = d + dense.len();

    let mut rays: Vec<Ray> = (0..d)
        .map(|i| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            let mut zero = Bits::new(total);
            (0..d).filter(|&j| j != i).for_each(|j| zero.set(j));
            Ray { v, zero }
        })
        .collect();

    for (j, row) in dense.iter().enumerate() {
        let cid = d + j;
        let mut a = row.clone();
        a.push(-1.0);
        let scale = 1.0 + a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let tol = 1e-10 * scale;
        let s: Vec<f64> = rays.iter().map(|r| dot(&a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| s[i] > tol).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| s[i] < -tol).collect();
        if neg.is_empty() {
            for (i, r) in rays.iter_mut().enumerate() {
                if s[i].abs() <= tol {
                    r.zero.set(cid);
                }
            }
            continue;
        }

        let rays_ref = &rays;
        let new_rays: Vec<Ray> = pos
            .par_iter()
            .flat_map_iter(|&ip| {
                let s = &s;
                neg.iter().filter_map(move |&in_| {
                    let common = rays_ref[ip].zero.and(&rays_ref[in_].zero);
                    if (common.count() as usize) + 2 < d {
                        return None;
                    }
                    let blocked = rays_ref
                        .iter()
                        .enumerate()
                        .any(|(k, r)| k != ip && k != in_ && common.subset_of(&r.zero));
                    if blocked {
                        return None;
                    }
                    let (sp, sn) = (s[ip], s[in_]);
                    let mut v: Vec<f64> =
                        rays_ref[in_].v.iter().zip(&rays_ref[ip].v).map(|(n, p)| sp * n - sn * p).collect();
                    normalize(&mut v);
                    let mut zero = common;
                    zero.set(cid);
                    Some(Ray { v, zero })
                })
            })
            .collect();

        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + new_rays.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if s[i] > tol {
                kept.push(r);
            } else if s[i] >= -tol {
                r.zero.set(cid);
                kept.push(r);
            }
        }
        kept.extend(new_rays);
        if kept.len() > MAX_RAYS {
            return Err(Error::GuardExceeded(format!("double description exceeded {MAX_RAYS} rays")));
        }
        rays = kept;
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in rays {
        let t = r.v[m];
        if t <= 1e-12 {
            continue;
        }
        let x: Vec<f64> = r.v[..m].iter().map(|v| (v / t).max(0.0)).collect();
        let Some(x) = certify_vertex(&dense, &x) else {
            log::debug!("discarding non-extreme candidate {x:?}");
            continue;
        };
        let key: Vec<i64> = x.iter().map(|v| (v / DEDUP_GRID).round() as i64).collect();
        if seen.insert(key) {
            out.push(BlockerVertex { coords: x, provenance: Provenance::Enumerated });
        }
    }
    out.sort_by(|a, b| a.coords.partial_cmp(&b.coords).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Dense rows with duplicates and componentwise-dominated rows removed;
/// a row that dominates another adds an implied constraint only.
fn minimal_rows(rows: &[UsageRow], m: usize) -> Vec<Vec<f64>> {
    let dense: Vec<Vec<f64>> = rows.iter().map(|r| r.to_dense(m)).collect();
    let mut keep = Vec::new();
    for (i, r) in dense.iter().enumerate() {
        let dominated = dense.iter().enumerate().any(|(j, o)| {
            j != i && o.iter().zip(r).all(|(a, b)| a <= b) && (o != r || j < i)
        });
        if !dominated {
            keep.push(r.clone());
        }
    }
    keep
}

/// Checks feasibility and extremality of `x`; returns it re-solved from its
/// active constraints so the coordinates are accurate to rounding.
fn certify_vertex(rows: &[Vec<f64>], x: &[f64]) -> Option<Vec<f64>> {
    let m = x.len();
    let mut active: Vec<(Vec<f64>, f64)> = Vec::new();
    for (e, &v) in x.iter().enumerate() {
        if v.abs() <= RANK_TOL {
            let mut u = vec![0.0; m];
            u[e] = 1.0;
            active.push((u, 0.0));
        }
    }
    for r in rows {
        let ell = dot(r, x);
        if ell < 1.0 - RANK_TOL {
            return None;
        }
        if (ell - 1.0).abs() <= RANK_TOL {
            active.push((r.clone(), 1.0));
        }
    }
    let basis = independent_subset(&active, m);
    if basis.len() < m {
        return None;
    }
    let a = DMatrix::from_fn(m, m, |i, j| active[basis[i]].0[j]);
    let b = DVector::from_fn(m, |i, _| active[basis[i]].1);
    let sol = a.lu().solve(&b)?;
    let mut refined: Vec<f64> = sol.iter().copied().collect();
    for v in refined.iter_mut() {
        if (*v - v.round()).abs() <= 1e-12 {
            *v = v.round();
        }
        if *v == 0.0 {
            *v = 0.0; // drop negative zero
        }
    }
    if refined.iter().any(|v| *v < -RANK_TOL) || rows.iter().any(|r| dot(r, &refined) < 1.0 - RANK_TOL) {
        return None;
    }
    Some(refined)
}

/// Greedy selection of linearly independent rows by Gram–Schmidt with
/// reorthogonalization; a row is kept if its residual norm exceeds
/// RANK_TOL times its own norm.
fn independent_subset(rows: &[(Vec<f64>, f64)], m: usize) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for (i, (r, _)) in rows.iter().enumerate() {
        if basis.len() == m {
            break;
        }
        let norm = dot(r, r).sqrt();
        let mut w = r.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let wn = dot(&w, &w).sqrt();
        if wn > RANK_TOL * norm {
            w.iter_mut().for_each(|x| *x /= wn);
            basis.push(w);
            chosen.push(i);
        }
    }
    chosen
}

/// Rank of a set of vectors at pivot tolerance 1e-9.
pub fn rank(vectors: &[Vec<f64>]) -> usize {
    let m = vectors.first().map_or(0, Vec::len);
    let rows: Vec<(Vec<f64>, f64)> = vectors.iter().map(|v| (v.clone(), 0.0)).collect();
    independent_subset(&rows, m).len()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let mx = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if mx > 0.0 {
        for x in v.iter_mut() {
            *x /= mx;
            if x.abs() < 1e-14 {
                *x = 0.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(vs: &[BlockerVertex]) -> Vec<Vec<f64>> {
        vs.iter().map(|v| v.coords.clone()).collect()
    }

    #[test]
    fn single_row_gives_simplex_vertices() {
        let rows = vec![UsageRow::indicator(&[0, 1], None)];
        let v = enumerate_blocker_vertices(&rows, 2).unwrap();
        assert_eq!(coords(&v), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn two_unit_rows_give_single_vertex() {
        let rows = vec![UsageRow::indicator(&[0], None), UsageRow::indicator(&[1], None)];
        assert_eq!(coords(&enumerate_blocker_vertices(&rows, 2).unwrap()), vec![vec![1.0, 1.0]]);
    }

    #[test]
    fn triangle_trees() {
        let rows: Vec<_> = [[0, 1], [0, 2], [1, 2]].iter().map(|r| UsageRow::indicator(r, None)).collect();
        let v = coords(&enumerate_blocker_vertices(&rows, 3).unwrap());
        assert_eq!(
            v,
            vec![vec![0.0, 1.0, 1.0], vec![0.5, 0.5, 0.5], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]
        );
    }

    #[test]
    fn fractional_usage() {
        // 0.5 x0 + 2 x1 ≥ 1: vertices (2, 0) and (0, 1/2).
        let rows = vec![UsageRow::new([(0, 0.5), (1, 2.0)], None).unwrap()];
        assert_eq!(coords(&enumerate_blocker_vertices(&rows, 2).unwrap()), vec![vec![0.0, 0.5], vec![2.0, 0.0]]);
    }

    #[test]
    fn dominated_rows_are_ignored() {
        let rows = vec![UsageRow::indicator(&[0], None), UsageRow::indicator(&[0, 1], None)];
        assert_eq!(coords(&enumerate_blocker_vertices(&rows, 2).unwrap()), vec![vec![1.0, 0.0]]);
    }

    #[test]
    fn guard() {
        let rows = vec![UsageRow::indicator(&[0], None)];
        assert!(matches!(enumerate_blocker_vertices(&rows, MAX_EDGES + 1), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn rank_tolerance() {
        assert_eq!(rank(&[vec![1.0, 0.0], vec![2.0, 1e-12]]), 1);
        assert_eq!(rank(&[vec![1.0, 0.0], vec![1.0, 1.0]]), 2);
    }
}
