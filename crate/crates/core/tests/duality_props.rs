mod common;

use pmodulus::duality::{blocker_vertices, enumerate_blocker_vertices, verify_pmf_value_identity};
use pmodulus::verify::{connected_graphs, tree_blocker_report_on};
use pmodulus::{Graph, ModulusProblem, SolverOptions};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn blocker_of_blocker_lies_in_family(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, 5, false);
        let m = g.m();
        let count = rng.random_range(2..=6);
        let rows = common::rows(&mut rng, m, count);
        let f = common::explicit(&g, rows.clone());
        let blocker: Vec<_> = blocker_vertices(&f).unwrap().iter().map(|v| v.to_row().unwrap()).collect();
        let back = enumerate_blocker_vertices(&blocker, m).unwrap();
        let dense: Vec<Vec<f64>> = rows.iter().map(|r| r.to_dense(m)).collect();
        for v in back {
            prop_assert!(
                dense.iter().any(|r| r.iter().zip(&v.coords).all(|(a, b)| (a - b).abs() <= 1e-9)),
                "{:?} is not a row of the family", v.coords
            );
        }
    }

    /// Points of the dominant of Γ (convex combinations of rows plus a
    /// nonnegative vector) have length ≥ 1 under every blocker vertex.
    #[test]
    fn blocker_vertices_bound_the_dominant(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, 5, false);
        let m = g.m();
        let rows = common::rows(&mut rng, m, 5);
        let f = common::explicit(&g, rows.clone());
        let vertices = blocker_vertices(&f).unwrap();
        for v in &vertices {
            for r in &rows {
                prop_assert!(r.cost(&v.coords) >= 1.0 - 1e-9);
            }
        }
        for _ in 0..200 {
            let w: Vec<f64> = rows.iter().map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            let mut x: Vec<f64> = (0..m).map(|_| if rng.random_bool(0.3) { rng.random_range(0.0..0.5) } else { 0.0 }).collect();
            for (r, wi) in rows.iter().zip(&w) {
                for &(e, u) in r.entries() {
                    x[e] += wi / total * u;
                }
            }
            for v in &vertices {
                let dot: f64 = v.coords.iter().zip(&x).map(|(a, b)| a * b).sum();
                prop_assert!(dot >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn pmf_value_identity(seed in any::<u64>(), p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, 6, true);
        let (a, b) = common::pair(&mut rng, 6);
        for f in [pmodulus::Family::connect(g.clone(), a, b).unwrap(), common::explicit(&g, common::rows(&mut rng, g.m(), 5))] {
            let prob = ModulusProblem::new(f, p).unwrap().with_options(SolverOptions::default().with_eps_rel(1e-10));
            let sol = prob.solve().unwrap();
            prop_assert!(verify_pmf_value_identity(&sol, &prob).unwrap() <= 1e-6);
        }
    }
}

/// Canonical form of a graph on `n` vertices as the smallest relabelled
/// edge mask, for isomorphism deduplication.
fn canonical(mask: u32, pairs: &[(usize, usize)], perms: &[Vec<usize>]) -> u32 {
    let index = |u: usize, v: usize| pairs.iter().position(|&q| q == (u.min(v), u.max(v))).unwrap();
    perms
        .iter()
        .map(|pi| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u32, |acc, (_, &(u, v))| acc | 1 << index(pi[u], pi[v]))
        })
        .min()
        .unwrap_or(mask)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn nonisomorphic_connected(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 1u32..(1 << pairs.len()) {
        if !seen.insert(canonical(mask, &pairs, &perms)) {
            continue;
        }
        let edges: Vec<(usize, usize, f64)> =
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &(u, v))| (u, v, 1.0)).collect();
        let g = Graph::from_indexed_edges(n, false, &edges).unwrap();
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

#[test]
fn nonisomorphic_counts() {
    let counts: Vec<usize> = (2..=6).map(|n| nonisomorphic_connected(n).len()).collect();
    assert_eq!(counts, [1, 2, 6, 21, 112]);
    assert_eq!(connected_graphs(4).len(), 38);
}

/// Blocker vertices of spanning trees are scaled feasible-partition
/// indicators, and every such indicator is admissible. Set equality fails
/// as soon as some partition vector is not extreme.
#[test]
fn tree_blockers_up_to_six_vertices() {
    let graphs: Vec<Graph> = (2..=6).flat_map(nonisomorphic_connected).collect();
    let r = tree_blocker_report_on(&graphs).unwrap();
    assert!(r.inclusion_holds(), "{r:?}");
    assert!(r.set_mismatches > 0 && r.non_extreme_partitions > 0);

    let complete: Vec<Graph> = (2..=6).map(pmodulus::fixtures::complete).collect();
    let r = tree_blocker_report_on(&complete).unwrap();
    assert_eq!(r.set_mismatches, 0, "{r:?}");
}
