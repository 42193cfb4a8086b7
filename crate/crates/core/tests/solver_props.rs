mod common;

use std::sync::Arc;

use pmodulus::solver::clarkson_radius;
use pmodulus::{fixtures, Family, ModulusProblem, ModulusSolution, SolverOptions};
use proptest::prelude::*;
use rand::Rng;

fn solve(f: &Family, p: f64) -> ModulusSolution {
    let sol = ModulusProblem::new(f.clone(), p).unwrap().solve().unwrap();
    assert!(sol.converged, "{f} at p = {p}");
    sol
}

fn certified(sol: &ModulusSolution) -> Result<(), TestCaseError> {
    prop_assert!(sol.relative_gap() <= 1e-6);
    prop_assert!(sol.admissibility >= 1.0 - 1e-12);
    prop_assert!(sol.lower <= sol.upper);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adding_rows_never_decreases_modulus(seed in any::<u64>(), p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, 5, true);
        let rows = common::rows(&mut rng, g.m(), 6);
        let k = rng.random_range(1..rows.len());
        let small = solve(&common::explicit(&g, rows[..k].to_vec()), p);
        let full = solve(&common::explicit(&g, rows), p);
        certified(&small)?;
        certified(&full)?;
        prop_assert!(small.value <= full.value + 2.0 * 1e-6 * full.upper);
    }

    #[test]
    fn modulus_is_subadditive(seed in any::<u64>(), p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, 5, true);
        let a = common::rows(&mut rng, g.m(), 3);
        let b = common::rows(&mut rng, g.m(), 3);
        let both: Vec<_> = a.iter().chain(&b).cloned().collect();
        let ma = solve(&common::explicit(&g, a), p).value;
        let mb = solve(&common::explicit(&g, b), p).value;
        let mab = solve(&common::explicit(&g, both), p).value;
        prop_assert!(mab <= (ma + mb) * (1.0 + 2e-6));
    }

    #[test]
    fn p_interpolation_monotonicity(seed in any::<u64>(), n in 3usize..=8, weighted in any::<bool>()) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, n, weighted);
        let (a, b) = common::pair(&mut rng, n);
        let total = g.total_weight();
        for f in [Family::connect(g.clone(), a, b).unwrap(), Family::spanning_trees(g.clone()).unwrap()] {
            let nmin = f.n_min();
            let grid = [1.25, 1.5, 2.0, 3.0, 5.0];
            let values: Vec<f64> = grid.iter().map(|&p| solve(&f, p).value).collect();
            for i in 1..grid.len() {
                let (p0, p1) = (grid[i - 1], grid[i]);
                let scaled = |p: f64, v: f64| nmin.powf(p) * v;
                prop_assert!(scaled(p1, values[i]) <= scaled(p0, values[i - 1]) * (1.0 + 1e-6));
                let root = |p: f64, v: f64| (v / total).powf(1.0 / p);
                prop_assert!(root(p1, values[i]) >= root(p0, values[i - 1]) * (1.0 - 1e-6));
            }
        }
    }

    #[test]
    fn every_solve_is_certified(seed in any::<u64>(), n in 3usize..=9, p in prop::sample::select(vec![1.2, 1.5, 2.0, 3.0, 6.0])) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, n, true);
        let (a, b) = common::pair(&mut rng, n);
        for f in [
            Family::connect(g.clone(), a, b).unwrap(),
            Family::cut(g.clone(), a, b).unwrap(),
            Family::spanning_trees(g.clone()).unwrap(),
        ] {
            let sol = solve(&f, p);
            certified(&sol)?;
            let smin = g.weights().into_iter().fold(f64::INFINITY, f64::min);
            let r = clarkson_radius(p, smin, sol.upper, sol.lower);
            prop_assert_eq!(sol.accuracy_radius, Some(r));
        }
    }
}

#[test]
fn large_p_approaches_inverse_hop_count() {
    let cases: Vec<(Family, f64)> = vec![
        {
            let g = Arc::new(fixtures::parallel_paths(2, 3));
            (Family::connect(g.clone(), g.vertex("s").unwrap(), g.vertex("t").unwrap()).unwrap(), 3.0)
        },
        (Family::connect(Arc::new(fixtures::triangle()), 0, 1).unwrap(), 1.0),
        (Family::connect(Arc::new(fixtures::path(&["a", "b", "c", "d"])), 0, 3).unwrap(), 3.0),
        (Family::connect(Arc::new(fixtures::complete(5)), 0, 1).unwrap(), 1.0),
    ];
    for (f, hops) in cases {
        let v = solve(&f, 50.0).value.powf(1.0 / 50.0);
        assert!((v * hops - 1.0).abs() <= 0.05, "{f}: {v} vs 1/{hops}");
    }
}

#[test]
fn default_tolerances() {
    let o = SolverOptions::default();
    assert_eq!(o.eps_rel, 1e-6);
    assert_eq!(o.eps_adm, 1e-8);
}
