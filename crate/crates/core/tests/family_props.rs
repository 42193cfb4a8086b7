mod common;

use pmodulus::graph::min_cut;
use pmodulus::Family;
use proptest::prelude::*;
use rand::Rng;

fn check_oracle(f: &Family, rho: &[f64]) -> Result<(), TestCaseError> {
    let (row, len) = f.shortest_object(rho).unwrap();
    prop_assert!((row.cost(rho) - len).abs() <= 1e-12 * len.max(1.0));
    let brute = f.enumerate(1 << 16).unwrap().iter().map(|r| r.cost(rho)).fold(f64::INFINITY, f64::min);
    prop_assert!((len - brute).abs() <= 1e-12 * brute.max(1.0), "{f}: oracle {len} vs brute force {brute}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn oracles_match_enumeration(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = common::rng(seed);
        let chords = rng.random_range(0..=n / 2);
        let g = std::sync::Arc::new(pmodulus::fixtures::random_connected(&mut rng, n, chords, false));
        let (a, b) = common::pair(&mut rng, n);
        let families = [
            Family::connect(g.clone(), a, b).unwrap(),
            Family::cut(g.clone(), a, b).unwrap(),
            Family::spanning_trees(g.clone()).unwrap(),
        ];
        for _ in 0..3 {
            // Integer lengths make ties common.
            let rho: Vec<f64> = (0..g.m()).map(|_| rng.random_range(0..4) as f64).collect();
            for f in &families {
                check_oracle(f, &rho)?;
            }
            let rho = common::positive(&mut rng, g.m());
            for f in &families {
                check_oracle(f, &rho)?;
            }
        }
    }

    #[test]
    fn cut_oracle_is_max_flow(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, n, false);
        let (a, b) = common::pair(&mut rng, n);
        let rho = common::positive(&mut rng, g.m());
        let (_, len) = Family::cut(g.clone(), a, b).unwrap().shortest_object(&rho).unwrap();
        let flow = min_cut(&g, a, b, &rho).unwrap().flow_value;
        prop_assert!((len - flow).abs() <= 1e-9 * flow);
    }

    #[test]
    fn integral_families_have_unit_n_min(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, n, true);
        let (a, b) = common::pair(&mut rng, n);
        let rows = common::rows(&mut rng, g.m(), 4);
        for f in [
            Family::connect(g.clone(), a, b).unwrap(),
            Family::cut(g.clone(), a, b).unwrap(),
            Family::spanning_trees(g.clone()).unwrap(),
            common::explicit(&g, rows),
        ] {
            prop_assert!(f.is_integral());
            prop_assert!(f.n_min() >= 1.0);
        }
    }
}

#[test]
fn triangle_tree_oracle_tie_break() {
    let g = std::sync::Arc::new(pmodulus::fixtures::triangle());
    let f = Family::spanning_trees(g).unwrap();
    let (row, len) = f.shortest_object(&[1.0; 3]).unwrap();
    assert_eq!(len, 2.0);
    assert_eq!(row.entries().len(), 2);
    assert_eq!(f.enumerate(10).unwrap().len(), 3);
}
