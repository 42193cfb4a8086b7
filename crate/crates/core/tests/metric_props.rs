mod common;

use pmodulus::metrics::{cut_inclusion_check, delta_p_matrix, mod_inverse_metric, ultrametric_check};
use pmodulus::SolverOptions;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn delta_p_is_a_metric(seed in any::<u64>(), n in 3usize..=8, weighted in any::<bool>()) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, n, weighted);
        for p in [1.5, 2.0, 3.0] {
            let r = delta_p_matrix(&g, p, &SolverOptions::default()).unwrap();
            prop_assert!(r.converged);
            prop_assert!(r.symmetry_error <= 1e-6);
            prop_assert!(r.min_off_diagonal > 0.0);
            prop_assert!(r.triangle_slack >= -1e-6, "p = {p}: slack {}", r.triangle_slack);
            if p == 2.0 {
                let er = r.comparisons.iter().find(|c| c.against == "effective-resistance").unwrap();
                prop_assert!(er.max_relative_deviation <= 1e-5);
            }
        }
    }

    #[test]
    fn inverse_modulus_is_a_metric_below_two(seed in any::<u64>(), n in 3usize..=7, p in prop::sample::select(vec![1.1, 1.5, 1.9])) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, n, true);
        let r = mod_inverse_metric(&g, p, &SolverOptions::default()).unwrap();
        prop_assert!(r.is_metric(1e-6), "{r:?}");
    }

    #[test]
    fn inverse_min_cut_is_an_ultrametric(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, n, true);
        let r = ultrametric_check(&g).unwrap();
        prop_assert!(r.triangle_slack >= -1e-12);
    }

    #[test]
    fn ab_cuts_split_at_any_third_vertex(seed in any::<u64>(), n in 3usize..=8) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, n, false);
        let (a, b) = common::pair(&mut rng, n);
        let c = (0..n).filter(|&v| v != a && v != b).nth(rng.random_range(0..n - 2)).unwrap();
        prop_assert!(cut_inclusion_check(&g, a, b, c, 1 << 16).unwrap());
    }
}
