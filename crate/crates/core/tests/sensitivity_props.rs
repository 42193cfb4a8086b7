mod common;

use pmodulus::sensitivity::{concavity_check, default_t_grid, lipschitz_check, rho_continuity, sensitivity_options};
use pmodulus::Family;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn lipschitz_bound_holds(seed in any::<u64>(), p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, 6, false);
        let (a, b) = common::pair(&mut rng, 6);
        let f = Family::connect(g.clone(), a, b).unwrap();
        let s1 = common::positive(&mut rng, g.m());
        let s2 = common::positive(&mut rng, g.m());
        prop_assert!(lipschitz_check(&f, p, &s1, &s2, &sensitivity_options()).unwrap().holds);
    }

    #[test]
    fn explicit_families_are_concave_in_sigma(seed in any::<u64>(), p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, 5, false);
        let f = common::explicit(&g, common::rows(&mut rng, g.m(), 4));
        let s0 = common::positive(&mut rng, g.m());
        let s1 = common::positive(&mut rng, g.m());
        let r = concavity_check(&f, p, &s0, &s1, &default_t_grid(), &sensitivity_options()).unwrap();
        prop_assert!(r.min_slack >= -1e-5);
    }

    #[test]
    fn optimal_density_is_continuous(seed in any::<u64>(), p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let mut rng = common::rng(seed);
        let g = common::graph(&mut rng, 6, true);
        let (a, b) = common::pair(&mut rng, 6);
        let f = Family::connect(g.clone(), a, b).unwrap();
        let edge = rng.random_range(0..g.m());
        let r = rho_continuity(&f, p, &g.weights(), edge, &[1e-1, 1e-2, 1e-3], &sensitivity_options()).unwrap();
        prop_assert!(r.decreasing, "{r:?}");
    }
}
