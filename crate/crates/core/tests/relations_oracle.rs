mod common;

use common::{brute_congruences, brute_generate, random_algebra, rng, to_matrix};
use cwb_core::relations::DEFAULT_CONGRUENCE_CAP;
use cwb_core::{all_congruences, cong_join, generate, is_compatible, Kind};
use proptest::prelude::*;
use rand::RngExt;

const KINDS: [Kind; 3] = [Kind::Admissible, Kind::Tolerance, Kind::Congruence];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generate_matches_brute_force(seed in any::<u64>(), pairs in 0usize..4) {
        let alg = random_algebra(seed, 4);
        let n = alg.size();
        let mut r = rng(seed ^ 0x5eed);
        let seed_pairs: Vec<_> = (0..pairs).map(|_| (r.random_range(0..n), r.random_range(0..n))).collect();
        for kind in KINDS {
            let fast = generate(&alg, &seed_pairs, kind).unwrap();
            prop_assert_eq!(to_matrix(&fast), brute_generate(&alg, &seed_pairs, kind), "{:?}", kind);
            prop_assert!(is_compatible(&alg, &fast, kind));
        }
    }

    #[test]
    fn all_congruences_matches_partition_filter(seed in any::<u64>()) {
        let alg = random_algebra(seed, 4);
        let fast = all_congruences(&alg, DEFAULT_CONGRUENCE_CAP).unwrap();
        prop_assert_eq!(&fast, &brute_congruences(&alg));
        // closed under joins
        for a in &fast {
            for b in &fast {
                prop_assert!(fast.contains(&cong_join(a, b).unwrap()));
            }
        }
    }

    #[test]
    fn kinds_are_nested(seed in any::<u64>(), a in 0usize..4, b in 0usize..4) {
        let alg = random_algebra(seed, 4);
        let n = alg.size();
        let pair = [(a % n, b % n)];
        let adm = generate(&alg, &pair, Kind::Admissible).unwrap();
        let tol = generate(&alg, &pair, Kind::Tolerance).unwrap();
        let cong = generate(&alg, &pair, Kind::Congruence).unwrap();
        prop_assert!(adm.is_subset(&tol));
        prop_assert!(tol.is_subset(&cong));
        prop_assert_eq!(cong.clone(), tol.transitive_closure());
    }
}
