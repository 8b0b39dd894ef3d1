mod common;

use std::sync::OnceLock;

use common::suites::{day_chain, day_witness_case, gumm_chain, gumm_witness_case, jonsson_round_trip};
use common::{majority_algebra, rng};
use cwb_core::constructions::{bound, jonsson_to_day_on};
use cwb_core::identity::catalog::params;
use cwb_core::terms::{verify_chain, TermChain};
use cwb_core::{corpus, FiniteAlgebra};
use proptest::prelude::*;

/// Algebras with Day and Gumm terms, with their chains.
fn pool() -> &'static [(FiniteAlgebra, TermChain, TermChain)] {
    static POOL: OnceLock<Vec<(FiniteAlgebra, TermChain, TermChain)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut algs = vec![corpus::trivial(), corpus::z2(), corpus::lattice2(), corpus::chain3()];
        algs.extend((0..6).map(|s| majority_algebra(s, 2 + (s as usize % 2))));
        algs.into_iter()
            .map(|a| {
                let (d, g) = (day_chain(&a), gumm_chain(&a));
                (a, d, g)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jonsson_chains_convert_to_day_chains(seed in any::<u64>()) {
        let alg = majority_algebra(seed, 2 + (seed % 2) as usize);
        let found = jonsson_round_trip(&alg);
        prop_assert!(matches!(found, Ok(Some(_))), "{:?}", found);
    }

    #[test]
    fn day_witnesses_validate(i in 0usize..10, seed in any::<u64>()) {
        let (alg, day, _) = &pool()[i];
        let r = day_witness_case(alg, day, &mut rng(seed));
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn gumm_witnesses_validate(i in 0usize..10, seed in any::<u64>()) {
        let (alg, _, gumm) = &pool()[i];
        let r = gumm_witness_case(alg, gumm, &mut rng(seed));
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn thm_with_one_step_returns_its_hypothesis(r in 1usize..50) {
        let c = bound("THM", &params(&[("r", r), ("q", 1)])).unwrap();
        prop_assert_eq!(c.lhs, Some(3));
        prop_assert_eq!(c.rhs, 2 * r as u64);
    }

    #[test]
    fn thm_grows_with_q(r in 1usize..20, q in 1usize..8) {
        let a = bound("THM", &params(&[("r", r), ("q", q)])).unwrap();
        let b = bound("THM", &params(&[("r", r), ("q", q + 1)])).unwrap();
        prop_assert!(a.lhs < b.lhs);
        prop_assert!(a.rhs <= b.rhs);
    }
}

#[test]
fn verified_transform_pads_odd_chains() {
    let mut converted = 0;
    for (alg, _, _) in pool() {
        let search = cwb_core::terms::search_jonsson(alg, 8, false, Default::default()).unwrap();
        // groups such as z2 have no Jónsson terms
        let Some(found) = search.found() else { continue };
        let day = jonsson_to_day_on(alg, &found.chain).unwrap();
        assert!(verify_chain(alg, &day).unwrap().is_valid(), "{}", alg.name());
        converted += 1;
    }
    assert_eq!(converted, pool().len() - 1);
}
