mod common;

use common::majority_algebra;
use cwb_core::free::FreeOptions;
use cwb_core::identity::catalog::{self, params, Params};
use cwb_core::identity::spectrum::{day_gap_ok, spectrum};
use cwb_core::identity::{check_concrete, parse_identity, pw_check, ConcreteOptions, Identity, SpectrumOptions};
use cwb_core::{corpus, FiniteAlgebra};
use proptest::prelude::*;

fn same_shape(a: &Identity, b: &Identity) -> bool {
    a.decls == b.decls && a.defs == b.defs && a.conditions == b.conditions && a.lhs == b.lhs && a.rhs == b.rhs
}

#[test]
fn catalog_entries_round_trip_through_text() {
    let entries = catalog::entries();
    assert!(entries.len() >= 27, "{} entries", entries.len());
    for e in entries {
        let id = e.instantiate(&Params::new()).unwrap();
        let printed = id.to_string();
        let again = parse_identity(&printed).unwrap_or_else(|err| panic!("{}: {err}\n{printed}", e.name));
        assert!(same_shape(&id, &again), "{}: {printed}", e.name);
        assert_eq!(again.to_string(), printed, "{}", e.name);
    }
}

#[test]
fn one_bracket_dstar_is_day3() {
    let dstar = catalog::instantiate("DSTAR", &params(&[("l", 1)])).unwrap();
    let day3 = catalog::instantiate("DAY", &params(&[("m", 3)])).unwrap();
    for alg in corpus::all() {
        for k in 0..=6 {
            let a = pw_check(&alg, &dstar, Some(k), FreeOptions::default()).unwrap();
            let b = pw_check(&alg, &day3, Some(k), FreeOptions::default()).unwrap();
            assert_eq!(a.holds, b.holds, "{} k={k}", alg.name());
        }
    }
}

fn day_value(alg: &FiniteAlgebra, family: &str, m: usize) -> Option<usize> {
    match spectrum(alg, family, &params(&[("m", m)]), 64, &SpectrumOptions::default()) {
        Ok(s) => s.value.exact(),
        Err(e) if e.is_cap() => None,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn day_spectrum_shape_where_measurable() {
    for alg in corpus::all() {
        let day: Vec<Option<usize>> = (3..=7).map(|m| day_value(&alg, "DAY", m)).collect();
        let rev: Vec<Option<usize>> = (3..=7).map(|m| day_value(&alg, "DAY_REV", m)).collect();
        for (i, m) in (3..=7).enumerate() {
            if let (Some(d), Some(r)) = (day[i], rev[i]) {
                assert!(day_gap_ok(m, d, r), "{} m={m}: {d} vs {r}", alg.name());
            }
            if i + 1 < day.len() {
                if let (Some(a), Some(b)) = (day[i], day[i + 1]) {
                    assert!(a <= b, "{} m={m}", alg.name());
                    if m % 2 == 1 {
                        assert!(b <= a + 1, "{} m={m}", alg.name());
                    }
                }
            }
        }
    }
}

/// Algebras whose 4-generated free algebras are small.
fn algebra(i: usize) -> FiniteAlgebra {
    match i {
        0..=4 => corpus::all().swap_remove(i),
        _ => majority_algebra(i as u64, 2 + i % 2),
    }
}

const FOUR_NODE: [(&str, &str, usize); 4] = [("DAY", "m", 3), ("DAY_REV", "m", 3), ("DSTAR", "l", 1), ("TSCHANTZ", "m", 2)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn variety_verdicts_hold_on_the_algebra(i in 0usize..9, f in 0usize..4, k in 0usize..5) {
        let alg = algebra(i);
        let (family, p, v) = FOUR_NODE[f];
        let id = catalog::instantiate(family, &params(&[(p, v)])).unwrap();
        let pw = pw_check(&alg, &id, Some(k), FreeOptions::default());
        prop_assume!(pw.is_ok());
        let concrete = check_concrete(&alg, &id, Some(k), &ConcreteOptions::default()).unwrap();
        // an identity of the variety holds in its generator
        prop_assert!(!pw.unwrap().holds || concrete.holds, "{} {} k={}", alg.name(), id.name, k);
    }

    #[test]
    fn verdicts_are_monotone_in_k(i in 0usize..9, f in 0usize..4, k in 0usize..5) {
        let alg = algebra(i);
        let (family, p, v) = FOUR_NODE[f];
        let id = catalog::instantiate(family, &params(&[(p, v)])).unwrap();
        let a = pw_check(&alg, &id, Some(k), FreeOptions::default()).unwrap();
        let b = pw_check(&alg, &id, Some(k + 1), FreeOptions::default()).unwrap();
        prop_assert!(!a.holds || b.holds);
    }
}
