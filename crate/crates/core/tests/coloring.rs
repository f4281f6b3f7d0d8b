mod common;

use common::*;
use iscount_core::coloring::{chromatic_number, chromatic_number_with, k_cover_count};
use iscount_core::oracle::brute_force_chromatic;
use iscount_core::solver::SolveOptions;
use iscount_core::{ColoringError, Graph};
use num_bigint::BigInt;
use proptest::prelude::*;

#[test]
fn fixtures() {
    assert_eq!(chromatic_number(&gen("petersen")).unwrap(), 3);
    for k in 1..=6 {
        assert_eq!(
            chromatic_number(&gen(&format!("complete({k})"))).unwrap(),
            k
        );
    }
    for k in 1..=6 {
        assert_eq!(
            chromatic_number(&gen(&format!("cycle({})", 2 * k + 1))).unwrap(),
            3
        );
    }
    assert_eq!(chromatic_number(&Graph::empty(0)).unwrap(), 0);
    let k2 = gen("complete(2)");
    assert_eq!(k_cover_count(&k2, 1).unwrap(), BigInt::from(0));
    assert_eq!(k_cover_count(&k2, 2).unwrap(), BigInt::from(2));
    assert_eq!(k_cover_count(&Graph::empty(1), 1).unwrap(), BigInt::from(1));
}

#[test]
fn cap() {
    assert!(matches!(
        chromatic_number(&Graph::empty(25)),
        Err(ColoringError::CapExceeded { n: 25, cap: 24 })
    ));
    assert!(k_cover_count(&Graph::empty(25), 2).is_err());
}

#[test]
fn random_graphs_match_oracle() {
    let opts = SolveOptions::default();
    let mut seed = 0;
    for n in 1..=12 {
        for p in [0.2, 0.4, 0.6, 0.8] {
            seed += 1;
            let g = gen(&format!("gnp({n},{p},{seed})"));
            assert_eq!(
                chromatic_number_with(&g, &opts).unwrap(),
                brute_force_chromatic(&g).unwrap(),
                "gnp({n},{p},{seed})"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cover_counts_are_monotone(g in arb_graph(8)) {
        let mut seen_positive = false;
        for k in 0..=g.n() as u32 + 1 {
            let x = k_cover_count(&g, k).unwrap();
            prop_assert!(x >= BigInt::from(0));
            if seen_positive {
                prop_assert!(x > BigInt::from(0));
            }
            seen_positive |= x > BigInt::from(0);
        }
        prop_assert!(seen_positive);
    }

    #[test]
    fn union_takes_the_max(a in arb_graph(8), b in arb_graph(8)) {
        let u = a.disjoint_union(&b);
        prop_assert_eq!(
            chromatic_number(&u).unwrap(),
            chromatic_number(&a).unwrap().max(chromatic_number(&b).unwrap())
        );
    }
}

#[test]
fn parallel_subsets_agree() {
    let par = SolveOptions {
        parallel: true,
        threads: Some(4),
        ..SolveOptions::default()
    };
    for seed in 0..6 {
        let g = gen(&format!("gnp(13,0.5,{seed})"));
        assert_eq!(
            chromatic_number_with(&g, &par).unwrap(),
            chromatic_number(&g).unwrap()
        );
    }
    assert_eq!(chromatic_number_with(&gen("petersen"), &par).unwrap(), 3);
}
