mod common;

use common::*;
use iscount_core::oracle::brute_force_ind;
use iscount_core::solver::{branch_on, count_with, SolveOptions};
use iscount_core::{count_independent_sets, CardinalityFunction, Graph, Separation, Vertex};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn oracle(g: &Graph, c: &CardinalityFunction) -> BigUint {
    brute_force_ind(g, Some(c)).unwrap()
}

fn weighted(max_n: usize) -> impl Strategy<Value = (Graph, CardinalityFunction)> {
    (arb_graph(max_n), any::<u64>()).prop_map(|(g, seed)| {
        let c = random_cardinality(&g, 4, &mut rng(seed));
        (g, c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn recurrence_identity((g, c) in weighted(14), pick in any::<prop::sample::Index>()) {
        prop_assume!(g.n() > 0);
        let vs = vertices(&g);
        let v = vs[pick.index(vs.len())];
        let mut expected = c.c_out(v) * oracle(&g.restrict(&[v]), &c);
        let mut inn = c.c_in(v) * oracle(&g.restrict(&g.closed_neighborhood(v)), &c);
        for &u in g.neighbors(v) {
            inn *= c.c_out(u);
        }
        expected += inn;
        let got = branch_on(&g, &Separation::trivial(g.capacity()), &c, v).unwrap();
        prop_assert_eq!(got, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn component_multiplicativity(a in arb_graph(10), b in arb_graph(10), seed in any::<u64>()) {
        let u = a.disjoint_union(&b);
        prop_assert_eq!(
            count_independent_sets(&u, &CardinalityFunction::unit(u.capacity())).0,
            count_independent_sets(&a, &CardinalityFunction::unit(a.capacity())).0
                * count_independent_sets(&b, &CardinalityFunction::unit(b.capacity())).0
        );
        let cu = random_cardinality(&u, 4, &mut rng(seed));
        let ca = CardinalityFunction::from_pairs(
            (0..a.capacity() as Vertex).map(|v| (cu.c_out(v).clone(), cu.c_in(v).clone())).collect(),
        );
        let shift = a.capacity() as Vertex;
        let cb = CardinalityFunction::from_pairs(
            (0..b.capacity() as Vertex)
                .map(|v| (cu.c_out(v + shift).clone(), cu.c_in(v + shift).clone()))
                .collect(),
        );
        prop_assert_eq!(
            count_independent_sets(&u, &cu).0,
            count_independent_sets(&a, &ca).0 * count_independent_sets(&b, &cb).0
        );
    }

    #[test]
    fn cardinality_semantics((g, c) in weighted(13), pick in any::<prop::sample::Index>()) {
        prop_assume!(g.n() > 0);
        let vs = vertices(&g);
        let v = vs[pick.index(vs.len())];
        let mut excluded = c.clone();
        excluded.set(v, c.c_out(v).clone(), BigUint::from(0u32));
        prop_assert_eq!(
            count_independent_sets(&g, &excluded).0,
            c.c_out(v) * oracle(&g.restrict(&[v]), &c)
        );
        let mut forced = c.clone();
        forced.set(v, BigUint::from(0u32), c.c_in(v).clone());
        let mut expected = c.c_in(v) * oracle(&g.restrict(&g.closed_neighborhood(v)), &c);
        for &u in g.neighbors(v) {
            expected *= c.c_out(u);
        }
        prop_assert_eq!(count_independent_sets(&g, &forced).0, expected);
    }

    #[test]
    fn isomorphism_invariance((g, c) in weighted(16), seed in any::<u64>()) {
        let mut perm: Vec<Vertex> = (0..g.capacity() as Vertex).collect();
        perm.shuffle(&mut rng(seed));
        let h = g.relabel(&perm).unwrap();
        let mut pairs = vec![(BigUint::from(1u32), BigUint::from(1u32)); g.capacity()];
        for v in g.vertices() {
            pairs[perm[v as usize] as usize] = (c.c_out(v).clone(), c.c_in(v).clone());
        }
        let ch = CardinalityFunction::from_pairs(pairs);
        prop_assert_eq!(count_independent_sets(&h, &ch).0, count_independent_sets(&g, &c).0);
    }

    #[test]
    fn deterministic_stats((g, c) in weighted(18)) {
        let seq = SolveOptions { audit: true, ..SolveOptions::default() };
        let par = SolveOptions { parallel: true, threads: Some(4), ..seq.clone() };
        let (x1, s1) = count_with(&g, &c, &seq);
        let (x2, s2) = count_with(&g, &c, &seq);
        let (x3, s3) = count_with(&g, &c, &par);
        prop_assert_eq!(&x1, &x2);
        prop_assert_eq!(&x1, &x3);
        prop_assert_eq!(&s1, &s2);
        prop_assert_eq!(&s1, &s3);
        prop_assert!(s1.max_depth <= 3 * g.n().max(1));
    }
}

#[test]
fn larger_instances_stay_shallow() {
    for seed in 0..20 {
        let g = gen(&format!("random-cubic(60,{seed})"));
        let (_, stats) = count_with(&g, &CardinalityFunction::unit(60), &SolveOptions::default());
        assert!(stats.max_depth <= 3 * g.n());
        let g = gen(&format!("gnp(40,0.15,{seed})"));
        let (_, stats) = count_with(&g, &CardinalityFunction::unit(40), &SolveOptions::default());
        assert!(stats.max_depth <= 3 * g.n());
    }
}
