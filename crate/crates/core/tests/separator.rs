mod common;

use common::*;
use iscount_core::measure::mu_r;
use iscount_core::separator::{balanced_separation, path_decomposition};
use iscount_core::{Graph, Side, WeightSet};
use proptest::prelude::*;

fn subcubic_graph() -> impl Strategy<Value = Graph> {
    (2usize..20, 0usize..10, 0u64..1000)
        .prop_map(|(n, k, seed)| random_subcubic(2 * n, k.min(3 * n), seed))
}

proptest! {
    #[test]
    fn decompositions_are_nice(g in arb_graph(14)) {
        let pd = path_decomposition(&g);
        prop_assert!(pd.validate(&g).is_ok(), "{:?}", pd.validate(&g));
        prop_assert!(pd.is_nice());
    }

    /// Walking the bags, `μ_r(L) − μ_r(R)` runs from `−μ_r(V)` up to
    /// `μ_r(V)` in steps of at most one vertex weight, so some bag balances.
    #[test]
    fn scan_chain(g in subcubic_graph()) {
        let w = WeightSet::default();
        let pd = path_decomposition(&g);
        let total = mu_r(&g, &w, g.vertices());
        let mut seen = vec![false; g.capacity()];
        let mut mu_seen = 0.0;
        let mut diffs = Vec::new();
        for bag in &pd.bags {
            for &v in bag {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    mu_seen += w.r_deg(g.degree(v));
                }
            }
            let mu_bag = mu_r(&g, &w, bag.iter().copied());
            diffs.push((mu_seen - mu_bag) - (total - mu_seen));
        }
        prop_assert!(diffs[0] <= -total + w.r[3] + 1e-9);
        prop_assert!(*diffs.last().unwrap() >= total - w.r[3] - 1e-9);
        for pair in diffs.windows(2) {
            prop_assert!((pair[1] - pair[0]).abs() <= w.r[3] + 1e-9);
        }
        prop_assert!(diffs.iter().any(|d| d.abs() <= w.balance()));
    }

    #[test]
    fn balanced_separations_are_sound(g in subcubic_graph()) {
        let w = WeightSet::default();
        let sep = balanced_separation(&g, &w);
        prop_assert!(sep.is_valid(&g));
        let (l, r) = sep.side_measures(&g, &w);
        prop_assert!((l - r).abs() <= w.balance() + 1e-9);
        for (u, v) in g.edges() {
            let sides = (sep.side(u), sep.side(v));
            prop_assert!(sides != (Side::L, Side::R) && sides != (Side::R, Side::L));
        }
    }
}

#[test]
fn cubic_separators_stay_small() {
    let w = WeightSet::default();
    for seed in 0..10 {
        let g = gen(&format!("random-cubic(60,{seed})"));
        let sep = balanced_separation(&g, &w);
        assert!(sep.is_valid(&g));
        assert!(path_decomposition(&g).width() <= 20, "seed {seed}");
    }
}
