mod common;

use common::*;
use iscount_core::graph::skeleton;
use iscount_core::io::{parse_dimacs, parse_edge_list, parse_graph, to_dimacs};
use iscount_core::{Graph, ParseError, Vertex};
use proptest::prelude::*;

fn same_adjacency(a: &Graph, b: &Graph) -> bool {
    a.n() == b.n() && a.edges() == b.edges()
}

proptest! {
    #[test]
    fn restrict_keeps_audit(g in arb_graph(14), picks in proptest::collection::vec(any::<bool>(), 14)) {
        let removed: Vec<Vertex> = g.vertices().filter(|&v| picks[v as usize]).collect();
        let h = g.restrict(&removed);
        h.audit().unwrap();
        prop_assert_eq!(h.n(), g.n() - removed.len());
        for (u, v) in h.edges() {
            prop_assert!(g.has_edge(u, v));
        }
    }

    #[test]
    fn components_partition(g in arb_graph(14)) {
        let comps = g.components();
        let mut owner = vec![usize::MAX; g.capacity()];
        for (i, comp) in comps.iter().enumerate() {
            for &v in comp {
                prop_assert_eq!(owner[v as usize], usize::MAX);
                owner[v as usize] = i;
            }
        }
        for v in g.vertices() {
            prop_assert!(owner[v as usize] != usize::MAX);
        }
        for (u, v) in g.edges() {
            prop_assert_eq!(owner[u as usize], owner[v as usize]);
        }
    }

    #[test]
    fn dimacs_round_trip(g in arb_graph(14)) {
        let h = parse_dimacs(&to_dimacs(&g)).unwrap();
        prop_assert!(same_adjacency(&g, &h));
        let again = parse_graph(to_dimacs(&h).as_bytes()).unwrap();
        prop_assert!(same_adjacency(&h, &again));
    }

    #[test]
    fn generated_graphs_pass_audit(n in 1usize..30, seed in 0u64..1000, p in 0.0f64..1.0) {
        gen(&format!("gnp({n},{p},{seed})")).audit().unwrap();
        let cubic = gen(&format!("random-cubic({},{seed})", 2 * (n / 2 + 2)));
        cubic.audit().unwrap();
        prop_assert!(cubic.vertices().all(|v| cubic.degree(v) == 3));
        let sub = random_subcubic(2 * (n / 2 + 2), n % 5, seed);
        sub.audit().unwrap();
        prop_assert!(sub.max_degree() <= 3);
        let no333 = random_no333(2 * (n / 2 + 2), seed);
        no333.audit().unwrap();
        prop_assert!(!no333.has_333_vertex());
    }

    #[test]
    fn skeleton_reexpands(n in 2usize..12, k in 0usize..8, seed in 0u64..500) {
        let g = random_subcubic(2 * n, k.min(3 * n), seed);
        let sk = skeleton(&g).unwrap();
        prop_assert_eq!(sk.nodes.len(), g.vertices().filter(|&v| g.degree(v) == 3).count());
        let mut rebuilt = Graph::empty(g.capacity());
        for e in &sk.edges {
            let mut path = vec![e.u];
            path.extend(&e.interior);
            path.push(e.v);
            for w in path.windows(2) {
                if !rebuilt.has_edge(w[0], w[1]) {
                    rebuilt.add_edge(w[0], w[1]).unwrap();
                }
            }
        }
        prop_assert_eq!(rebuilt.edges(), g.edges());
    }
}

#[test]
fn edge_list_is_zero_based() {
    let g = parse_edge_list("# triangle\n3 3\n0 1\n1 2\n2 0\n").unwrap();
    assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    let d = parse_graph(b"c tri\np edge 3 3\ne 1 2\ne 2 3\ne 3 1\n").unwrap();
    assert!(same_adjacency(&g, &d));
}

#[test]
fn parse_errors_name_the_line() {
    assert!(matches!(
        parse_edge_list("2 1\n0 2\n"),
        Err(ParseError::IndexOutOfRange { line: 2, .. })
    ));
    assert!(matches!(
        parse_edge_list("2 1\n1 1\n"),
        Err(ParseError::SelfLoop { line: 2, .. })
    ));
    assert!(matches!(
        parse_dimacs("p edge 3 2\ne 1 2\ne 2 1\n"),
        Err(ParseError::DuplicateEdge { line: 3, .. })
    ));
    assert!(matches!(
        parse_edge_list("3 2\n0 1\n"),
        Err(ParseError::EdgeCountMismatch { .. })
    ));
    assert!(parse_graph(&[0xff, 0xfe]).is_err());
}

#[test]
fn named_specs_round_trip_through_display() {
    for s in [
        "petersen",
        "path(5)",
        "cycle(7)",
        "complete(4)",
        "theta(1,2,3)",
        "gnp(10,0.3,4)",
        "random-cubic(12,3)",
        "random-subcubic(12,2,3)",
        "random-subcubic-no333(12,3)",
    ] {
        let spec: iscount_core::GraphSpec = s.parse().unwrap();
        assert_eq!(spec.to_string(), s);
    }
    assert!("nonsense(3)".parse::<iscount_core::GraphSpec>().is_err());
}
