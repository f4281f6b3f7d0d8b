#![allow(dead_code)]

use iscount_core::io::{generate, GraphSpec, Subdivision};
use iscount_core::{Graph, Separation, Side, Vertex};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn gen(s: &str) -> Graph {
    generate(&s.parse::<GraphSpec>().unwrap()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sides, then the R endpoint of every L–R edge goes to S.
pub fn random_separation(g: &Graph, rng: &mut impl Rng) -> Separation {
    let mut sides: Vec<Side> = (0..g.capacity())
        .map(|_| if rng.gen_bool(0.5) { Side::L } else { Side::R })
        .collect();
    for (u, v) in g.edges() {
        let (a, b) = (sides[u as usize], sides[v as usize]);
        if a == Side::L && b == Side::R {
            sides[v as usize] = Side::S;
        } else if a == Side::R && b == Side::L {
            sides[u as usize] = Side::S;
        }
    }
    Separation::from_sides(sides)
}

pub fn random_subcubic(n: usize, k: usize, seed: u64) -> Graph {
    generate(&GraphSpec::RandomSubcubic {
        n,
        subdivision: Subdivision::Edges(k),
        seed,
    })
    .unwrap()
}

pub fn random_no333(n: usize, seed: u64) -> Graph {
    generate(&GraphSpec::RandomSubcubic {
        n,
        subdivision: Subdivision::NoThreeThreeThree,
        seed,
    })
    .unwrap()
}

pub fn fib(n: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::from(0u32), BigUint::from(1u32));
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

pub fn lucas(n: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::from(2u32), BigUint::from(1u32));
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

pub fn vertices(g: &Graph) -> Vec<Vertex> {
    g.vertices().collect()
}

/// Graphs on up to `max_n` vertices with independent edge coin flips.
pub fn arb_graph(max_n: usize) -> impl proptest::strategy::Strategy<Value = Graph> {
    use proptest::prelude::*;
    (0..=max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2),
            )
        })
        .prop_map(|(n, bits)| {
            let mut g = Graph::empty(n);
            let mut k = 0;
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    if bits[k] {
                        g.add_edge(u, v).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
}

/// Random `c` with both values in `0..=max`.
pub fn random_cardinality(
    g: &Graph,
    max: u32,
    rng: &mut impl Rng,
) -> iscount_core::CardinalityFunction {
    let mut c = iscount_core::CardinalityFunction::unit(g.capacity());
    for v in g.vertices() {
        c.set(
            v,
            BigUint::from(rng.gen_range(0..=max)),
            BigUint::from(rng.gen_range(0..=max)),
        );
    }
    c
}
