//! Instance sets shared by the benchmarks.

use iscount_core::io::{generate, GraphSpec};
use iscount_core::Graph;

/// Generates `spec`, panicking on a malformed description.
pub fn graph(spec: &str) -> Graph {
    let spec: GraphSpec = spec.parse().expect("graph spec");
    generate(&spec).expect("generator")
}

/// Random cubic graphs of the given orders, one per seed.
pub fn cubic_family(sizes: &[usize], seed: u64) -> Vec<(usize, Graph)> {
    sizes
        .iter()
        .map(|&n| (n, graph(&format!("random-cubic({n},{seed})"))))
        .collect()
}
