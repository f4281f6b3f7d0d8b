//! Simple undirected graphs with stable vertex ids.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::GraphError;

pub type Vertex = u32;

/// Simple undirected graph over ids `0..capacity`.
///
/// Removing vertices marks them dead; ids are never reused, so separations
/// and cardinality functions keyed by id stay valid across recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    alive: Vec<bool>,
    n: usize,
    m: usize,
}

impl Graph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            alive: vec![true; n],
            n,
            m: 0,
        }
    }

    /// Builds a graph on `0..n`; rejects self-loops, parallel edges and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        let cap = self.capacity() as Vertex;
        if u >= cap || v >= cap {
            return Err(GraphError::VertexOutOfRange(u.max(v)));
        }
        if !self.alive[u as usize] || !self.alive[v as usize] {
            return Err(GraphError::DeadVertex(if self.alive[u as usize] {
                v
            } else {
                u
            }));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let au = &mut self.adj[u as usize];
        match au.binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u, v)),
            Err(pos) => au.insert(pos, v),
        }
        let av = &mut self.adj[v as usize];
        let pos = av.binary_search(&u).unwrap_err();
        av.insert(pos, u);
        self.m += 1;
        Ok(())
    }

    /// Number of ids ever allocated (live or dead).
    pub fn capacity(&self) -> usize {
        self.adj.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (v as usize) < self.alive.len() && self.alive[v as usize]
    }

    /// Live vertices in increasing id order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, a)| **a)
            .map(|(i, _)| i as Vertex)
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m);
        for u in self.vertices() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// `d(G) = 2m/n` as an exact rational.
    pub fn average_degree(&self) -> Result<Rational64, GraphError> {
        if self.n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        Ok(Rational64::new(2 * self.m as i64, self.n as i64))
    }

    /// Induced subgraph on the live vertices not in `removed`.
    pub fn restrict(&self, removed: &[Vertex]) -> Graph {
        let mut gone = vec![false; self.capacity()];
        for &v in removed {
            if self.contains(v) {
                gone[v as usize] = true;
            }
        }
        self.restrict_mask(&gone)
    }

    /// Like [`Graph::restrict`] with a dense removal mask indexed by id.
    pub fn restrict_mask(&self, gone: &[bool]) -> Graph {
        let cap = self.capacity();
        let mut adj = vec![Vec::new(); cap];
        let mut alive = vec![false; cap];
        let mut n = 0;
        let mut deg_sum = 0;
        for v in self.vertices() {
            if gone[v as usize] {
                continue;
            }
            alive[v as usize] = true;
            n += 1;
            let list: Vec<Vertex> = self.adj[v as usize]
                .iter()
                .copied()
                .filter(|&u| !gone[u as usize])
                .collect();
            deg_sum += list.len();
            adj[v as usize] = list;
        }
        Graph {
            adj,
            alive,
            n,
            m: deg_sum / 2,
        }
    }

    /// Induced subgraph on `keep` (ids outside `keep` become dead).
    pub fn induced(&self, keep: &[Vertex]) -> Graph {
        let mut gone = vec![true; self.capacity()];
        for &v in keep {
            if self.contains(v) {
                gone[v as usize] = false;
            }
        }
        self.restrict_mask(&gone)
    }

    /// Closed neighborhood `N[v]`, sorted.
    pub fn closed_neighborhood(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = self.adj[v as usize].clone();
        let pos = out.binary_search(&v).unwrap_err();
        out.insert(pos, v);
        out
    }

    /// Connected components ordered by smallest contained id; each sorted.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.capacity()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in self.vertices() {
            if seen[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &u in self.neighbors(v) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let Some(s) = self.vertices().next() else {
            return true;
        };
        let mut seen = vec![false; self.capacity()];
        seen[s as usize] = true;
        let mut stack = vec![s];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in self.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Structural audit: symmetric, simple, sorted adjacency over live ids and
    /// consistent vertex/edge counts.
    pub fn audit(&self) -> Result<(), GraphError> {
        let mut n = 0;
        let mut deg_sum = 0;
        for v in 0..self.capacity() as Vertex {
            let list = &self.adj[v as usize];
            if !self.alive[v as usize] {
                if !list.is_empty() {
                    return Err(GraphError::Corrupt(format!(
                        "dead vertex {v} has neighbors"
                    )));
                }
                continue;
            }
            n += 1;
            deg_sum += list.len();
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return Err(GraphError::Corrupt(format!(
                        "adjacency of {v} not strictly sorted"
                    )));
                }
            }
            for &u in list {
                if u == v {
                    return Err(GraphError::SelfLoop(v));
                }
                if !self.contains(u) {
                    return Err(GraphError::Corrupt(format!("{v} adjacent to dead {u}")));
                }
                if !self.has_edge(u, v) {
                    return Err(GraphError::Corrupt(format!("edge {v}-{u} not symmetric")));
                }
            }
        }
        if n != self.n || deg_sum != 2 * self.m {
            return Err(GraphError::Corrupt("vertex or edge count mismatch".into()));
        }
        Ok(())
    }

    /// True when `v` has degree 3 and all three neighbors have degree 3.
    pub fn is_333(&self, v: Vertex) -> bool {
        self.degree(v) == 3 && self.neighbors(v).iter().all(|&u| self.degree(u) == 3)
    }

    pub fn has_333_vertex(&self) -> bool {
        self.vertices().any(|v| self.is_333(v))
    }

    /// Sorted degrees of the neighbors of `v`.
    pub fn neighbor_degrees(&self, v: Vertex) -> Vec<usize> {
        let mut d: Vec<usize> = self.neighbors(v).iter().map(|&u| self.degree(u)).collect();
        d.sort_unstable();
        d
    }

    /// True when `v` has degree 3 and all neighbors have degree 2.
    pub fn is_222(&self, v: Vertex) -> bool {
        self.degree(v) == 3 && self.neighbors(v).iter().all(|&u| self.degree(u) == 2)
    }

    /// Relabels vertex `v` as `perm[v]`; `perm` must be a permutation of
    /// `0..capacity` and the graph must have no dead ids.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Graph, GraphError> {
        if perm.len() != self.capacity() || self.n != self.capacity() {
            return Err(GraphError::Corrupt(
                "relabel needs a full permutation".into(),
            ));
        }
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(u, v)| (perm[u as usize], perm[v as usize]))
            .collect();
        Graph::from_edges(self.capacity(), &edges)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.capacity()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.capacity() as Vertex;
        let mut g = self.clone();
        g.adj.extend(
            other
                .adj
                .iter()
                .map(|list| list.iter().map(|&u| u + shift).collect::<Vec<_>>()),
        );
        g.alive.extend_from_slice(&other.alive);
        g.n += other.n;
        g.m += other.m;
        g
    }
}

/// Walk from `from` through its neighbor `first` along degree-2 vertices.
///
/// Stops at the first vertex that is `from` itself, has degree other than 2,
/// or satisfies `stop`. Returns the interior degree-2 vertices in walk order
/// and the end vertex.
pub fn walk_arm(
    g: &Graph,
    from: Vertex,
    first: Vertex,
    stop: impl Fn(Vertex) -> bool,
) -> (Vec<Vertex>, Vertex) {
    let mut interior = Vec::new();
    let mut prev = from;
    let mut cur = first;
    loop {
        if cur == from || g.degree(cur) != 2 || stop(cur) {
            return (interior, cur);
        }
        interior.push(cur);
        let nb = g.neighbors(cur);
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
    }
}

/// One arm of a vertex: the maximal degree-2 chain leaving it through one
/// neighbor, together with the vertex where the chain ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arm {
    pub first: Vertex,
    pub interior: Vec<Vertex>,
    pub end: Vertex,
}

/// Arms of `v`, one per neighbor, in neighbor order.
pub fn arms(g: &Graph, v: Vertex) -> Vec<Arm> {
    g.neighbors(v)
        .iter()
        .map(|&u| {
            let (interior, end) = walk_arm(g, v, u, |_| false);
            Arm {
                first: u,
                interior,
                end,
            }
        })
        .collect()
}

/// Skeleton neighbors `N_Γ(v)`: degree-3 ends of the arms of `v`, other than
/// `v` itself, sorted and deduplicated.
pub fn skeleton_neighbors(g: &Graph, v: Vertex) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = arms(g, v)
        .into_iter()
        .map(|a| a.end)
        .filter(|&e| e != v && g.degree(e) == 3)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkeletonEdge {
    pub u: Vertex,
    pub v: Vertex,
    /// Interior degree-2 vertices ordered from `u` to `v`.
    pub interior: Vec<Vertex>,
}

/// Skeleton graph of a subcubic graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkeletonGraph {
    pub nodes: Vec<Vertex>,
    /// One entry per direct edge or 2-path between degree-3 vertices,
    /// self-loops included; parallel entries are kept.
    pub edges: Vec<SkeletonEdge>,
}

impl SkeletonGraph {
    /// Neighbor set of a node, without self-loops.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.u == v && e.v != v {
                    Some(e.v)
                } else if e.v == v && e.u != v {
                    Some(e.u)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn self_loops(&self) -> impl Iterator<Item = &SkeletonEdge> {
        self.edges.iter().filter(|e| e.u == e.v)
    }
}

/// Builds the skeleton graph. Degree-2 chains ending in a vertex of degree
/// at most 1 and pure degree-2 cycles are not skeleton edges.
pub fn skeleton(g: &Graph) -> Result<SkeletonGraph, GraphError> {
    if g.max_degree() > 3 {
        return Err(GraphError::NotSubcubic);
    }
    let nodes: Vec<Vertex> = g.vertices().filter(|&v| g.degree(v) == 3).collect();
    let mut used = vec![false; g.capacity()];
    let mut edges = Vec::new();
    for &u in &nodes {
        for &first in g.neighbors(u) {
            let (interior, end) = walk_arm(g, u, first, |_| false);
            if g.degree(end) != 3 {
                continue;
            }
            if interior.is_empty() {
                if u < end {
                    edges.push(SkeletonEdge {
                        u,
                        v: end,
                        interior,
                    });
                }
                continue;
            }
            if used[interior[0] as usize] {
                continue;
            }
            for &w in &interior {
                used[w as usize] = true;
            }
            edges.push(SkeletonEdge {
                u,
                v: end,
                interior,
            });
        }
    }
    Ok(SkeletonGraph { nodes, edges })
}

/// Associated average degree score of a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexScore {
    pub alpha: u32,
    pub beta: BigRational,
    pub score: BigRational,
}

/// `α(x) = d(x) + |{y ∈ N(x) : d(y) < k}|` and
/// `β(x) = 1 + Σ 1/d(y)` over the same neighbors, with `k = d(G)`.
pub fn associated_average_degree(g: &Graph, x: Vertex) -> Result<VertexScore, GraphError> {
    if !g.contains(x) {
        return Err(GraphError::NotAVertex(x));
    }
    let two_m = 2 * g.m() as u64;
    let n = g.n() as u64;
    let mut alpha = g.degree(x) as u32;
    let mut beta = BigRational::one();
    for &y in g.neighbors(x) {
        let dy = g.degree(y) as u64;
        // d(y) < 2m/n  <=>  d(y)·n < 2m
        if dy * n < two_m {
            alpha += 1;
            beta += BigRational::new(BigInt::one(), BigInt::from(dy));
        }
    }
    debug_assert!(!beta.is_zero());
    let score = BigRational::from_integer(BigInt::from(alpha)) / &beta;
    Ok(VertexScore { alpha, beta, score })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n as usize, &e).unwrap()
    }

    fn path(n: u32) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n as usize, &e).unwrap()
    }

    fn complete(n: u32) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Graph::from_edges(n as usize, &e).unwrap()
    }

    #[test]
    fn average_degree_examples() {
        assert_eq!(
            complete(4).average_degree().unwrap(),
            Rational64::from_integer(3)
        );
        assert_eq!(
            cycle(5).average_degree().unwrap(),
            Rational64::from_integer(2)
        );
        assert_eq!(path(4).average_degree().unwrap(), Rational64::new(3, 2));
        assert_eq!(
            Graph::empty(0).average_degree(),
            Err(GraphError::EmptyGraph)
        );
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            Graph::from_edges(2, &[(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            Graph::from_edges(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(1, 0))
        );
        assert_eq!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange(2))
        );
    }

    #[test]
    fn restrict_examples() {
        let k3 = complete(3).restrict(&[0]);
        assert_eq!((k3.n(), k3.m()), (2, 1));
        k3.audit().unwrap();
        let c5 = cycle(5);
        let p2 = c5.restrict(&c5.closed_neighborhood(0));
        assert_eq!((p2.n(), p2.m()), (2, 1));
        assert!(p2.has_edge(2, 3));
        assert_eq!(c5.restrict(&[]), c5);
    }

    #[test]
    fn components_examples() {
        let two = complete(3).disjoint_union(&complete(3));
        let comps = two.components();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(Graph::empty(0).components().is_empty());
        assert!(!two.is_connected());
    }

    #[test]
    fn skeleton_of_subdivided_edge() {
        // two triangles-with-tails joined through b = 6
        let g = Graph::from_edges(
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (0, 6),
                (6, 3),
                (3, 4),
                (4, 5),
                (5, 3),
                (1, 5),
                (2, 4),
            ],
        )
        .unwrap();
        let sk = skeleton(&g).unwrap();
        assert_eq!(sk.nodes.len(), 6);
        let e = sk.edges.iter().find(|e| e.interior == vec![6]).unwrap();
        assert_eq!((e.u.min(e.v), e.u.max(e.v)), (0, 3));
        assert!(skeleton(&cycle(6)).unwrap().edges.is_empty());
        assert_eq!(skeleton(&complete(5)), Err(GraphError::NotSubcubic));
    }

    #[test]
    fn scores() {
        // x = 0 with neighbors of degree (2,2,3) inside a graph with d(G) = 8/3 is
        // covered in the integration tests; here a hand-made star check.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = associated_average_degree(&g, 0).unwrap();
        // k = 6/4, leaves have degree 1 < k
        assert_eq!(s.alpha, 6);
        assert_eq!(s.beta, BigRational::from_integer(BigInt::from(4)));
    }
}
