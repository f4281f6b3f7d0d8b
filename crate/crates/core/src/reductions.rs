//! Polynomial-time cases and the structural reductions shared by the
//! branching engines.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::SolveError;
use crate::graph::{Graph, Vertex};
use crate::measure::WeightSet;
use crate::separator::{Separation, Side};
use crate::solver::{Engine, SolveOptions, SolveStats};

/// Per-vertex weights `(c_out, c_in)`, indexed by vertex id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalityFunction {
    pairs: Vec<(BigUint, BigUint)>,
}

impl CardinalityFunction {
    /// All pairs `(1, 1)`: plain counting.
    pub fn unit(capacity: usize) -> Self {
        CardinalityFunction {
            pairs: vec![(BigUint::one(), BigUint::one()); capacity],
        }
    }

    pub fn from_pairs(pairs: Vec<(BigUint, BigUint)>) -> Self {
        CardinalityFunction { pairs }
    }

    pub fn capacity(&self) -> usize {
        self.pairs.len()
    }

    pub fn c_out(&self, v: Vertex) -> &BigUint {
        &self.pairs[v as usize].0
    }

    pub fn c_in(&self, v: Vertex) -> &BigUint {
        &self.pairs[v as usize].1
    }

    pub fn set(&mut self, v: Vertex, c_out: BigUint, c_in: BigUint) {
        let v = v as usize;
        if v >= self.pairs.len() {
            self.pairs.resize(v + 1, (BigUint::one(), BigUint::one()));
        }
        self.pairs[v] = (c_out, c_in);
    }

    /// Pads with unit pairs up to `capacity`.
    pub fn extended(&self, capacity: usize) -> Self {
        let mut out = self.clone();
        if out.pairs.len() < capacity {
            out.pairs.resize(capacity, (BigUint::one(), BigUint::one()));
        }
        out
    }

    pub fn is_unit(&self) -> bool {
        self.pairs.iter().all(|(o, i)| o.is_one() && i.is_one())
    }
}

/// Exact count for graphs of maximum degree at most 2, one transfer
/// recurrence per component.
pub fn solve_max_degree_2(g: &Graph, c: &CardinalityFunction) -> Result<BigUint, SolveError> {
    if g.max_degree() > 2 {
        return Err(SolveError::Precondition(format!(
            "maximum degree {} exceeds 2",
            g.max_degree()
        )));
    }
    let mut total = BigUint::one();
    for comp in g.components() {
        total *= component_transfer(g, c, &comp);
        if total.is_zero() {
            break;
        }
    }
    Ok(total)
}

fn component_transfer(g: &Graph, c: &CardinalityFunction, comp: &[Vertex]) -> BigUint {
    if comp.len() == 1 {
        let v = comp[0];
        return c.c_out(v) + c.c_in(v);
    }
    match comp.iter().copied().find(|&v| g.degree(v) == 1) {
        Some(start) => {
            let order = trace(g, start);
            let (out, inn) = run(
                c,
                &order[1..],
                c.c_out(start).clone(),
                c.c_in(start).clone(),
            );
            out + inn
        }
        None => {
            let start = comp[0];
            let order = trace(g, start);
            let rest = &order[1..];
            // start excluded: any state at the end
            let (o1, i1) = run(c, rest, c.c_out(start).clone(), BigUint::zero());
            // start included: the last vertex must be out
            let (o2, _) = run(c, rest, BigUint::zero(), c.c_in(start).clone());
            o1 + i1 + o2
        }
    }
}

/// Vertices of a path or cycle component in walk order from `start`.
fn trace(g: &Graph, start: Vertex) -> Vec<Vertex> {
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = match g.neighbors(start).first() {
        Some(&u) => u,
        None => return order,
    };
    while cur != start {
        order.push(cur);
        let next = g.neighbors(cur).iter().copied().find(|&u| u != prev);
        match next {
            Some(u) => {
                prev = cur;
                cur = u;
            }
            None => break,
        }
    }
    order
}

/// Two-state recurrence: `(last out, last in)` weights.
fn run(
    c: &CardinalityFunction,
    rest: &[Vertex],
    mut out: BigUint,
    mut inn: BigUint,
) -> (BigUint, BigUint) {
    for &v in rest {
        let next_out = (&out + &inn) * c.c_out(v);
        let next_in = out * c.c_in(v);
        out = next_out;
        inn = next_in;
    }
    (out, inn)
}

/// Cut vertices of `g`, sorted by id.
pub fn articulation_points(g: &Graph) -> Vec<Vertex> {
    articulation_points_without(g, None)
}

/// Cut vertices of `g` with `skip` treated as deleted.
fn articulation_points_without(g: &Graph, skip: Option<Vertex>) -> Vec<Vertex> {
    let cap = g.capacity();
    let mut disc = vec![0usize; cap];
    let mut low = vec![0usize; cap];
    let mut is_cut = vec![false; cap];
    let mut time = 0;
    for root in g.vertices() {
        if disc[root as usize] != 0 || Some(root) == skip {
            continue;
        }
        time += 1;
        disc[root as usize] = time;
        low[root as usize] = time;
        let mut root_children = 0;
        // (vertex, parent, next neighbor index)
        let mut stack: Vec<(Vertex, Vertex, usize)> = vec![(root, root, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, parent, idx) = *top;
            let nb = g.neighbors(v);
            if idx < nb.len() {
                top.2 += 1;
                let u = nb[idx];
                if Some(u) == skip || u == parent {
                    continue;
                }
                if disc[u as usize] == 0 {
                    time += 1;
                    disc[u as usize] = time;
                    low[u as usize] = time;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((u, v, 0));
                } else {
                    low[v as usize] = low[v as usize].min(disc[u as usize]);
                }
            } else {
                stack.pop();
                if v != root {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                    if parent != root && low[v as usize] >= disc[parent as usize] {
                        is_cut[parent as usize] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root as usize] = true;
        }
    }
    (0..cap as Vertex).filter(|&v| is_cut[v as usize]).collect()
}

/// A cut vertex `x` with a side `C` of `G − x` such that `G[C ∪ {x}]` has
/// μ_r measure at most `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierHit {
    pub x: Vertex,
    pub side: Vec<Vertex>,
}

/// Components of `g − x` as sorted vertex lists, ordered by smallest id.
fn components_without(g: &Graph, x: Vertex) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; g.capacity()];
    seen[x as usize] = true;
    let mut out = Vec::new();
    for s in g.vertices() {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut comp = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &u in g.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    comp.push(u);
                    q.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// μ_r of `G[side ∪ {x}]` with degrees taken in that subgraph.
fn folded_measure(g: &Graph, x: Vertex, side: &[Vertex], w: &WeightSet) -> f64 {
    let mut inside = vec![false; g.capacity()];
    inside[x as usize] = true;
    for &v in side {
        inside[v as usize] = true;
    }
    let deg = |v: Vertex| {
        g.neighbors(v)
            .iter()
            .filter(|&&u| inside[u as usize])
            .count()
    };
    side.iter()
        .chain(std::iter::once(&x))
        .map(|&v| w.r_deg(deg(v)))
        .sum()
}

/// Scans cut vertices by increasing id and stops at the first one with a
/// component of `G − x` whose fold has measure at most `B`; among those
/// components takes the smallest measure, then the smallest size, then the
/// smallest id.
pub fn find_multiplier(g: &Graph, w: &WeightSet) -> Option<MultiplierHit> {
    let b = w.balance();
    for x in articulation_points(g) {
        let best = components_without(g, x)
            .into_iter()
            .map(|side| (folded_measure(g, x, &side, w), side))
            .filter(|(mu, _)| *mu <= b)
            .min_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite measures")
                    .then(a.1.len().cmp(&b.1.len()))
                    .then(a.1[0].cmp(&b.1[0]))
            });
        if let Some((_, side)) = best {
            return Some(MultiplierHit { x, side });
        }
    }
    None
}

/// Folds `G[side ∪ {x}]` into `c(x)` and returns `G − side`.
///
/// `solve` must return `ind(H, c)` for the subgraphs it is given.
pub fn fold_multiplier(
    g: &Graph,
    c: &mut CardinalityFunction,
    x: Vertex,
    side: &[Vertex],
    mut solve: impl FnMut(&Graph, &CardinalityFunction) -> BigUint,
) -> Graph {
    let mut keep = side.to_vec();
    keep.push(x);
    let g1 = g.induced(&keep);
    let out = solve(&g1.restrict(&[x]), c);
    let mut inn = solve(&g1.restrict(&g1.closed_neighborhood(x)), c);
    for &u in g1.neighbors(x) {
        inn *= c.c_out(u);
    }
    let new_out = c.c_out(x) * out;
    let new_in = c.c_in(x) * inn;
    c.set(x, new_out, new_in);
    g.restrict(side)
}

/// Applies the multiplier reduction for a given cut vertex and side after
/// checking its preconditions. Subgraph counts use the default engine.
pub fn multiplier_reduction(
    g: &Graph,
    sep: &Separation,
    c: &CardinalityFunction,
    x: Vertex,
    side: &[Vertex],
    w: &WeightSet,
) -> Result<(Graph, Separation, CardinalityFunction), SolveError> {
    if !g.contains(x) {
        return Err(SolveError::Precondition(format!("{x} is not a vertex")));
    }
    let mut in_side = vec![false; g.capacity()];
    for &v in side {
        if !g.contains(v) || v == x {
            return Err(SolveError::Precondition(format!("bad side vertex {v}")));
        }
        in_side[v as usize] = true;
    }
    for &v in side {
        if let Some(&u) = g
            .neighbors(v)
            .iter()
            .find(|&&u| u != x && !in_side[u as usize])
        {
            return Err(SolveError::Precondition(format!(
                "edge {v}-{u} leaves the side"
            )));
        }
    }
    let mu = folded_measure(g, x, side, w);
    if mu > w.balance() {
        return Err(SolveError::Precondition(format!(
            "side measure {mu} exceeds {}",
            w.balance()
        )));
    }
    let mut c = c.extended(g.capacity());
    let opts = SolveOptions {
        weights: w.clone(),
        ..SolveOptions::default()
    };
    let engine = Engine::new(&opts);
    let mut stats = SolveStats::default();
    let reduced = fold_multiplier(g, &mut c, x, side, |h, c| {
        engine.count(h, Arc::new(c.clone()), 0, &mut stats)
    });
    let mut sep = sep.clone();
    for &v in side {
        sep.set(v, Side::R);
    }
    Ok((reduced, sep, c))
}

/// A pair `{y, z}` of degree ≥ 3 vertices whose removal leaves `N[x]` in a
/// small component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LazySeparatorHit {
    pub y: Vertex,
    pub z: Vertex,
    /// Vertices of the component of `x` in `G − {y, z}`, sorted.
    pub component: Vec<Vertex>,
}

pub const LAZY_SEARCH_RADIUS: usize = 4;

/// Degree ≥ 3 vertices other than `x` reachable from `x` while entering at
/// most `LAZY_SEARCH_RADIUS` vertices of degree ≥ 3.
fn lazy_candidates(g: &Graph, x: Vertex) -> Vec<Vertex> {
    let mut dist = vec![usize::MAX; g.capacity()];
    dist[x as usize] = 0;
    let mut q = VecDeque::from([x]);
    while let Some(v) = q.pop_front() {
        let d = dist[v as usize];
        for &u in g.neighbors(v) {
            let cost = usize::from(g.degree(u) >= 3);
            let nd = d + cost;
            if nd <= LAZY_SEARCH_RADIUS && nd < dist[u as usize] {
                dist[u as usize] = nd;
                if cost == 0 {
                    q.push_front(u);
                } else {
                    q.push_back(u);
                }
            }
        }
    }
    g.vertices()
        .filter(|&v| v != x && g.degree(v) >= 3 && dist[v as usize] != usize::MAX)
        .collect()
}

/// Component of `x` in `G − {y, z}` with its μ_r measure, if the measure
/// stays within `bound`; `None` as soon as it exceeds it.
fn small_component(
    g: &Graph,
    x: Vertex,
    y: Vertex,
    z: Vertex,
    w: &WeightSet,
    bound: f64,
) -> Option<(Vec<Vertex>, f64)> {
    let mut seen = vec![false; g.capacity()];
    seen[x as usize] = true;
    seen[y as usize] = true;
    seen[z as usize] = true;
    let mut comp = vec![x];
    let mut q = VecDeque::from([x]);
    let mut mu = 0.0;
    while let Some(v) = q.pop_front() {
        let d = g.neighbors(v).iter().filter(|&&u| u != y && u != z).count();
        mu += w.r_deg(d);
        if mu > bound {
            return None;
        }
        for &u in g.neighbors(v) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                comp.push(u);
                q.push_back(u);
            }
        }
    }
    comp.sort_unstable();
    Some((comp, mu))
}

/// Searches pairs `y < z` among the candidates near `x` and returns the one
/// whose component has the smallest measure, then the smallest size, then
/// the first pair. Pairs that cannot disconnect `G − {y, z}` are skipped via
/// the cut vertices of `G − y`.
pub fn find_lazy_2_separator(g: &Graph, x: Vertex, w: &WeightSet) -> Option<LazySeparatorHit> {
    if !g.contains(x) {
        return None;
    }
    let candidates = lazy_candidates(g, x);
    if candidates.len() < 2 {
        return None;
    }
    let n = g.n();
    let mut bound = w.balance();
    let mut best: Option<(f64, LazySeparatorHit)> = None;
    let mut is_cut = vec![false; g.capacity()];
    for (i, &y) in candidates.iter().enumerate() {
        let cuts = articulation_points_without(g, Some(y));
        let y_disconnects = !connected_without(g, y);
        for &v in &cuts {
            is_cut[v as usize] = true;
        }
        for &z in &candidates[i + 1..] {
            if !y_disconnects && !is_cut[z as usize] {
                continue;
            }
            let Some((component, mu)) = small_component(g, x, y, z, w, bound) else {
                continue;
            };
            if component.len() >= n - 2 {
                continue;
            }
            let better = match &best {
                None => true,
                Some((m, h)) => {
                    mu < *m - 1e-12 || (mu <= *m + 1e-12 && component.len() < h.component.len())
                }
            };
            if better {
                bound = mu + 1e-9;
                best = Some((mu, LazySeparatorHit { y, z, component }));
            }
        }
        for &v in &cuts {
            is_cut[v as usize] = false;
        }
    }
    best.map(|(_, h)| h)
}

fn connected_without(g: &Graph, y: Vertex) -> bool {
    let start = match g.vertices().find(|&v| v != y) {
        Some(v) => v,
        None => return true,
    };
    let mut seen = vec![false; g.capacity()];
    seen[y as usize] = true;
    seen[start as usize] = true;
    let mut count = 1;
    let mut q = VecDeque::from([start]);
    while let Some(v) = q.pop_front() {
        for &u in g.neighbors(v) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                count += 1;
                q.push_back(u);
            }
        }
    }
    count == g.n() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{generate, GraphSpec};

    fn gen(s: &str) -> Graph {
        generate(&s.parse::<GraphSpec>().unwrap()).unwrap()
    }

    #[test]
    fn transfer_fixtures() {
        let mut c = CardinalityFunction::unit(1);
        c.set(0, BigUint::from(2u32), BigUint::from(3u32));
        assert_eq!(
            solve_max_degree_2(&Graph::empty(1), &c).unwrap(),
            BigUint::from(5u32)
        );
        let unit = CardinalityFunction::unit(8);
        assert_eq!(
            solve_max_degree_2(&gen("path(3)"), &unit).unwrap(),
            BigUint::from(5u32)
        );
        assert_eq!(
            solve_max_degree_2(&gen("cycle(5)"), &unit).unwrap(),
            BigUint::from(11u32)
        );
        assert!(solve_max_degree_2(&gen("complete(4)"), &unit).is_err());
    }

    #[test]
    fn cut_vertices() {
        assert_eq!(articulation_points(&gen("path(4)")), vec![1, 2]);
        assert!(articulation_points(&gen("cycle(5)")).is_empty());
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        assert_eq!(articulation_points(&g), vec![2, 3]);
    }

    #[test]
    fn triangle_with_pendant() {
        // a=0, b=1, x=2, y=3
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        let c = CardinalityFunction::unit(4);
        let w = WeightSet::default();
        let (h, _, c2) =
            multiplier_reduction(&g, &Separation::trivial(4), &c, 2, &[0, 1], &w).unwrap();
        assert_eq!(c2.c_out(2), &BigUint::from(3u32));
        assert_eq!(c2.c_in(2), &BigUint::from(1u32));
        assert_eq!(h.n(), 2);
        // x out: 3·2, x in: 1·1
        let total = c2.c_out(2) * BigUint::from(2u32) + c2.c_in(2) * c2.c_out(3);
        assert_eq!(total, BigUint::from(7u32));
    }

    #[test]
    fn lazy_separator_fixtures() {
        let w = WeightSet::default();
        let theta = gen("theta(2,2,2)");
        let hit = find_lazy_2_separator(&theta, 2, &w).unwrap();
        assert_eq!((hit.y, hit.z), (0, 1));
        for x in 0..4 {
            assert!(find_lazy_2_separator(&gen("complete(4)"), x, &w).is_none());
        }
        for x in 0..6 {
            assert!(find_lazy_2_separator(&gen("path(6)"), x, &w).is_none());
        }
    }
}
