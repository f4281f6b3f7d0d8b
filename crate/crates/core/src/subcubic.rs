//! #3IS for subcubic graphs without (3,3,3) vertices: separator upkeep,
//! the simplify rules and spider handling.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::SolveError;
use crate::graph::{arms, skeleton_neighbors, walk_arm, Graph, Vertex};
use crate::measure::WeightSet;
use crate::reductions::{find_lazy_2_separator, find_multiplier, CardinalityFunction};
use crate::separator::{balanced_separation, Separation, Side};
use crate::solver::{
    best_vertex, select_branch_vertex, Engine, Instance, Mode, Rule, SolveOptions, SolveStats, Step,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpiderKind {
    Left,
    Right,
    CenterPair,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpiderClassification {
    pub kind: SpiderKind,
    /// The other member of a center pair.
    pub partner: Option<Vertex>,
    /// The member of a center pair carrying the spider weight.
    pub weight_bearer: Option<Vertex>,
}

impl SpiderClassification {
    fn none() -> Self {
        SpiderClassification {
            kind: SpiderKind::None,
            partner: None,
            weight_bearer: None,
        }
    }
}

fn on_side(sep: &Separation, side: Side) -> impl Fn(&Vertex) -> bool + '_ {
    move |&v| sep.side(v) == side
}

fn skeleton_on(g: &Graph, sep: &Separation, v: Vertex, side: Side) -> Vec<Vertex> {
    skeleton_neighbors(g, v)
        .into_iter()
        .filter(on_side(sep, side))
        .collect()
}

fn neighbors_on(g: &Graph, sep: &Separation, v: Vertex, side: Side) -> Vec<Vertex> {
    g.neighbors(v)
        .iter()
        .copied()
        .filter(on_side(sep, side))
        .collect()
}

pub fn classify_spider(g: &Graph, sep: &Separation, s: Vertex) -> SpiderClassification {
    if !g.contains(s) || sep.side(s) != Side::S || !g.is_222(s) {
        return SpiderClassification::none();
    }
    let l = skeleton_on(g, sep, s, Side::L);
    let r = skeleton_on(g, sep, s, Side::R);
    let sk = skeleton_on(g, sep, s, Side::S);
    let single = |kind| SpiderClassification {
        kind,
        partner: None,
        weight_bearer: None,
    };
    if l.len() == 2 && r.len() == 1 && g.is_222(r[0]) {
        return single(SpiderKind::Left);
    }
    if r.len() == 2 && l.len() == 1 && g.is_222(l[0]) {
        return single(SpiderKind::Right);
    }
    if l.len() == 1 && r.len() == 1 && sk.len() == 1 && g.is_222(sk[0]) {
        let partner = sk[0];
        return SpiderClassification {
            kind: SpiderKind::CenterPair,
            partner: Some(partner),
            weight_bearer: Some(s.min(partner)),
        };
    }
    SpiderClassification::none()
}

/// Separator vertices carrying the spider weight: left and right spiders and
/// the weight bearer of each center pair.
pub fn spider_weight_bearers(g: &Graph, sep: &Separation) -> Vec<Vertex> {
    sep.separator(g)
        .into_iter()
        .filter(|&s| {
            let c = classify_spider(g, sep, s);
            match c.kind {
                SpiderKind::Left | SpiderKind::Right => true,
                SpiderKind::CenterPair => c.weight_bearer == Some(s),
                SpiderKind::None => false,
            }
        })
        .collect()
}

/// `μ_r(R) − μ_r(L) ≤ 2B`.
fn balanced(g: &Graph, sep: &Separation, w: &WeightSet) -> bool {
    let (l, r) = sep.side_measures(g, w);
    r - l <= 2.0 * w.balance()
}

fn other(side: Side) -> Side {
    match side {
        Side::L => Side::R,
        Side::R => Side::L,
        Side::S => Side::S,
    }
}

/// Moves `s` together with its skeleton-isolated neighborhood on side
/// `from` to the other side. Separator ends of the dragged neighbors' arms
/// stay in S.
fn drag_skeleton(g: &Graph, sep: &mut Separation, s: Vertex, from: Side) {
    let to = other(from);
    let mut moved = vec![s];
    for arm in arms(g, s) {
        if sep.side(arm.first) != from {
            continue;
        }
        moved.extend_from_slice(&arm.interior);
        let e = arm.end;
        if e == s || sep.side(e) != from {
            continue;
        }
        moved.push(e);
        if g.degree(e) == 3 {
            for arm2 in arms(g, e) {
                if sep.side(arm2.first) != from {
                    continue;
                }
                moved.extend_from_slice(&arm2.interior);
                let f = arm2.end;
                if f != e && f != s && sep.side(f) == from && g.degree(f) <= 1 {
                    moved.push(f);
                }
            }
        }
    }
    for v in moved {
        sep.set(v, to);
    }
}

fn has_good_skeleton_neighbor(g: &Graph, sep: &Separation, s: Vertex, side: Side) -> bool {
    skeleton_on(g, sep, s, side)
        .into_iter()
        .any(|t| !skeleton_on(g, sep, t, side).is_empty())
}

/// One rule application in box order; `None` at the fixpoint.
fn simplify_once(g: &Graph, sep: &mut Separation, w: &WeightSet) -> Option<Rule> {
    let seps = sep.separator(g);
    for &s in &seps {
        if neighbors_on(g, sep, s, Side::L).is_empty() {
            sep.set(s, Side::R);
            return Some(Rule::SimplifyNoLeft);
        }
    }
    for &s in &seps {
        if neighbors_on(g, sep, s, Side::R).is_empty() {
            sep.set(s, Side::L);
            return Some(Rule::SimplifyNoRight);
        }
    }
    if let Some(&s) = seps.iter().find(|&&s| g.degree(s) == 2) {
        let (toward, dest) = if balanced_abs(g, sep, w) {
            (Side::L, Side::R)
        } else {
            (Side::R, Side::L)
        };
        let first = neighbors_on(g, sep, s, toward)[0];
        let (path, end) = walk_arm(g, s, first, |v| sep.side(v) == Side::S);
        for v in path {
            sep.set(v, dest);
        }
        sep.set(s, dest);
        sep.set(end, Side::S);
        return Some(Rule::SimplifyDegreeTwo);
    }
    for &s in &seps {
        if !has_good_skeleton_neighbor(g, sep, s, Side::L) {
            drag_skeleton(g, sep, s, Side::L);
            return Some(Rule::SimplifySkeletonLeft);
        }
    }
    for &s in &seps {
        if !has_good_skeleton_neighbor(g, sep, s, Side::R) {
            drag_skeleton(g, sep, s, Side::R);
            return Some(Rule::SimplifySkeletonRight);
        }
    }
    None
}

/// `|μ_r(R) − μ_r(L)| ≤ 2B`.
fn balanced_abs(g: &Graph, sep: &Separation, w: &WeightSet) -> bool {
    let (l, r) = sep.side_measures(g, w);
    (r - l).abs() <= 2.0 * w.balance()
}

/// Applies the simplification rules to a fixpoint.
pub fn simplify(g: &Graph, sep: &Separation, w: &WeightSet) -> Separation {
    let mut sep = sep.clone();
    let mut stats = SolveStats::default();
    simplify_in_place(g, &mut sep, w, &mut stats, false);
    sep
}

fn simplify_in_place(
    g: &Graph,
    sep: &mut Separation,
    w: &WeightSet,
    stats: &mut SolveStats,
    audit: bool,
) -> u64 {
    let mut firings = 0u64;
    while let Some(rule) = simplify_once(g, sep, w) {
        stats.fire(rule);
        firings += 1;
        if audit {
            stats.audit.separator_checks += 1;
            if !sep.is_valid(g) {
                stats.audit.separator_violations += 1;
            }
        }
    }
    if audit {
        let n = g.n() as u64;
        stats.audit.simplify_calls += 1;
        stats.audit.max_simplify_firings = stats.audit.max_simplify_firings.max(firings);
        if firings > n * n {
            stats.audit.simplify_bound_violations += 1;
        }
        stats.audit.anchor_checks += 1;
        if !anchors_hold(g, sep) {
            stats.audit.anchor_violations += 1;
        }
    }
    firings
}

/// Every separator vertex has degree 3 and a skeleton neighbor on each side
/// that itself has a skeleton neighbor on that side.
pub fn anchors_hold(g: &Graph, sep: &Separation) -> bool {
    sep.separator(g).into_iter().all(|s| {
        g.degree(s) == 3
            && has_good_skeleton_neighbor(g, sep, s, Side::L)
            && has_good_skeleton_neighbor(g, sep, s, Side::R)
    })
}

fn record_fresh(g: &Graph, sep: &Separation, stats: &mut SolveStats) {
    stats.fire(Rule::SeparatorRecomputation);
    stats.record_separator(sep.separator(g).len());
}

pub(crate) fn three_is_step(engine: &Engine<'_>, inst: Instance, stats: &mut SolveStats) -> Step {
    let w = engine.weights();
    let audit = engine.opts.audit;
    let Instance { g, c, mut sep } = inst;
    if g.n() <= 2 || g.max_degree() <= 2 || !g.is_connected() {
        stats.fire(Rule::ThreeIsHandback);
        return Step::Handoff(Instance { g, c, sep }, Mode::Is);
    }
    let mut fresh = false;
    if sep.separator_is_empty(&g) {
        sep = balanced_separation(&g, w);
        fresh = true;
        record_fresh(&g, &sep, stats);
    }
    let (ml, mr) = sep.side_measures(&g, w);
    if ml > mr {
        sep.swap_sides();
    }
    simplify_in_place(&g, &mut sep, w, stats, audit);
    let inst = Instance { g, c, sep };
    engine.audit_separation(&inst, stats);
    let g = &inst.g;
    if inst.sep.separator_is_empty(g) {
        if fresh {
            stats.fire(Rule::EmptySeparatorFallback);
            let v = select_branch_vertex(g).expect("non-empty graph");
            return Step::Branch(inst, v, Mode::ThreeIs);
        }
        return Step::Handoff(inst, Mode::ThreeIs);
    }
    let s = best_vertex(g, inst.sep.separator(g)).expect("non-empty separator");
    if let Some(hit) = find_multiplier(g, w) {
        stats.fire(Rule::ThreeIsMultiplier);
        return Step::Multiplier(inst, hit, Mode::ThreeIs);
    }
    if let Some(hit) = find_lazy_2_separator(g, s, w) {
        stats.fire(Rule::ThreeIsLazySeparator);
        return Step::Branch(inst, hit.y, Mode::ThreeIs);
    }
    let sep = &inst.sep;
    if balanced(g, sep, w) {
        if g.is_222(s) {
            stats.fire(Rule::SpiderDispatch);
            return Step::Handoff(inst, Mode::Spider(s));
        }
    } else {
        let left = neighbors_on(g, sep, s, Side::L);
        let right = neighbors_on(g, sep, s, Side::R);
        if left.len() == 2 && right.len() == 1 {
            let (path, r2) = walk_arm(g, s, right[0], |v| sep.side(v) == Side::S);
            if r2 != s {
                let mut inst = inst;
                for v in path {
                    inst.sep.set(v, Side::L);
                }
                inst.sep.set(s, Side::L);
                inst.sep.set(r2, Side::S);
                engine.audit_separation(&inst, stats);
                stats.fire(Rule::ImbalancedDrag);
                return Step::Handoff(inst, Mode::Is);
            }
        }
        let rs = skeleton_on(g, sep, s, Side::R);
        if rs.len() == 2 {
            let bad: Vec<bool> = rs
                .iter()
                .map(|&r| skeleton_on(g, sep, r, Side::R).is_empty())
                .collect();
            let target = match (bad[0], bad[1]) {
                (true, false) => Some(rs[1]),
                (false, true) => Some(rs[0]),
                (true, true) => {
                    let d0 = skeleton_neighbors(g, rs[0]).len();
                    let d1 = skeleton_neighbors(g, rs[1]).len();
                    Some(if d1 > d0 { rs[1] } else { rs[0] })
                }
                (false, false) => None,
            };
            if let Some(t) = target {
                stats.fire(Rule::BranchRPrime);
                return Step::Branch(inst, t, Mode::ThreeIs);
            }
        }
    }
    stats.fire(Rule::ThreeIsBranch);
    Step::Branch(inst, s, Mode::ThreeIs)
}

pub(crate) fn spider_step(
    engine: &Engine<'_>,
    mut inst: Instance,
    s: Vertex,
    stats: &mut SolveStats,
) -> Step {
    let w = engine.weights();
    let g = &inst.g;
    if !g.contains(s) || inst.sep.side(s) != Side::S || !g.is_222(s) || !balanced(g, &inst.sep, w) {
        stats.fire(Rule::SpiderHandback);
        return Step::Handoff(inst, Mode::ThreeIs);
    }
    for (side, rule) in [
        (Side::R, Rule::SpiderPullRight),
        (Side::L, Rule::SpiderPullLeft),
    ] {
        let sep = &inst.sep;
        let nb = neighbors_on(g, sep, s, side);
        if nb.len() != 1 {
            continue;
        }
        let (path, end) = walk_arm(g, s, nb[0], |v| sep.side(v) == Side::S);
        if end == s || sep.side(end) != side || g.degree(end) != 3 || g.is_222(end) {
            continue;
        }
        let dest = other(side);
        for v in path {
            inst.sep.set(v, dest);
        }
        inst.sep.set(s, dest);
        inst.sep.set(end, Side::S);
        engine.audit_separation(&inst, stats);
        stats.fire(rule);
        return Step::Handoff(inst, Mode::ThreeIs);
    }
    let sep = &inst.sep;
    let sk = skeleton_on(g, sep, s, Side::S);
    let ls = skeleton_on(g, sep, s, Side::L);
    if sk.len() == 1 && ls.len() == 1 {
        let l = ls[0];
        let mut moves = Vec::new();
        for t in skeleton_neighbors(g, l) {
            if t == s || inst.sep.side(t) != Side::S {
                continue;
            }
            let rt = neighbors_on(g, &inst.sep, t, Side::R);
            if rt.len() == 1 {
                moves.push((t, rt[0]));
            }
        }
        for (t, rt) in moves {
            if inst.sep.side(t) != Side::S || inst.sep.side(rt) != Side::R {
                continue;
            }
            inst.sep.set(t, Side::L);
            inst.sep.set(rt, Side::S);
            stats.fire(Rule::SpiderCenterDrag);
            engine.audit_separation(&inst, stats);
        }
        stats.fire(Rule::SpiderBranchL);
        return Step::Branch(inst, l, Mode::ThreeIs);
    }
    stats.fire(Rule::SpiderBranchS);
    Step::Branch(inst, s, Mode::ThreeIs)
}

fn check_instance(g: &Graph, sep: &Separation) -> Result<(), SolveError> {
    if g.max_degree() > 3 {
        return Err(SolveError::NotThreeIsInstance(format!(
            "maximum degree {} exceeds 3",
            g.max_degree()
        )));
    }
    if let Some(v) = g.vertices().find(|&v| g.is_333(v)) {
        return Err(SolveError::NotThreeIsInstance(format!(
            "vertex {v} has neighbor degrees (3,3,3)"
        )));
    }
    if sep.capacity() < g.capacity() {
        return Err(SolveError::InvalidSeparation(
            "separation does not cover the graph".into(),
        ));
    }
    sep.validate(g)
        .map_err(|e| SolveError::NotThreeIsInstance(e.to_string()))
}

/// `ind(g, c)` through #3IS with a given initial separation.
pub fn three_is(
    g: &Graph,
    sep: &Separation,
    c: &CardinalityFunction,
) -> Result<BigUint, SolveError> {
    three_is_with(g, sep, c, &SolveOptions::default()).map(|(x, _)| x)
}

pub fn three_is_with(
    g: &Graph,
    sep: &Separation,
    c: &CardinalityFunction,
    opts: &SolveOptions,
) -> Result<(BigUint, SolveStats), SolveError> {
    check_instance(g, sep)?;
    let engine = Engine::new(opts);
    let mut stats = SolveStats::default();
    let inst = Instance {
        g: g.clone(),
        c: Arc::new(c.extended(g.capacity())),
        sep: sep.clone(),
    };
    let x = engine.solve(inst, Mode::ThreeIs, 0, &mut stats);
    Ok((x, stats))
}

/// `ind(g, c)` through the spider box for a separator vertex `s` with
/// neighbor degrees (2,2,2) in a balanced separation.
pub fn spider(
    s: Vertex,
    g: &Graph,
    sep: &Separation,
    c: &CardinalityFunction,
) -> Result<BigUint, SolveError> {
    check_instance(g, sep)?;
    let opts = SolveOptions::default();
    if !g.contains(s) || sep.side(s) != Side::S {
        return Err(SolveError::SpiderPrecondition(format!(
            "{s} is not a separator vertex"
        )));
    }
    if !g.is_222(s) {
        return Err(SolveError::SpiderPrecondition(format!(
            "{s} does not have neighbor degrees (2,2,2)"
        )));
    }
    if !balanced(g, sep, &opts.weights) {
        return Err(SolveError::SpiderPrecondition(
            "separation is not balanced".into(),
        ));
    }
    let engine = Engine::new(&opts);
    let mut stats = SolveStats::default();
    let inst = Instance {
        g: g.clone(),
        c: Arc::new(c.extended(g.capacity())),
        sep: sep.clone(),
    };
    Ok(engine.solve(inst, Mode::Spider(s), 0, &mut stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sideless_separator_vertex_moves_right() {
        // path 0-1-2 with 1 in S and no left neighbor
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let sep = Separation::from_sides(vec![Side::S, Side::S, Side::R]);
        let out = simplify(&g, &sep, &WeightSet::default());
        assert!(out.separator(&g).is_empty());
        assert!(out.is_valid(&g));
    }
}
