//! The top-level branching engine.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::SolveError;
use crate::graph::{associated_average_degree, walk_arm, Graph, Vertex};
use crate::measure::WeightSet;
use crate::reductions::{
    find_lazy_2_separator, find_multiplier, fold_multiplier, solve_max_degree_2,
    CardinalityFunction, MultiplierHit,
};
use crate::separator::Separation;
use crate::subcubic;

macro_rules! rules {
    ($($variant:ident => $name:literal,)*) => {
        /// Every decision point of the engines; counted in [`SolveStats`].
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Rule {
            $($variant,)*
        }

        impl Rule {
            pub const ALL: &'static [Rule] = &[$(Rule::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Rule::$variant => $name,)*
                }
            }
        }
    };
}

rules! {
    Empty => "empty",
    SingleVertex => "single_vertex",
    MaxDegreeTwo => "max_degree_two",
    Components => "components",
    DegreeFourRule => "degree_four_rule",
    MultiplierReduction => "multiplier_reduction",
    LazySeparator => "lazy_separator",
    DispatchThreeIs => "dispatch_three_is",
    Branch => "branch",
    ThreeIsHandback => "three_is_handback",
    SeparatorRecomputation => "separator_recomputation",
    EmptySeparatorFallback => "empty_separator_fallback",
    ThreeIsMultiplier => "three_is_multiplier",
    ThreeIsLazySeparator => "three_is_lazy_separator",
    SpiderDispatch => "spider_dispatch",
    ImbalancedDrag => "imbalanced_drag",
    BranchRPrime => "branch_r_prime",
    ThreeIsBranch => "three_is_branch",
    SpiderHandback => "spider_handback",
    SpiderPullRight => "spider_pull_right",
    SpiderPullLeft => "spider_pull_left",
    SpiderCenterDrag => "spider_center_drag",
    SpiderBranchL => "spider_branch_l",
    SpiderBranchS => "spider_branch_s",
    HandoffCap => "handoff_cap",
    SimplifyNoLeft => "simplify_no_left",
    SimplifyNoRight => "simplify_no_right",
    SimplifyDegreeTwo => "simplify_degree_two",
    SimplifySkeletonLeft => "simplify_skeleton_left",
    SimplifySkeletonRight => "simplify_skeleton_right",
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub weights: WeightSet,
    /// Dispatch subcubic instances without (3,3,3) vertices to #3IS.
    pub use_three_is: bool,
    /// Run the structural audits and record them in [`AuditStats`].
    pub audit: bool,
    /// Evaluate the two children of a branching concurrently.
    pub parallel: bool,
    /// Worker cap for parallel mode; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            weights: WeightSet::default(),
            use_three_is: true,
            audit: false,
            parallel: false,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AuditStats {
    pub separator_checks: u64,
    pub separator_violations: u64,
    pub anchor_checks: u64,
    pub anchor_violations: u64,
    pub simplify_calls: u64,
    pub max_simplify_firings: u64,
    pub simplify_bound_violations: u64,
    pub three_is_333_branches: u64,
}

impl AuditStats {
    fn merge(&mut self, o: &AuditStats) {
        self.separator_checks += o.separator_checks;
        self.separator_violations += o.separator_violations;
        self.anchor_checks += o.anchor_checks;
        self.anchor_violations += o.anchor_violations;
        self.simplify_calls += o.simplify_calls;
        self.max_simplify_firings = self.max_simplify_firings.max(o.max_simplify_firings);
        self.simplify_bound_violations += o.simplify_bound_violations;
        self.three_is_333_branches += o.three_is_333_branches;
    }

    pub fn clean(&self) -> bool {
        self.separator_violations == 0
            && self.anchor_violations == 0
            && self.simplify_bound_violations == 0
            && self.three_is_333_branches == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveStats {
    pub branch_nodes: u64,
    pub max_depth: usize,
    pub separator_recomputations: u64,
    pub max_separator_size: usize,
    pub total_separator_size: u64,
    pub audit: AuditStats,
    rules: Vec<u64>,
}

impl Default for SolveStats {
    fn default() -> Self {
        SolveStats {
            branch_nodes: 0,
            max_depth: 0,
            separator_recomputations: 0,
            max_separator_size: 0,
            total_separator_size: 0,
            audit: AuditStats::default(),
            rules: vec![0; Rule::ALL.len()],
        }
    }
}

impl SolveStats {
    pub fn rule(&self, r: Rule) -> u64 {
        self.rules[r as usize]
    }

    pub(crate) fn fire(&mut self, r: Rule) {
        self.rules[r as usize] += 1;
    }

    /// Non-zero rule counters by name.
    pub fn rule_counters(&self) -> BTreeMap<&'static str, u64> {
        Rule::ALL
            .iter()
            .filter(|&&r| self.rule(r) > 0)
            .map(|&r| (r.name(), self.rule(r)))
            .collect()
    }

    pub(crate) fn record_separator(&mut self, size: usize) {
        self.separator_recomputations += 1;
        self.max_separator_size = self.max_separator_size.max(size);
        self.total_separator_size += size as u64;
    }

    /// Counters add, maxima take the maximum.
    pub fn merge(&mut self, o: &SolveStats) {
        self.branch_nodes += o.branch_nodes;
        self.max_depth = self.max_depth.max(o.max_depth);
        self.separator_recomputations += o.separator_recomputations;
        self.max_separator_size = self.max_separator_size.max(o.max_separator_size);
        self.total_separator_size += o.total_separator_size;
        self.audit.merge(&o.audit);
        for (a, b) in self.rules.iter_mut().zip(&o.rules) {
            *a += b;
        }
    }
}

impl Serialize for SolveStats {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SolveStats", 6)?;
        st.serialize_field("branch_nodes", &self.branch_nodes)?;
        st.serialize_field("max_depth", &self.max_depth)?;
        st.serialize_field("separator_recomputations", &self.separator_recomputations)?;
        st.serialize_field("max_separator_size", &self.max_separator_size)?;
        st.serialize_field("total_separator_size", &self.total_separator_size)?;
        st.serialize_field("rule_counters", &self.rule_counters())?;
        st.end()
    }
}

/// A graph with its cardinality function and current separation.
pub(crate) struct Instance {
    pub g: Graph,
    pub c: Arc<CardinalityFunction>,
    pub sep: Separation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    Is,
    ThreeIs,
    Spider(Vertex),
}

/// Outcome of one step of an engine box.
pub(crate) enum Step {
    Done(BigUint),
    /// Continue at the same depth without having removed vertices.
    Handoff(Instance, Mode),
    Multiplier(Instance, MultiplierHit, Mode),
    /// Branch on a vertex; both children continue in the given mode.
    Branch(Instance, Vertex, Mode),
    Components(Instance),
}

const PARALLEL_MIN_N: usize = 30;
const PARALLEL_MAX_DEPTH: usize = 24;

pub(crate) struct Engine<'a> {
    pub opts: &'a SolveOptions,
}

impl<'a> Engine<'a> {
    pub fn new(opts: &'a SolveOptions) -> Self {
        Engine { opts }
    }

    pub fn weights(&self) -> &WeightSet {
        &self.opts.weights
    }

    /// `ind(g, c)` starting in #IS with a trivial separation.
    pub fn count(
        &self,
        g: &Graph,
        c: Arc<CardinalityFunction>,
        depth: usize,
        stats: &mut SolveStats,
    ) -> BigUint {
        let sep = Separation::trivial(g.capacity());
        self.solve(
            Instance {
                g: g.clone(),
                c,
                sep,
            },
            Mode::Is,
            depth,
            stats,
        )
    }

    pub fn solve(
        &self,
        mut inst: Instance,
        mut mode: Mode,
        depth: usize,
        stats: &mut SolveStats,
    ) -> BigUint {
        stats.max_depth = stats.max_depth.max(depth);
        let mut handoffs = 0usize;
        loop {
            let step = match mode {
                Mode::Is => self.is_step(inst, stats),
                Mode::ThreeIs => subcubic::three_is_step(self, inst, stats),
                Mode::Spider(s) => subcubic::spider_step(self, inst, s, stats),
            };
            match step {
                Step::Done(x) => return x,
                Step::Handoff(next, m) => {
                    handoffs += 1;
                    if handoffs > 4 * next.g.n() + 8 {
                        if let Some(v) = select_branch_vertex(&next.g) {
                            stats.fire(Rule::HandoffCap);
                            return self.branch(next, v, Mode::Is, depth, stats);
                        }
                    }
                    inst = next;
                    mode = m;
                }
                Step::Multiplier(next, hit, m) => {
                    inst = self.apply_multiplier(next, &hit, depth, stats);
                    mode = m;
                    handoffs = 0;
                }
                Step::Branch(next, v, m) => return self.branch(next, v, m, depth, stats),
                Step::Components(next) => return self.components(next, depth, stats),
            }
        }
    }

    fn is_step(&self, inst: Instance, stats: &mut SolveStats) -> Step {
        let g = &inst.g;
        match g.n() {
            0 => {
                stats.fire(Rule::Empty);
                return Step::Done(BigUint::one());
            }
            1 => {
                stats.fire(Rule::SingleVertex);
                let v = g.vertices().next().expect("one vertex");
                return Step::Done(inst.c.c_out(v) + inst.c.c_in(v));
            }
            _ => {}
        }
        let delta = g.max_degree();
        if delta <= 2 {
            stats.fire(Rule::MaxDegreeTwo);
            let x = solve_max_degree_2(g, &inst.c).expect("maximum degree at most 2");
            return Step::Done(x);
        }
        if !g.is_connected() {
            return Step::Components(inst);
        }
        if let Some(x) = degree_four_rule_vertex(g) {
            stats.fire(Rule::DegreeFourRule);
            return Step::Branch(inst, x, Mode::Is);
        }
        let x = best_vertex(g, g.vertices()).expect("non-empty graph");
        let w = self.weights();
        if let Some(hit) = find_multiplier(g, w) {
            stats.fire(Rule::MultiplierReduction);
            return Step::Multiplier(inst, hit, Mode::Is);
        }
        if let Some(hit) = find_lazy_2_separator(g, x, w) {
            stats.fire(Rule::LazySeparator);
            return Step::Branch(inst, hit.y, Mode::Is);
        }
        if self.opts.use_three_is && delta == 3 && !g.has_333_vertex() {
            stats.fire(Rule::DispatchThreeIs);
            return Step::Handoff(inst, Mode::ThreeIs);
        }
        stats.fire(Rule::Branch);
        Step::Branch(inst, x, Mode::Is)
    }

    fn apply_multiplier(
        &self,
        inst: Instance,
        hit: &MultiplierHit,
        depth: usize,
        stats: &mut SolveStats,
    ) -> Instance {
        let Instance { g, mut c, sep } = inst;
        let shared = Arc::clone(&c);
        let mut sub_stats = SolveStats::default();
        let reduced = {
            let c_mut = Arc::make_mut(&mut c);
            fold_multiplier(&g, c_mut, hit.x, &hit.side, |h, _| {
                self.count(h, Arc::clone(&shared), depth + 1, &mut sub_stats)
            })
        };
        stats.merge(&sub_stats);
        let inst = Instance { g: reduced, c, sep };
        self.audit_separation(&inst, stats);
        inst
    }

    fn components(&self, inst: Instance, depth: usize, stats: &mut SolveStats) -> BigUint {
        stats.fire(Rule::Components);
        let mut total = BigUint::one();
        for comp in inst.g.components() {
            let h = inst.g.induced(&comp);
            let sep = Separation::trivial(h.capacity());
            let part = Instance {
                g: h,
                c: Arc::clone(&inst.c),
                sep,
            };
            total *= self.solve(part, Mode::Is, depth + 1, stats);
            if total.is_zero() {
                break;
            }
        }
        total
    }

    pub(crate) fn audit_separation(&self, inst: &Instance, stats: &mut SolveStats) {
        if self.opts.audit {
            stats.audit.separator_checks += 1;
            if !inst.sep.is_valid(&inst.g) {
                stats.audit.separator_violations += 1;
            }
        }
    }

    /// `c_out(v)·ind(G − v) + c_in(v)·Π_{u ∈ N(v)} c_out(u)·ind(G − N[v])`;
    /// a child whose coefficient is zero is skipped.
    fn branch(
        &self,
        inst: Instance,
        v: Vertex,
        child: Mode,
        depth: usize,
        stats: &mut SolveStats,
    ) -> BigUint {
        stats.branch_nodes += 1;
        if self.opts.audit && child != Mode::Is && inst.g.is_333(v) {
            stats.audit.three_is_333_branches += 1;
        }
        let child = match child {
            Mode::Spider(_) => Mode::ThreeIs,
            m => m,
        };
        let Instance { g, c, sep } = inst;
        let out_coef = c.c_out(v).clone();
        let mut in_coef = c.c_in(v).clone();
        if !in_coef.is_zero() {
            for &u in g.neighbors(v) {
                in_coef *= c.c_out(u);
            }
        }
        let make = |removed: &[Vertex]| Instance {
            g: g.restrict(removed),
            c: Arc::clone(&c),
            sep: sep.clone(),
        };
        let out_child = (!out_coef.is_zero()).then(|| make(&[v]));
        let in_child = (!in_coef.is_zero()).then(|| make(&g.closed_neighborhood(v)));
        for inst in out_child.iter().chain(in_child.iter()) {
            self.audit_separation(inst, stats);
        }
        let (a, b) = match (out_child, in_child) {
            (Some(o), Some(i))
                if self.opts.parallel && depth < PARALLEL_MAX_DEPTH && g.n() >= PARALLEL_MIN_N =>
            {
                let ((a, sa), (b, sb)) = rayon::join(
                    || {
                        let mut s = SolveStats::default();
                        let r = self.solve(o, child, depth + 1, &mut s);
                        (r, s)
                    },
                    || {
                        let mut s = SolveStats::default();
                        let r = self.solve(i, child, depth + 1, &mut s);
                        (r, s)
                    },
                );
                stats.merge(&sa);
                stats.merge(&sb);
                (a, b)
            }
            (o, i) => {
                let a = o.map_or_else(BigUint::zero, |o| self.solve(o, child, depth + 1, stats));
                let b = i.map_or_else(BigUint::zero, |i| self.solve(i, child, depth + 1, stats));
                (a, b)
            }
        };
        out_coef * a + in_coef * b
    }
}

/// `ind(g, c)` with default options.
pub fn count_independent_sets(g: &Graph, c: &CardinalityFunction) -> (BigUint, SolveStats) {
    count_with(g, c, &SolveOptions::default())
}

/// `ind(g)` for unit weights.
pub fn count_unit(g: &Graph) -> BigUint {
    count_independent_sets(g, &CardinalityFunction::unit(g.capacity())).0
}

pub fn count_with(
    g: &Graph,
    c: &CardinalityFunction,
    opts: &SolveOptions,
) -> (BigUint, SolveStats) {
    let c = Arc::new(c.extended(g.capacity()));
    let run = || {
        let engine = Engine::new(opts);
        let mut stats = SolveStats::default();
        let x = engine.count(g, c, 0, &mut stats);
        (x, stats)
    };
    if opts.parallel {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = opts.threads {
            builder = builder.num_threads(t.max(1));
        }
        match builder.build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    } else {
        run()
    }
}

/// One branching step on `v`, with both children solved by the default
/// engine and the separation restricted to the survivors.
pub fn branch_on(
    g: &Graph,
    sep: &Separation,
    c: &CardinalityFunction,
    v: Vertex,
) -> Result<BigUint, SolveError> {
    if !g.contains(v) {
        return Err(SolveError::Precondition(format!("{v} is not a vertex")));
    }
    let opts = SolveOptions::default();
    let engine = Engine::new(&opts);
    let inst = Instance {
        g: g.clone(),
        c: Arc::new(c.extended(g.capacity())),
        sep: sep.clone(),
    };
    let mut stats = SolveStats::default();
    Ok(engine.branch(inst, v, Mode::Is, 0, &mut stats))
}

/// The degree-4 rule vertex if the rule applies, else the best vertex by
/// degree, then α/β, then smallest id.
pub fn select_branch_vertex(g: &Graph) -> Option<Vertex> {
    degree_four_rule_vertex(g).or_else(|| best_vertex(g, g.vertices()))
}

/// Applies when Δ = 4, every degree-4 vertex has only degree-2 neighbors and
/// some degree-4 vertex has a 2-path to a degree-3 vertex; returns the
/// smallest such vertex.
pub fn degree_four_rule_vertex(g: &Graph) -> Option<Vertex> {
    if g.max_degree() != 4 {
        return None;
    }
    let fours: Vec<Vertex> = g.vertices().filter(|&v| g.degree(v) == 4).collect();
    if fours
        .iter()
        .any(|&v| g.neighbors(v).iter().any(|&u| g.degree(u) != 2))
    {
        return None;
    }
    fours.into_iter().find(|&x| {
        g.neighbors(x).iter().any(|&u| {
            let (_, end) = walk_arm(g, x, u, |_| false);
            end != x && g.degree(end) == 3
        })
    })
}

/// Among `candidates`: maximum degree, then maximum α/β, then smallest id.
pub fn best_vertex(g: &Graph, candidates: impl IntoIterator<Item = Vertex>) -> Option<Vertex> {
    let candidates: Vec<Vertex> = candidates.into_iter().collect();
    let top = candidates.iter().map(|&v| g.degree(v)).max()?;
    let mut best: Option<(Vertex, num_rational::BigRational)> = None;
    for &v in candidates.iter().filter(|&&v| g.degree(v) == top) {
        let score = associated_average_degree(g, v).expect("live vertex").score;
        match &best {
            Some((b, s)) if score < *s || (score == *s && v > *b) => {}
            _ => best = Some((v, score)),
        }
    }
    best.map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{generate, GraphSpec};

    fn gen(s: &str) -> Graph {
        generate(&s.parse::<GraphSpec>().unwrap()).unwrap()
    }

    #[test]
    fn fixtures() {
        assert_eq!(count_unit(&gen("petersen")), BigUint::from(76u32));
        for n in 1..=8 {
            assert_eq!(
                count_unit(&gen(&format!("complete({n})"))),
                BigUint::from(n as u32 + 1)
            );
        }
        let t = gen("complete(3)");
        assert_eq!(count_unit(&t.disjoint_union(&t)), BigUint::from(16u32));
    }

    #[test]
    fn branch_fixtures() {
        let g = gen("path(2)");
        let sep = Separation::trivial(2);
        let unit = CardinalityFunction::unit(2);
        assert_eq!(branch_on(&g, &sep, &unit, 0).unwrap(), BigUint::from(3u32));
        let mut c = unit.clone();
        c.set(0, BigUint::from(1u32), BigUint::from(5u32));
        assert_eq!(branch_on(&g, &sep, &c, 0).unwrap(), BigUint::from(7u32));
    }

    #[test]
    fn selection() {
        // unique degree-5 vertex
        let star = Graph::from_edges(6, &[(3, 0), (3, 1), (3, 2), (3, 4), (3, 5)]).unwrap();
        assert_eq!(select_branch_vertex(&star), Some(3));
    }
}
