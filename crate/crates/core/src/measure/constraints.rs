//! Constraint systems over measure weights.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use combos::multisets;
use serde::Serialize;

use super::{out_lower_bound, NeighborProfile, WeightSet};
use crate::error::MeasureError;

/// A weight variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Var {
    R(u8),
    S(u8),
    S3p,
    W(u8),
    W2p,
    W3p,
    Psi,
    /// Auxiliary slope of a pivot constraint, only seen by the optimizer.
    Slope(u8),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::R(d) => write!(f, "r{d}"),
            Var::S(d) => write!(f, "s{d}"),
            Var::S3p => write!(f, "s3p"),
            Var::W(d) => write!(f, "w{d}"),
            Var::W2p => write!(f, "w2p"),
            Var::W3p => write!(f, "w3p"),
            Var::Psi => write!(f, "psi"),
            Var::Slope(i) => write!(f, "c{i}"),
        }
    }
}

/// Affine expression `constant + Σ coef·var`.
#[derive(Clone, Debug, PartialEq, Default, Serialize)]
pub struct LinExpr {
    pub constant: f64,
    pub terms: BTreeMap<Var, f64>,
}

impl LinExpr {
    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, 1.0);
        LinExpr {
            constant: 0.0,
            terms,
        }
    }

    pub fn constant(c: f64) -> Self {
        LinExpr {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn eval(&self, value: impl Fn(Var) -> f64) -> f64 {
        self.constant + self.terms.iter().map(|(&v, &c)| c * value(v)).sum::<f64>()
    }

    pub fn eval_weights(&self, w: &WeightSet) -> f64 {
        self.eval(|v| w.get(v))
    }

    /// Replaces every variable accepted by `fixed` with its value.
    pub fn substitute(&self, fixed: impl Fn(Var) -> Option<f64>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant);
        for (&v, &c) in &self.terms {
            match fixed(v) {
                Some(x) => out.constant += c * x,
                None => {
                    out.terms.insert(v, c);
                }
            }
        }
        out
    }

    fn cleaned(mut self) -> Self {
        self.terms.retain(|_, c| *c != 0.0);
        self
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        self.constant += rhs.constant;
        for (v, c) in rhs.terms {
            *self.terms.entry(v).or_insert(0.0) += c;
        }
        self.cleaned()
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self + (-rhs)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        -1.0 * self
    }
}

impl Mul<LinExpr> for f64 {
    type Output = LinExpr;
    fn mul(self, mut rhs: LinExpr) -> LinExpr {
        rhs.constant *= self;
        for c in rhs.terms.values_mut() {
            *c *= self;
        }
        rhs.cleaned()
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in &self.terms {
            let sign = if c < 0.0 { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == 1.0 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{}*{v}", trim(mag))?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", trim(self.constant))
        } else if self.constant != 0.0 {
            let sign = if self.constant < 0.0 { "-" } else { "+" };
            write!(f, " {sign} {}", trim(self.constant.abs()))
        } else {
            Ok(())
        }
    }
}

fn trim(x: f64) -> String {
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ConstraintKind {
    /// `expr ≥ 0`.
    AtLeast(LinExpr),
    /// `expr = 0`.
    Equal(LinExpr),
    /// `Σ 2^{−δ_i} ≤ 1`.
    Branching(Vec<LinExpr>),
    /// Compound-measure pivot at average degree `lo`: some slope `c ≤ 0`
    /// satisfies `w_d − prev_d ≥ c·(d − lo)` for every listed degree.
    Pivot { lo: f64, prev: Vec<(u8, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub label: String,
    pub kind: ConstraintKind,
    /// Average-degree threshold above which the case can occur.
    pub min_degree: Option<f64>,
}

impl Constraint {
    pub fn at_least(label: impl Into<String>, e: LinExpr) -> Self {
        Constraint {
            label: label.into(),
            kind: ConstraintKind::AtLeast(e),
            min_degree: None,
        }
    }

    /// `lhs ≤ rhs`.
    pub fn le(label: impl Into<String>, lhs: LinExpr, rhs: LinExpr) -> Self {
        Constraint::at_least(label, rhs - lhs)
    }

    pub fn equal(label: impl Into<String>, e: LinExpr) -> Self {
        Constraint {
            label: label.into(),
            kind: ConstraintKind::Equal(e),
            min_degree: None,
        }
    }

    pub fn branching(label: impl Into<String>, deltas: Vec<LinExpr>) -> Self {
        Constraint {
            label: label.into(),
            kind: ConstraintKind::Branching(deltas),
            min_degree: None,
        }
    }

    fn with_min_degree(mut self, h: f64) -> Self {
        self.min_degree = Some(h);
        self
    }

    /// Slack under `w`: non-negative iff satisfied.
    pub fn slack(&self, w: &WeightSet) -> f64 {
        match &self.kind {
            ConstraintKind::AtLeast(e) => e.eval_weights(w),
            ConstraintKind::Equal(e) => -e.eval_weights(w).abs(),
            ConstraintKind::Branching(ds) => {
                1.0 - ds.iter().map(|d| (-d.eval_weights(w)).exp2()).sum::<f64>()
            }
            ConstraintKind::Pivot { lo, prev } => pivot_slack(*lo, prev, |d| w.w[d as usize]),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ConstraintKind::AtLeast(_) => "inequality",
            ConstraintKind::Equal(_) => "equality",
            ConstraintKind::Branching(_) => "branching",
            ConstraintKind::Pivot { .. } => "pivot",
        }
    }
}

/// Largest feasible-interval width for the pivot slope; negative when no
/// `c ≤ 0` works.
pub(crate) fn pivot_slack(lo: f64, prev: &[(u8, f64)], w: impl Fn(u8) -> f64) -> f64 {
    let mut lower = f64::NEG_INFINITY;
    let mut upper: f64 = 0.0;
    let mut at_pivot = f64::INFINITY;
    for &(d, p) in prev {
        let delta = w(d) - p;
        let k = d as f64 - lo;
        if k.abs() < 1e-12 {
            at_pivot = at_pivot.min(delta);
        } else if k > 0.0 {
            upper = upper.min(delta / k);
        } else {
            lower = lower.max(delta / k);
        }
    }
    (upper - lower).min(at_pivot)
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ConstraintKind::AtLeast(e) => write!(f, "{}: {e} >= 0", self.label),
            ConstraintKind::Equal(e) => write!(f, "{}: {e} = 0", self.label),
            ConstraintKind::Branching(ds) => {
                let parts: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
                write!(f, "{}: tau({}) <= 2", self.label, parts.join("; "))
            }
            ConstraintKind::Pivot { lo, prev } => {
                let parts: Vec<String> = prev
                    .iter()
                    .map(|(d, p)| format!("w{d}>={p}+c*({d}-{lo})"))
                    .collect();
                write!(f, "{}: exists c<=0: {}", self.label, parts.join(", "))
            }
        }
    }
}

/// Row `(lo, hi]` of the maximum-degree-4 analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeFourRow {
    pub lo: f64,
    pub hi: f64,
}

pub fn degree_four_rows() -> [DegreeFourRow; 5] {
    [
        DegreeFourRow { lo: 2.0, hi: 3.0 },
        DegreeFourRow { lo: 3.0, hi: 3.2 },
        DegreeFourRow { lo: 3.2, hi: 3.5 },
        DegreeFourRow { lo: 3.5, hi: 3.75 },
        DegreeFourRow { lo: 3.75, hi: 4.0 },
    ]
}

/// Degree-4 branching cases: neighbor profile, average-degree threshold and
/// the vector as coefficients of `(w4, w3, w2, ψ)` for each branch.
pub const DEGREE_FOUR_CASES: [(&str, f64, [[f64; 4]; 2]); 16] = [
    (
        "(2,2,2,2) low",
        3.0,
        [[5.0, -4.0, 4.0, -1.0], [5.0, -4.0, 4.0, -1.0]],
    ),
    (
        "(2,2,2,2) high",
        3.0,
        [[4.0, -2.0, 3.0, 1.0], [4.0, -2.0, 3.0, 1.0]],
    ),
    (
        "(2,2,2,3)",
        3.0,
        [[4.0, -2.0, 2.0, 0.0], [4.0, -2.0, 3.0, 0.0]],
    ),
    (
        "(2,2,2,4)",
        3.0,
        [[5.0, -4.0, 3.0, 0.0], [6.0, -4.0, 3.0, 0.0]],
    ),
    (
        "(2,2,3,3)",
        3.0,
        [[3.0, 0.0, 0.0, 0.0], [5.0, -2.0, 2.0, 0.0]],
    ),
    (
        "(2,2,3,4)",
        3.0,
        [[4.0, -2.0, 1.0, 0.0], [5.0, -2.0, 2.0, 0.0]],
    ),
    (
        "(2,2,4,4)",
        3.0,
        [[5.0, -4.0, 2.0, 0.0], [7.0, -4.0, 2.0, 0.0]],
    ),
    (
        "(2,3,3,3)",
        3.2,
        [[2.0, 2.0, -2.0, 0.0], [4.0, 0.0, 1.0, 0.0]],
    ),
    (
        "(2,3,3,4)",
        42.0 / 13.0,
        [[3.0, 0.0, -1.0, 0.0], [6.0, -2.0, 1.0, 0.0]],
    ),
    (
        "(2,3,4,4)",
        36.0 / 11.0,
        [[4.0, -2.0, 0.0, 0.0], [6.0, -2.0, 1.0, 0.0]],
    ),
    (
        "(2,4,4,4)",
        10.0 / 3.0,
        [[5.0, -4.0, 1.0, 0.0], [8.0, -4.0, 1.0, 0.0]],
    ),
    (
        "(3,3,3,3)",
        24.0 / 7.0,
        [[1.0, 4.0, -4.0, 0.0], [5.0, 0.0, 0.0, 0.0]],
    ),
    (
        "(3,3,3,4)",
        3.5,
        [[2.0, 2.0, -3.0, 0.0], [5.0, 0.0, 0.0, 0.0]],
    ),
    (
        "(3,3,4,4)",
        3.6,
        [[3.0, 0.0, -2.0, 0.0], [7.0, -2.0, 0.0, 0.0]],
    ),
    (
        "(3,4,4,4)",
        3.75,
        [[4.0, -2.0, -1.0, 0.0], [7.0, -2.0, 0.0, 0.0]],
    ),
    (
        "(4,4,4,4)",
        4.0,
        [[5.0, -4.0, 0.0, 0.0], [9.0, -4.0, 0.0, 0.0]],
    ),
];

/// Neighbor-degree multisets for branching on a degree-5 or degree-6 vertex.
pub fn degree_five_six_cases() -> Vec<NeighborProfile> {
    let mut out = Vec::new();
    for dv in [5usize, 6] {
        for nd in multisets(2, dv, dv) {
            out.push(NeighborProfile::new(dv, nd));
        }
    }
    out
}

mod combos {
    /// Non-decreasing sequences of length `len` over `lo..=hi`.
    pub fn multisets(lo: usize, hi: usize, len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(len);
        fn rec(lo: usize, hi: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == len {
                out.push(cur.clone());
                return;
            }
            let start = cur.last().copied().unwrap_or(lo);
            for d in start..=hi {
                cur.push(d);
                rec(lo, hi, len, cur, out);
                cur.pop();
            }
        }
        rec(lo, hi, len, &mut cur, &mut out);
        out
    }
}

/// A constraint system together with the data it was derived from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Regime {
    /// The measure for subcubic graphs of average degree at most 8/3.
    Subcubic,
    /// Degree-3 weights; the subcubic weights of `upstream` are constants.
    DegreeThree { upstream: WeightSet },
    /// One maximum-degree-4 row. For row 0 the compound degree-3 weights
    /// `w2p`, `w3p` of `upstream` are constants; for later rows `upstream.w`
    /// is the previous row.
    DegreeFour { row: usize, upstream: WeightSet },
    /// Maximum degree 5 and 6; `upstream.w` is the last degree-4 row.
    DegreeFiveSix { upstream: WeightSet },
}

impl Regime {
    pub fn name(&self) -> String {
        match self {
            Regime::Subcubic => "subcubic".into(),
            Regime::DegreeThree { .. } => "degree-3".into(),
            Regime::DegreeFour { row, .. } => {
                let r = degree_four_rows()[*row];
                format!("degree-4 row {}-{}", r.lo, r.hi)
            }
            Regime::DegreeFiveSix { .. } => "degree-5-6".into(),
        }
    }

    /// Published-weight instances of a regime family: `subcubic`,
    /// `degree-3`, `degree-4` (five rows) or `degree-5-6`, each paired with
    /// the published weights to check.
    pub fn published(family: &str) -> Result<Vec<(Regime, WeightSet)>, MeasureError> {
        Ok(match family {
            "subcubic" | "subcubic-8/3" => {
                vec![(Regime::Subcubic, WeightSet::published_subcubic())]
            }
            "degree-3" => vec![(
                Regime::DegreeThree {
                    upstream: WeightSet::published_subcubic(),
                },
                WeightSet::published_degree_three(),
            )],
            "degree-4" => {
                let rows = WeightSet::published_degree_four();
                (0..rows.len())
                    .map(|i| {
                        let upstream = if i == 0 {
                            WeightSet::published_degree_three()
                        } else {
                            rows[i - 1].clone()
                        };
                        (Regime::DegreeFour { row: i, upstream }, rows[i].clone())
                    })
                    .collect()
            }
            "degree-5-6" | "degree-4-6" => vec![(
                Regime::DegreeFiveSix {
                    upstream: WeightSet::published_degree_four()[4].clone(),
                },
                WeightSet::published_degree_six(),
            )],
            other => return Err(MeasureError::UnknownRegime(other.to_string())),
        })
    }

    /// Variables the optimizer may change.
    pub fn free_vars(&self) -> Vec<Var> {
        match self {
            Regime::Subcubic => vec![Var::R(3), Var::S(2), Var::S(3), Var::S3p],
            Regime::DegreeThree { .. } => vec![Var::W(2), Var::W(3), Var::W2p, Var::W3p],
            Regime::DegreeFour { row: 0, .. } => vec![Var::W(2), Var::W(3), Var::W(4), Var::Psi],
            Regime::DegreeFour { .. } => vec![Var::W(2), Var::W(3), Var::W(4)],
            Regime::DegreeFiveSix { .. } => (2..=6).map(Var::W).collect(),
        }
    }

    /// Values held constant during optimization of this regime.
    pub fn fixed(&self) -> WeightSet {
        match self {
            Regime::Subcubic => WeightSet::zero(),
            Regime::DegreeThree { upstream } => WeightSet {
                w: [0.0; 7],
                w2p: 0.0,
                w3p: 0.0,
                psi: 0.0,
                ..upstream.clone()
            },
            _ => WeightSet::zero(),
        }
    }

    /// Per-vertex objective to minimize, as a maximum of affine pieces.
    pub fn objective(&self) -> Objective {
        match self {
            Regime::Subcubic => {
                Objective::single((1.0 / 9.0) * s(3) + (5.0 / 18.0) * r(3) + (1.0 / 6.0) * r(2))
            }
            Regime::DegreeThree { .. } => Objective::single(LinExpr::var(Var::W3p)),
            Regime::DegreeFour { row, .. } => envelope(degree_four_rows()[*row].hi, &[2, 3, 4]),
            Regime::DegreeFiveSix { .. } => Objective::single(w(6)),
        }
    }

    /// Whether the objective is reported as a running-time base `2^{obj}`.
    pub fn reports_base(&self) -> bool {
        !matches!(self, Regime::Subcubic)
    }
}

/// Maximum of affine pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Objective {
    pub pieces: Vec<LinExpr>,
}

impl Objective {
    pub fn single(e: LinExpr) -> Self {
        Objective { pieces: vec![e] }
    }

    pub fn eval(&self, value: impl Fn(Var) -> f64 + Copy) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.eval(value))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Largest linear interpolation of `w_i`, `w_j` at `d` over `i ≤ d ≤ j`.
fn envelope(d: f64, degrees: &[u8]) -> Objective {
    let mut pieces = Vec::new();
    for &i in degrees {
        for &j in degrees {
            let (fi, fj) = (i as f64, j as f64);
            if fi <= d && d <= fj {
                if i == j {
                    pieces.push(w(i));
                } else {
                    let t = (d - fi) / (fj - fi);
                    pieces.push((1.0 - t) * w(i) + t * w(j));
                }
            }
        }
    }
    Objective { pieces }
}

fn r(d: u8) -> LinExpr {
    LinExpr::var(Var::R(d))
}
fn s(d: u8) -> LinExpr {
    LinExpr::var(Var::S(d))
}
fn w(d: u8) -> LinExpr {
    LinExpr::var(Var::W(d))
}
fn k(c: f64) -> LinExpr {
    LinExpr::constant(c)
}

/// Emits the constraint system of a regime.
pub fn generate_constraints(regime: &Regime) -> Vec<Constraint> {
    match regime {
        Regime::Subcubic => subcubic(),
        Regime::DegreeThree { upstream } => degree_three(upstream),
        Regime::DegreeFour { row, upstream } => degree_four(*row, upstream),
        Regime::DegreeFiveSix { upstream } => degree_five_six(upstream),
    }
}

fn subcubic() -> Vec<Constraint> {
    let s3p = LinExpr::var(Var::S3p);
    let dr3 = r(3) - r(2);
    let ds3 = s(3) - s(2);
    let delta = s3p.clone() - s(3);
    let mut cs = vec![
        Constraint::equal("r0 = 0", r(0)),
        Constraint::equal("r1 = 0", r(1)),
        Constraint::equal("r2 = 0", r(2)),
        Constraint::equal("s0 = 0", s(0)),
        Constraint::equal("s1 = 0", s(1)),
    ];
    for d in 1..=3u8 {
        cs.push(Constraint::le(format!("monotone r{d}"), r(d - 1), r(d)));
        cs.push(Constraint::le(format!("monotone s{d}"), s(d - 1), s(d)));
    }
    cs.push(Constraint::le("spider s3p >= s3", s(3), s3p.clone()));
    for d in 2..=3u8 {
        cs.push(Constraint::le(
            format!("move to R: r{d} <= s{d}"),
            r(d),
            s(d),
        ));
        cs.push(Constraint::le(
            format!("drag left: r{d}/2 <= s{d}"),
            0.5 * r(d),
            s(d),
        ));
    }
    cs.push(Constraint::le("move to R: r3 <= s3p", r(3), s3p.clone()));
    cs.push(Constraint::le(
        "balanced drag: s3p <= s2 + r3/2",
        s3p.clone(),
        s(2) + 0.5 * r(3),
    ));
    cs.push(Constraint::le(
        "imbalanced drag: s3p <= s2 + r3",
        s3p.clone(),
        s(2) + r(3),
    ));
    cs.push(Constraint::le(
        "isolated separator vertex: 2 r3 <= s3",
        2.0 * r(3),
        s(3),
    ));
    cs.push(Constraint::at_least("s3 >= 0", s(3)));
    cs.push(Constraint::le(
        "separator computation: s3p/6 + 5 r3/12 <= r3",
        (1.0 / 6.0) * s3p.clone() + (5.0 / 12.0) * r(3),
        r(3),
    ));
    let mid = (1.0 / 11.0) * s3p.clone() + (5.0 / 22.0) * r(3) + (5.0 / 22.0) * r(2);
    cs.push(Constraint::le(
        "upper bound at d=2 vs 28/11",
        0.5 * r(2),
        mid.clone(),
    ));
    cs.push(Constraint::le(
        "upper bound at d=28/11 vs 8/3",
        mid,
        (1.0 / 9.0) * s(3) + (5.0 / 18.0) * r(3) + (1.0 / 3.0) * r(2),
    ));
    let twice = |label: &str, e: LinExpr| Constraint::branching(label, vec![e.clone(), e]);
    cs.push(twice(
        "spider: branch on l",
        s3p.clone() + 0.5 * (r(3) + 2.0 * dr3.clone()),
    ));
    cs.push(twice(
        "spider: branch on s",
        s3p.clone() + 1.5 * dr3.clone(),
    ));
    cs.push(twice(
        "balanced lazy 2-separator",
        s(3) + 0.5 * (2.0 * r(3) + 2.0 * dr3.clone()) - 2.0 * delta.clone(),
    ));
    cs.push(twice("imbalanced lazy 2-separator", s(3) + 2.0 * r(3)));
    let common = s(3) + ds3.clone() + dr3.clone() - 3.0 * delta.clone();
    cs.push(Constraint::branching(
        "balanced: neighbor in separator",
        vec![
            common.clone(),
            2.0 * s(3) + dr3.clone() - 2.0 * delta.clone(),
        ],
    ));
    cs.push(Constraint::branching(
        "balanced: (2,2,3)",
        vec![
            common.clone(),
            s(3) + 2.0 * ds3.clone() + 0.5 * (r(3) + 2.0 * dr3.clone()) - 4.0 * delta.clone(),
        ],
    ));
    cs.push(Constraint::branching(
        "balanced: (2,3,3)",
        vec![
            common,
            s(3) + 3.0 * ds3.clone() + 0.5 * (2.0 * r(3) + 2.0 * dr3.clone()) - 5.0 * delta.clone(),
        ],
    ));
    cs.push(Constraint::branching(
        "imbalanced: neighbor in separator",
        vec![
            s(3) + ds3.clone() + r(3) - 3.0 * delta.clone(),
            2.0 * s(3) + r(3) + 5.0 * delta.clone(),
        ],
    ));
    cs.push(twice(
        "imbalanced: branch on r'",
        r(3) + s(3) + dr3.clone() + ds3 - 3.0 * delta.clone(),
    ));
    cs.push(Constraint::branching(
        "imbalanced: branch on s",
        vec![
            s(3) + 2.0 * dr3.clone() - 3.0 * delta.clone(),
            s(3) + 2.0 * dr3 - 4.0 * delta,
        ],
    ));
    cs
}

fn degree_three(up: &WeightSet) -> Vec<Constraint> {
    let (r2, r3, s3, s3p) = (up.r[2], up.r[3], up.s[3], up.s3p);
    let w2p = LinExpr::var(Var::W2p);
    let w3p = LinExpr::var(Var::W3p);
    vec![
        Constraint::at_least("w2 >= 0", w(2)),
        Constraint::le("monotone w3", w(2), w(3)),
        Constraint::at_least("w2p >= 0", w2p.clone()),
        Constraint::le("monotone w3p", w2p.clone(), w3p.clone()),
        Constraint::le("link at d=2", k(r2 / 2.0), w(2)),
        Constraint::le(
            "link at d=28/11",
            k(s3p / 11.0 + 5.0 * r3 / 22.0 + 5.0 * r2 / 22.0),
            (6.0 / 11.0) * w(3) + (5.0 / 11.0) * w(2),
        ),
        Constraint::le(
            "link at d=8/3",
            k(s3 / 9.0 + 5.0 * r3 / 18.0 + r2 / 6.0),
            (2.0 / 3.0) * w(3) + (1.0 / 3.0) * w(2),
        ),
        Constraint::le(
            "pivot: 2 w3 + w2 <= 2 w3p + w2p",
            2.0 * w(3) + w(2),
            2.0 * w3p.clone() + w2p.clone(),
        ),
        Constraint::branching(
            "(3,3,3) vertex",
            vec![4.0 * w3p.clone() - 3.0 * w2p.clone(), 8.0 * w3p - 4.0 * w2p],
        ),
    ]
}

fn degree_four(row: usize, up: &WeightSet) -> Vec<Constraint> {
    let lo = degree_four_rows()[row].lo;
    let mut cs = vec![
        Constraint::at_least("w2 >= 0", w(2)),
        Constraint::le("monotone w3", w(2), w(3)),
        Constraint::le("monotone w4", w(3), w(4)),
    ];
    if row == 0 {
        let upstream = 2.0 * up.w3p + up.w2p;
        cs.push(Constraint::le(
            "pivot at d=3: 2 w3p + w2p <= 2 w3 + w2",
            k(upstream),
            2.0 * w(3) + w(2),
        ));
        cs.push(Constraint::branching(
            "(3,3,3) vertex",
            vec![4.0 * w(3) - 3.0 * w(2), 8.0 * w(3) - 4.0 * w(2)],
        ));
    } else {
        cs.push(Constraint {
            label: format!("pivot at d={lo}"),
            kind: ConstraintKind::Pivot {
                lo,
                prev: (2..=4u8).map(|d| (d, up.w[d as usize])).collect(),
            },
            min_degree: None,
        });
    }
    for (name, h, rows) in DEGREE_FOUR_CASES {
        if h <= lo {
            continue;
        }
        let delta =
            |c: [f64; 4]| c[0] * w(4) + c[1] * w(3) + c[2] * w(2) + c[3] * LinExpr::var(Var::Psi);
        cs.push(
            Constraint::branching(
                format!("degree-4 {name}"),
                vec![delta(rows[0]), delta(rows[1])],
            )
            .with_min_degree(h),
        );
    }
    cs
}

fn degree_five_six(up: &WeightSet) -> Vec<Constraint> {
    let mut cs = Vec::new();
    for d in 2..=6u8 {
        cs.push(Constraint::le(format!("monotone w{d}"), w(d - 1), w(d)));
    }
    for d in 2..=5u8 {
        cs.push(Constraint::le(
            format!("concave at {d}"),
            w(d + 1) - w(d),
            w(d) - w(d - 1),
        ));
    }
    cs.push(Constraint::equal("w1 = 0", w(1)));
    cs.push(Constraint {
        label: "pivot at d=4".into(),
        kind: ConstraintKind::Pivot {
            lo: 4.0,
            prev: (2..=4u8).map(|d| (d, up.w[d as usize])).collect(),
        },
        min_degree: None,
    });
    for p in degree_five_six_cases() {
        let out = out_lower_bound(&p).expect("d_v in {5,6}") as f64;
        let dv = p.d_v as u8;
        let dw = |d: u8| w(d) - w(d - 1);
        let mut first = w(dv) + out * dw(dv);
        let mut second = w(dv) + p.deg2() as f64 * dw(dv);
        for &d in &p.neighbor_degrees {
            first = first + w(d as u8);
            second = second + dw(d as u8);
        }
        cs.push(Constraint::branching(
            format!("degree-{} {:?}", p.d_v, p.neighbor_degrees),
            vec![first, second],
        ));
    }
    cs
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub label: String,
    pub kind: &'static str,
    pub slack: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<ConstraintCheck>,
}

impl VerifyReport {
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn violations(&self) -> Vec<&ConstraintCheck> {
        self.checks.iter().filter(|c| !c.satisfied).collect()
    }

    pub fn min_slack(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

pub const VERIFY_TOLERANCE: f64 = 1e-9;

/// Checks every constraint: inequalities within `1e-9`, branching vectors
/// by `Σ 2^{−δ_i} ≤ 1 + 1e-9`.
pub fn verify_weights(w: &WeightSet, cs: &[Constraint]) -> VerifyReport {
    let checks = cs
        .iter()
        .map(|c| {
            let slack = c.slack(w);
            ConstraintCheck {
                label: c.label.clone(),
                kind: c.kind_name(),
                slack,
                satisfied: slack >= -VERIFY_TOLERANCE,
            }
        })
        .collect();
    VerifyReport { checks }
}
