//! Measures, branching numbers and the weight constraint systems.

mod constraints;
mod optimize;

pub use constraints::{
    degree_five_six_cases, degree_four_rows, generate_constraints, verify_weights, Constraint,
    ConstraintCheck, ConstraintKind, DegreeFourRow, LinExpr, Objective, Regime, Var, VerifyReport,
    DEGREE_FOUR_CASES, VERIFY_TOLERANCE,
};
pub use optimize::{
    optimize, optimize_chain, optimize_weights, ChainReport, OptimizeOptions, Optimum,
};

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::MeasureError;
use crate::graph::{Graph, Vertex};
use crate::separator::{Separation, Side};

/// Measure weights shared by all regimes.
///
/// `r`, `s`, `s3p` belong to the subcubic measure; `w` holds per-degree
/// weights of whichever higher regime is active, with `w2p`, `w3p` the
/// degree-3 compound weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSet {
    pub r: [f64; 4],
    pub s: [f64; 4],
    pub s3p: f64,
    pub w: [f64; 7],
    pub w2p: f64,
    pub w3p: f64,
    pub psi: f64,
    pub epsilon: f64,
}

impl Default for WeightSet {
    fn default() -> Self {
        WeightSet::shipped_subcubic()
    }
}

impl WeightSet {
    pub fn zero() -> Self {
        WeightSet {
            r: [0.0; 4],
            s: [0.0; 4],
            s3p: 0.0,
            w: [0.0; 7],
            w2p: 0.0,
            w3p: 0.0,
            psi: 0.0,
            epsilon: 0.01,
        }
    }

    /// Optimizer output for the subcubic system with `r_3 = 0.2` and
    /// `s_3' = 0.7`, rounded up in the seventh decimal.
    pub fn shipped_subcubic() -> Self {
        WeightSet {
            r: [0.0, 0.0, 0.0, 0.2],
            s: [0.0, 0.0, 0.6, 0.6837382],
            s3p: 0.7,
            ..WeightSet::zero()
        }
    }

    /// Published subcubic list with `s_2 = 0.6`, `s_3 = 0.6838`.
    pub fn published_subcubic() -> Self {
        WeightSet {
            r: [0.0, 0.0, 0.0, 0.2],
            s: [0.0, 0.0, 0.6, 0.6838],
            s3p: 0.7,
            ..WeightSet::zero()
        }
    }

    /// Second published subcubic list with `s_2 = 0.6352`, `s_3 = 0.6784`.
    pub fn published_subcubic_alt() -> Self {
        WeightSet {
            r: [0.0, 0.0, 0.0, 0.2],
            s: [0.0, 0.0, 0.6352, 0.6784],
            s3p: 0.7,
            ..WeightSet::zero()
        }
    }

    /// Published degree-3 weights on top of the published subcubic list.
    pub fn published_degree_three() -> Self {
        let mut w = WeightSet::published_subcubic();
        w.w[2] = 0.0033;
        w.w[3] = 0.1973;
        w.w2p = 0.0228;
        w.w3p = 0.1876;
        w
    }

    /// The five published maximum-degree-4 rows, `ψ` filled in by balancing
    /// the two `(2,2,2,2)` cases of the first row.
    pub fn published_degree_four() -> Vec<WeightSet> {
        let rows = [
            (0.0227913, 0.1875202, 0.3295266),
            (0.0659881, 0.1875202, 0.2863298),
            (0.0795475, 0.1897802, 0.2772902),
            (0.0911988, 0.1936639, 0.2734064),
            (0.1057321, 0.1998925, 0.2713302),
        ];
        rows.iter()
            .enumerate()
            .map(|(i, &(w2, w3, w4))| {
                let mut w = WeightSet::zero();
                w.w[2] = w2;
                w.w[3] = w3;
                w.w[4] = w4;
                if i == 0 {
                    w.psi = balanced_psi(w2, w3, w4);
                }
                w
            })
            .collect()
    }

    /// Published weights for maximum degree 4 to 6.
    pub fn published_degree_six() -> Self {
        let mut w = WeightSet::zero();
        w.w = [
            0.0, 0.0, 0.1146078, 0.2017931, 0.2713406, 0.2977566, 0.3051140,
        ];
        w
    }

    /// `B = 6·s_3`.
    pub fn balance(&self) -> f64 {
        6.0 * self.s[3]
    }

    /// `r_d`, extended linearly as `(d − 2)·r_3` above degree 3.
    pub fn r_deg(&self, d: usize) -> f64 {
        if d <= 3 {
            self.r[d]
        } else {
            (d - 2) as f64 * self.r[3]
        }
    }

    pub fn s_deg(&self, d: usize) -> f64 {
        self.s[d.min(3)]
    }

    pub fn w_deg(&self, d: usize) -> f64 {
        self.w[d.min(6)]
    }

    pub fn get(&self, v: Var) -> f64 {
        match v {
            Var::R(d) => self.r[d as usize],
            Var::S(d) => self.s[d as usize],
            Var::S3p => self.s3p,
            Var::W(d) => self.w[d as usize],
            Var::W2p => self.w2p,
            Var::W3p => self.w3p,
            Var::Psi => self.psi,
            Var::Slope(_) => 0.0,
        }
    }

    pub fn set(&mut self, v: Var, x: f64) {
        match v {
            Var::R(d) => self.r[d as usize] = x,
            Var::S(d) => self.s[d as usize] = x,
            Var::S3p => self.s3p = x,
            Var::W(d) => self.w[d as usize] = x,
            Var::W2p => self.w2p = x,
            Var::W3p => self.w3p = x,
            Var::Psi => self.psi = x,
            Var::Slope(_) => {}
        }
    }

    /// Parses `key=value` lines over the shipped defaults. Keys: `r0`..`r3`,
    /// `s0`..`s3`, `s3p`, `w0`..`w6`, `w2p`, `w3p`, `psi`, `epsilon`; a
    /// trailing `'` may stand for `p`. `#` starts a comment.
    pub fn parse_key_value(text: &str) -> Result<WeightSet, MeasureError> {
        let mut w = WeightSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                MeasureError::WeightFile(format!("line {}: expected key=value", i + 1))
            })?;
            let key = key.trim().replace('\'', "p");
            let value: f64 = value.trim().parse().map_err(|_| {
                MeasureError::WeightFile(format!("line {}: bad number {:?}", i + 1, value.trim()))
            })?;
            if !value.is_finite() {
                return Err(MeasureError::WeightFile(format!(
                    "line {}: not finite",
                    i + 1
                )));
            }
            match key.as_str() {
                "epsilon" | "eps" => {
                    if value <= 0.0 {
                        return Err(MeasureError::WeightFile("epsilon must be positive".into()));
                    }
                    w.epsilon = value
                }
                "psi" => w.psi = value,
                "s3p" => w.s3p = value,
                "w2p" => w.w2p = value,
                "w3p" => w.w3p = value,
                k => {
                    let (head, idx) = k.split_at(1);
                    let idx: usize = idx.parse().map_err(|_| {
                        MeasureError::WeightFile(format!("line {}: unknown key {k:?}", i + 1))
                    })?;
                    match (head, idx) {
                        ("r", 0..=3) => w.r[idx] = value,
                        ("s", 0..=3) => w.s[idx] = value,
                        ("w", 0..=6) => w.w[idx] = value,
                        _ => {
                            return Err(MeasureError::WeightFile(format!(
                                "line {}: unknown key {k:?}",
                                i + 1
                            )))
                        }
                    }
                }
            }
        }
        Ok(w)
    }

    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (d, x) in self.r.iter().enumerate() {
            out.push_str(&format!("r{d}={x}\n"));
        }
        for (d, x) in self.s.iter().enumerate() {
            out.push_str(&format!("s{d}={x}\n"));
        }
        out.push_str(&format!("s3p={}\n", self.s3p));
        for (d, x) in self.w.iter().enumerate() {
            out.push_str(&format!("w{d}={x}\n"));
        }
        out.push_str(&format!(
            "w2p={}\nw3p={}\npsi={}\nepsilon={}\n",
            self.w2p, self.w3p, self.psi, self.epsilon
        ));
        out
    }

    /// Named weights as a sorted map, for reports.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.to_key_value()
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.parse().unwrap()))
            .collect()
    }
}

/// `ψ` balancing the two `(2,2,2,2)` cases: both vectors become equal.
pub fn balanced_psi(w2: f64, w3: f64, w4: f64) -> f64 {
    let a = 5.0 * w4 - 4.0 * w3 + 4.0 * w2;
    let b = 4.0 * w4 - 2.0 * w3 + 3.0 * w2;
    (a - b) / 2.0
}

/// Measure decreases of one branching rule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchingVector {
    pub deltas: Vec<f64>,
    pub label: String,
}

impl BranchingVector {
    pub fn new(label: impl Into<String>, deltas: Vec<f64>) -> Self {
        BranchingVector {
            deltas,
            label: label.into(),
        }
    }

    /// `Σ 2^{−δ_i}`; the vector is feasible for base 2 iff this is at most 1.
    pub fn base_two_sum(&self) -> f64 {
        self.deltas.iter().map(|d| (-d).exp2()).sum()
    }

    pub fn tau(&self) -> Result<f64, MeasureError> {
        branching_number(&self.deltas)
    }
}

/// Unique root `x ≥ 1` of `Σ x^{−δ_i} = 1`, by bracketing and bisection.
pub fn branching_number(deltas: &[f64]) -> Result<f64, MeasureError> {
    if deltas.is_empty() {
        return Err(MeasureError::EmptyVector);
    }
    if let Some(&d) = deltas.iter().find(|&&d| !(d > 0.0) || !d.is_finite()) {
        return Err(MeasureError::NonDecreasingBranch(d));
    }
    let f = |x: f64| deltas.iter().map(|d| x.powf(-d)).sum::<f64>() - 1.0;
    let mut lo = 1.0;
    let mut hi = 2.0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BalanceRegime {
    Balanced,
    Imbalanced,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub mu_s: f64,
    pub mu_r_r: f64,
    pub mu_r_l: f64,
    pub mu_o: f64,
    pub total: f64,
    pub regime: BalanceRegime,
}

/// `μ_r(X) = Σ_{v ∈ X} r_{d(v)}`.
pub fn mu_r<I: IntoIterator<Item = Vertex>>(g: &Graph, w: &WeightSet, xs: I) -> f64 {
    xs.into_iter().map(|v| w.r_deg(g.degree(v))).sum()
}

/// `log_{1+ε}(x)`, clamped to 0 for `x ≤ 1`.
pub fn clamped_log(x: f64, epsilon: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        x.ln() / epsilon.ln_1p()
    }
}

/// The subcubic separation measure, 0 for the empty graph. `spiders` lists the separator vertices
/// carrying the spider weight `s_3'`.
pub fn measure_mu83(
    g: &Graph,
    sep: &Separation,
    spiders: &[Vertex],
    w: &WeightSet,
) -> MeasureReport {
    if g.is_empty() {
        return MeasureReport {
            mu_s: 0.0,
            mu_r_r: 0.0,
            mu_r_l: 0.0,
            mu_o: 0.0,
            total: 0.0,
            regime: BalanceRegime::Balanced,
        };
    }
    let mut mu_s = 0.0;
    let mut left = 0.0;
    let mut right = 0.0;
    for v in g.vertices() {
        let d = g.degree(v);
        match sep.side(v) {
            Side::S => {
                mu_s += if spiders.contains(&v) {
                    w.s3p
                } else {
                    w.s_deg(d)
                }
            }
            Side::L => left += w.r_deg(d),
            Side::R => right += w.r_deg(d),
        }
    }
    if left > right {
        std::mem::swap(&mut left, &mut right);
    }
    let b = w.balance();
    let mu_o =
        (b - (right - left) / 2.0).max(0.0) + (1.0 + b) * clamped_log(right + mu_s, w.epsilon);
    let regime = if right - left <= 2.0 * b {
        BalanceRegime::Balanced
    } else {
        BalanceRegime::Imbalanced
    };
    MeasureReport {
        mu_s,
        mu_r_r: right,
        mu_r_l: left,
        mu_o,
        total: mu_s + right + mu_o,
        regime,
    }
}

/// `Σ_v w_{d(v)}`, plus `ψ` when every vertex has degree 2 or 4, a degree-4
/// vertex exists and no two degree-4 vertices are adjacent. Graphs with a
/// vertex of degree 7 or more are measured as `n·log2 τ(1, 8)`.
pub fn measure_general(g: &Graph, w: &WeightSet) -> f64 {
    if g.max_degree() >= 7 {
        let tau = branching_number(&[1.0, 8.0]).expect("positive vector");
        return g.n() as f64 * tau.log2();
    }
    let base: f64 = g.vertices().map(|v| w.w_deg(g.degree(v))).sum();
    if degree_four_potential_applies(g) {
        base + w.psi
    } else {
        base
    }
}

pub fn degree_four_potential_applies(g: &Graph) -> bool {
    let mut any4 = false;
    for v in g.vertices() {
        match g.degree(v) {
            2 => {}
            4 => {
                any4 = true;
                if g.neighbors(v).iter().any(|&u| g.degree(u) == 4) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    any4
}

/// Upper bound on the subcubic measure per vertex at average degree `d`,
/// ignoring `μ_o`: two linear pieces meeting at `d = 28/11`.
pub fn mu83_upper_bound(d: Rational64, w: &WeightSet) -> Result<f64, MeasureError> {
    if d < Rational64::from_integer(2) || d > Rational64::new(8, 3) {
        return Err(MeasureError::DegreeOutOfRange(d.to_string()));
    }
    let x = d.to_f64().expect("small rational");
    let tail = 0.5 * (5.0 / 6.0 * (x - 2.0) * w.r[3] + (3.0 - x) * w.r[2]);
    if d <= Rational64::new(28, 11) {
        Ok((x - 2.0) / 6.0 * w.s3p + tail)
    } else {
        Ok((8.0 - 3.0 * x) / 4.0 * w.s3p + (11.0 * x - 28.0) / 12.0 * w.s[3] + tail)
    }
}

/// Degree profile of a branching vertex of degree 5 or 6.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborProfile {
    pub d_v: usize,
    pub neighbor_degrees: Vec<usize>,
}

impl NeighborProfile {
    pub fn new(d_v: usize, mut neighbor_degrees: Vec<usize>) -> Self {
        neighbor_degrees.sort_unstable();
        NeighborProfile {
            d_v,
            neighbor_degrees,
        }
    }

    pub fn deg2(&self) -> usize {
        self.neighbor_degrees.iter().filter(|&&d| d == 2).count()
    }
}

/// Minimum number of edges leaving `N(v)` for a 3-connected graph without
/// multiplier reductions or lazy 2-separators.
pub fn out_lower_bound(p: &NeighborProfile) -> Result<usize, MeasureError> {
    if p.d_v != 5 && p.d_v != 6 {
        return Err(MeasureError::BadOutDegree(p.d_v));
    }
    let nd = &p.neighbor_degrees;
    if nd.iter().all(|&d| d == 2) {
        return Ok(p.d_v);
    }
    if p.d_v == 6 && nd.as_slice() == [2, 2, 2, 2, 2, 3] {
        return Ok(5);
    }
    let odd = nd.iter().sum::<usize>() % 2 == 1;
    Ok(match (p.d_v, odd) {
        (5, false) | (6, true) => 3,
        _ => 4,
    })
}

/// The degree-5/6 branching vector for a profile.
pub fn degree_five_six_vector(
    p: &NeighborProfile,
    w: &WeightSet,
) -> Result<BranchingVector, MeasureError> {
    let out = out_lower_bound(p)? as f64;
    let dw = |d: usize| w.w_deg(d) - if d == 0 { 0.0 } else { w.w_deg(d - 1) };
    let wv = w.w_deg(p.d_v);
    let first = wv + p.neighbor_degrees.iter().map(|&d| w.w_deg(d)).sum::<f64>() + out * dw(p.d_v);
    let second =
        wv + p.neighbor_degrees.iter().map(|&d| dw(d)).sum::<f64>() + p.deg2() as f64 * dw(p.d_v);
    Ok(BranchingVector::new(
        format!("deg{} {:?}", p.d_v, p.neighbor_degrees),
        vec![first, second],
    ))
}

impl fmt::Display for BranchingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.deltas.iter().map(|d| format!("{d:.7}")).collect();
        write!(f, "{}: ({})", self.label, parts.join(", "))
    }
}
