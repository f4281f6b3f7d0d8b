//! Weight optimization.
//!
//! Every constraint is convex in the weights: inequalities are affine and a
//! branching constraint `Σ 2^{−δ_i} ≤ 1` is a log-sum-exp of affine forms.
//! The optimizer bisects on the objective value and decides feasibility of
//! each level set with the ellipsoid method.

use std::collections::BTreeMap;

use serde::Serialize;

use super::constraints::{
    degree_four_rows, generate_constraints, verify_weights, Constraint, ConstraintKind, LinExpr,
    Objective, Regime, Var, VerifyReport,
};
use super::WeightSet;
use crate::error::MeasureError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeOptions {
    /// Stop bisecting once the objective bracket is this narrow.
    pub tolerance: f64,
    /// Ellipsoid iterations per feasibility test.
    pub max_iterations: usize,
    /// Radius of the initial ball around the starting point.
    pub radius: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            tolerance: 1e-10,
            max_iterations: 40_000,
            radius: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Optimum {
    pub regime: String,
    pub weights: WeightSet,
    pub objective: f64,
    /// `2^{objective}` for regimes whose objective is a running-time exponent.
    pub base: Option<f64>,
    pub report: VerifyReport,
}

/// Convex function `g(x) ≤ 0` over the optimizer's coordinates.
enum Cut {
    Affine {
        a: Vec<f64>,
        b: f64,
    },
    /// `log2 Σ 2^{−(a_i·x + b_i)} ≤ 0`.
    LogSumExp {
        rows: Vec<(Vec<f64>, f64)>,
    },
}

impl Cut {
    fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        match self {
            Cut::Affine { a, b } => (dot(a, x) + b, a.clone()),
            Cut::LogSumExp { rows } => {
                let e: Vec<f64> = rows.iter().map(|(a, b)| -(dot(a, x) + b)).collect();
                let m = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let ws: Vec<f64> = e.iter().map(|v| (v - m).exp2()).collect();
                let total: f64 = ws.iter().sum();
                let value = m + total.log2();
                let mut g = vec![0.0; x.len()];
                for ((a, _), wi) in rows.iter().zip(&ws) {
                    for (gj, aj) in g.iter_mut().zip(a) {
                        *gj -= wi / total * aj;
                    }
                }
                (value, g)
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Problem {
    vars: Vec<Var>,
    cuts: Vec<(usize, Cut)>,
    objective: Vec<(Vec<f64>, f64)>,
    labels: Vec<String>,
}

impl Problem {
    fn build(
        cs: &[Constraint],
        objective: &Objective,
        free: &[Var],
        fixed: &WeightSet,
    ) -> Result<Problem, MeasureError> {
        let mut vars: Vec<Var> = free.to_vec();
        let mut slope = 0u8;
        for c in cs {
            if let ConstraintKind::Pivot { .. } = c.kind {
                vars.push(Var::Slope(slope));
                slope += 1;
            }
        }
        let index: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = vars.len();
        let affine = |e: &LinExpr| -> (Vec<f64>, f64) {
            let e = e.substitute(|v| {
                if index.contains_key(&v) {
                    None
                } else {
                    Some(fixed.get(v))
                }
            });
            let mut a = vec![0.0; n];
            for (v, c) in &e.terms {
                a[index[v]] = *c;
            }
            (a, e.constant)
        };
        let mut cuts = Vec::new();
        let mut labels = Vec::new();
        let mut slope = 0u8;
        for (ci, c) in cs.iter().enumerate() {
            labels.push(c.label.clone());
            match &c.kind {
                ConstraintKind::AtLeast(e) => {
                    let (a, b) = affine(e);
                    cuts.push((ci, Cut::Affine { a: neg(&a), b: -b }));
                }
                ConstraintKind::Equal(e) => {
                    let (a, b) = affine(e);
                    if a.iter().any(|&x| x != 0.0) {
                        cuts.push((
                            ci,
                            Cut::Affine {
                                a: a.clone(),
                                b: b - 1e-12,
                            },
                        ));
                        cuts.push((
                            ci,
                            Cut::Affine {
                                a: neg(&a),
                                b: -b - 1e-12,
                            },
                        ));
                    } else if b.abs() > 1e-12 {
                        return Err(MeasureError::Infeasible {
                            binding: vec![c.label.clone()],
                        });
                    }
                }
                ConstraintKind::Branching(ds) => {
                    let rows = ds.iter().map(&affine).collect();
                    cuts.push((ci, Cut::LogSumExp { rows }));
                }
                ConstraintKind::Pivot { lo, prev } => {
                    let si = index[&Var::Slope(slope)];
                    slope += 1;
                    for &(d, p) in prev {
                        // w_d − p − c·(d − lo) ≥ 0
                        let (mut a, b) = affine(&LinExpr::var(Var::W(d)));
                        a[si] -= d as f64 - lo;
                        cuts.push((
                            ci,
                            Cut::Affine {
                                a: neg(&a),
                                b: p - b,
                            },
                        ));
                    }
                    let mut a = vec![0.0; n];
                    a[si] = 1.0;
                    cuts.push((ci, Cut::Affine { a, b: 0.0 }));
                }
            }
        }
        let objective = objective.pieces.iter().map(affine).collect();
        Ok(Problem {
            vars,
            cuts,
            objective,
            labels,
        })
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.objective
            .iter()
            .map(|(a, b)| dot(a, x) + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Ellipsoid search for a point with every cut `≤ 0` and objective
    /// `≤ level`. On failure returns how often each constraint produced a cut.
    fn feasible_point(
        &self,
        center: &[f64],
        level: f64,
        opts: &OptimizeOptions,
    ) -> Result<Vec<f64>, Vec<usize>> {
        let n = center.len();
        let mut x = center.to_vec();
        let mut p = vec![vec![0.0; n]; n];
        for (i, row) in p.iter_mut().enumerate() {
            row[i] = opts.radius * opts.radius;
        }
        let mut hits = vec![0usize; self.labels.len()];
        let nf = n as f64;
        for _ in 0..opts.max_iterations {
            let mut worst: Option<(f64, Vec<f64>, Option<usize>)> = None;
            for (ci, cut) in &self.cuts {
                let (v, g) = cut.value_and_grad(&x);
                if v > 0.0 && worst.as_ref().is_none_or(|w| v > w.0) {
                    worst = Some((v, g, Some(*ci)));
                }
            }
            if worst.is_none() {
                for (a, b) in &self.objective {
                    let v = dot(a, &x) + b - level;
                    if v > 0.0 && worst.as_ref().is_none_or(|w| v > w.0) {
                        worst = Some((v, a.clone(), None));
                    }
                }
            }
            let Some((v, g, ci)) = worst else {
                return Ok(x);
            };
            if let Some(ci) = ci {
                hits[ci] += 1;
            }
            let pg: Vec<f64> = p.iter().map(|row| dot(row, &g)).collect();
            let gpg = dot(&g, &pg);
            if !(gpg > 0.0) {
                return Err(hits);
            }
            let norm = gpg.sqrt();
            let alpha = v / norm;
            if alpha >= 1.0 || norm < 1e-13 {
                return Err(hits);
            }
            let gt: Vec<f64> = pg.iter().map(|z| z / norm).collect();
            let step = (1.0 + nf * alpha) / (nf + 1.0);
            for (xi, gi) in x.iter_mut().zip(&gt) {
                *xi -= step * gi;
            }
            let scale = nf * nf * (1.0 - alpha * alpha) / (nf * nf - 1.0);
            let shrink = 2.0 * (1.0 + nf * alpha) / ((nf + 1.0) * (1.0 + alpha));
            for i in 0..n {
                for j in 0..n {
                    p[i][j] = scale * (p[i][j] - shrink * gt[i] * gt[j]);
                }
            }
            for i in 0..n {
                for j in 0..i {
                    let avg = 0.5 * (p[i][j] + p[j][i]);
                    p[i][j] = avg;
                    p[j][i] = avg;
                }
            }
            if (0..n).all(|i| p[i][i] < 1e-24) {
                return Err(hits);
            }
        }
        Err(hits)
    }

    fn weights(&self, x: &[f64], fixed: &WeightSet) -> WeightSet {
        let mut w = fixed.clone();
        for (&v, &xi) in self.vars.iter().zip(x) {
            w.set(v, xi);
        }
        w
    }
}

fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

/// Minimizes `objective` over the `free` variables, all other weights taken
/// from `fixed`. The result satisfies every constraint exactly as evaluated
/// by [`verify_weights`].
pub fn optimize_weights(
    cs: &[Constraint],
    objective: &Objective,
    free: &[Var],
    fixed: &WeightSet,
    opts: &OptimizeOptions,
) -> Result<(WeightSet, f64), MeasureError> {
    let problem = Problem::build(cs, objective, free, fixed)?;
    let start: Vec<f64> = problem
        .vars
        .iter()
        .map(|v| match v {
            Var::Slope(_) => -0.01,
            Var::Psi => 0.0,
            _ => 0.3,
        })
        .collect();
    let mut best = match problem.feasible_point(&start, f64::INFINITY, opts) {
        Ok(x) => x,
        Err(hits) => {
            let total: usize = hits.iter().sum();
            let mut binding: Vec<(usize, &String)> = hits
                .iter()
                .zip(&problem.labels)
                .filter(|(&h, _)| h > 0 && h * 20 >= total)
                .map(|(&h, l)| (h, l))
                .collect();
            binding.sort_by_key(|b| std::cmp::Reverse(b.0));
            return Err(MeasureError::Infeasible {
                binding: binding.into_iter().map(|(_, l)| l.clone()).collect(),
            });
        }
    };
    let mut hi = problem.objective(&best);
    let mut lo = hi - 2.0;
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        match problem.feasible_point(&best, mid, opts) {
            Ok(x) => {
                hi = problem.objective(&x).min(mid);
                best = x;
            }
            Err(_) => lo = mid,
        }
    }
    let w = problem.weights(&best, fixed);
    let value = objective.eval(|v| w.get(v));
    Ok((w, value))
}

fn optimize_regime(regime: &Regime, opts: &OptimizeOptions) -> Result<Optimum, MeasureError> {
    let cs = generate_constraints(regime);
    let objective = regime.objective();
    let (weights, value) =
        optimize_weights(&cs, &objective, &regime.free_vars(), &regime.fixed(), opts)?;
    let report = verify_weights(&weights, &cs);
    Ok(Optimum {
        regime: regime.name(),
        weights,
        objective: value,
        base: regime.reports_base().then(|| value.exp2()),
        report,
    })
}

/// Optimized weights for every regime, each feeding the next.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub subcubic: Optimum,
    pub degree_three: Optimum,
    pub degree_four: Vec<Optimum>,
    pub degree_five_six: Optimum,
}

impl ChainReport {
    pub fn all(&self) -> Vec<&Optimum> {
        let mut out = vec![&self.subcubic, &self.degree_three];
        out.extend(self.degree_four.iter());
        out.push(&self.degree_five_six);
        out
    }
}

pub fn optimize_chain(opts: &OptimizeOptions) -> Result<ChainReport, MeasureError> {
    let subcubic = optimize_regime(&Regime::Subcubic, opts)?;
    let degree_three = optimize_regime(
        &Regime::DegreeThree {
            upstream: subcubic.weights.clone(),
        },
        opts,
    )?;
    let mut degree_four: Vec<Optimum> = Vec::new();
    for row in 0..degree_four_rows().len() {
        let upstream = match degree_four.last() {
            Some(prev) => prev.weights.clone(),
            None => degree_three.weights.clone(),
        };
        degree_four.push(optimize_regime(
            &Regime::DegreeFour { row, upstream },
            opts,
        )?);
    }
    let degree_five_six = optimize_regime(
        &Regime::DegreeFiveSix {
            upstream: degree_four.last().expect("five rows").weights.clone(),
        },
        opts,
    )?;
    Ok(ChainReport {
        subcubic,
        degree_three,
        degree_four,
        degree_five_six,
    })
}

/// Optimizes a single regime on its own constraint system.
pub fn optimize(regime: &Regime, opts: &OptimizeOptions) -> Result<Optimum, MeasureError> {
    optimize_regime(regime, opts)
}
