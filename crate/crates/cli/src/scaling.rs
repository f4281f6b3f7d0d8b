//! Node-count scaling tables for the `bench` command.

use std::str::FromStr;
use std::time::Instant;

use iscount_core::io::{generate, GraphSpec, Subdivision};
use iscount_core::solver::{count_with, SolveOptions};
use iscount_core::{CardinalityFunction, GenerateError, Graph};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RandomCubic,
    RandomSubcubicNo333,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random-cubic" => Ok(Family::RandomCubic),
            "random-subcubic-no333" => Ok(Family::RandomSubcubicNo333),
            _ => Err(format!(
                "unknown family {s:?}; expected random-cubic or random-subcubic-no333"
            )),
        }
    }
}

/// Inclusive range of vertex counts written `a..b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
        let b = b.strip_prefix('=').unwrap_or(b);
        let lo: usize = a.trim().parse().map_err(|_| format!("bad bound {a:?}"))?;
        let hi: usize = b.trim().parse().map_err(|_| format!("bad bound {b:?}"))?;
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(SizeRange { lo, hi })
    }
}

/// The benchmark instance for `n` vertices. Cubic graphs need an even order,
/// so odd `n` takes a cubic graph on `n − 1` vertices with one subdivided
/// edge.
pub fn instance(family: Family, n: usize, seed: u64) -> Result<Graph, GenerateError> {
    let spec = match family {
        Family::RandomCubic if n.is_multiple_of(2) => GraphSpec::RandomCubic { n, seed },
        Family::RandomCubic => GraphSpec::RandomSubcubic {
            n: n - 1,
            subdivision: Subdivision::Edges(1),
            seed,
        },
        Family::RandomSubcubicNo333 => GraphSpec::RandomSubcubic {
            n: n - n % 2,
            subdivision: Subdivision::NoThreeThreeThree,
            seed,
        },
    };
    generate(&spec)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub instances: usize,
    pub mean_branch_nodes: f64,
    pub mean_log2_branch_nodes: f64,
    pub max_depth: usize,
    pub mean_max_separator_size: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_time_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingTable {
    pub family: Family,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log2(branch_nodes)` against `n`.
    pub slope: f64,
    pub intercept: f64,
    /// `2^slope`.
    pub base: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, my - slope * mx)
}

pub struct ScalingPlan {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub seeds: u64,
    pub timed: bool,
}

/// Solves every instance and fits the growth of the branch-node count.
pub fn run(plan: &ScalingPlan, opts: &SolveOptions) -> Result<ScalingTable, GenerateError> {
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &n in &plan.sizes {
        let mut nodes = 0.0;
        let mut logs = 0.0;
        let mut depth = 0;
        let mut seps = 0.0;
        let mut time = 0.0;
        for seed in plan.seed..plan.seed + plan.seeds {
            let g = instance(plan.family, n, seed)?;
            let start = Instant::now();
            let (_, stats) = count_with(&g, &CardinalityFunction::unit(g.capacity()), opts);
            time += start.elapsed().as_secs_f64() * 1e3;
            let log = (stats.branch_nodes.max(1) as f64).log2();
            points.push((n as f64, log));
            nodes += stats.branch_nodes as f64;
            logs += log;
            depth = depth.max(stats.max_depth);
            seps += stats.max_separator_size as f64;
        }
        let k = plan.seeds as f64;
        rows.push(ScalingRow {
            n,
            instances: plan.seeds as usize,
            mean_branch_nodes: nodes / k,
            mean_log2_branch_nodes: logs / k,
            max_depth: depth,
            mean_max_separator_size: seps / k,
            mean_time_ms: plan.timed.then_some(time / k),
        });
    }
    let (slope, intercept) = least_squares(&points);
    Ok(ScalingTable {
        family: plan.family,
        rows,
        slope,
        intercept,
        base: slope.exp2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!("30..60".parse(), Ok(SizeRange { lo: 30, hi: 60 }));
        assert_eq!("4..=4".parse(), Ok(SizeRange { lo: 4, hi: 4 }));
        assert!("9..3".parse::<SizeRange>().is_err());
        assert!("9".parse::<SizeRange>().is_err());
    }

    #[test]
    fn fit() {
        let (s, b) = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
        assert!((s - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn odd_cubic_sizes() {
        for n in [7, 35] {
            let g = instance(Family::RandomCubic, n, 3).unwrap();
            assert_eq!(g.n(), n);
            assert_eq!(g.vertices().filter(|&v| g.degree(v) == 2).count(), 1);
        }
        let g = instance(Family::RandomCubic, 30, 3).unwrap();
        assert!(g.vertices().all(|v| g.degree(v) == 3));
    }
}
