//! The `iscount` command line: argument definitions, command runners and
//! the JSON report.

pub mod scaling;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use iscount_core::coloring::chromatic_number_with;
use iscount_core::measure::{
    generate_constraints, optimize, verify_weights, ConstraintCheck, OptimizeOptions, Regime,
};
use iscount_core::oracle::brute_force_ind;
use iscount_core::solver::{count_with, SolveOptions, SolveStats};
use iscount_core::{generate, parse_graph, CardinalityFunction, Graph, GraphSpec, WeightSet};
use num_bigint::BigUint;
use serde::Serialize;

use scaling::{Family, ScalingPlan, ScalingTable, SizeRange};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ISCOUNT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "iscount",
    version,
    about = "Exact counting of independent sets, chromatic number and measure tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count independent sets, optionally weighted by a cardinality file.
    Count(CountArgs),
    /// Chromatic number by inclusion–exclusion over independent-set counts.
    Chromatic(ChromaticArgs),
    /// Check published weights against a constraint system and re-optimize.
    Weights(WeightsArgs),
    /// Compare the solver with the brute-force oracle.
    Verify(VerifyArgs),
    /// Branch-node scaling table over a random graph family.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph file in DIMACS or edge-list format.
    #[arg(required_unless_present = "gen", conflicts_with = "gen")]
    pub file: Option<PathBuf>,
    /// Generated graph, e.g. `petersen`, `cycle(7)`, `gnp(20,0.3,1)`,
    /// `random-cubic(40,2)`.
    #[arg(long, value_name = "SPEC")]
    pub gen: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExecArgs {
    /// Single-threaded run; the report omits wall time and is reproducible
    /// byte for byte.
    #[arg(long)]
    pub seq: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Measure weights as `key=value` lines (r3=0.2, s3=..., s3p=...).
    #[arg(long, value_name = "FILE")]
    pub weights: Option<PathBuf>,
    /// Per-vertex `c_out c_in` values: lines `<vertex> <c_out> <c_in>` with
    /// 0-based vertex ids.
    #[arg(long, value_name = "FILE")]
    pub cardinality: Option<PathBuf>,
    /// Never hand subcubic instances to the separator-based subroutine.
    #[arg(long)]
    pub no_three_is: bool,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Args)]
pub struct ChromaticArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// One of `subcubic`, `degree-3`, `degree-4`, `degree-5-6`.
    pub regime: String,
    /// Only check the weights; skip the optimizer.
    #[arg(long)]
    pub verify_only: bool,
    /// Check these weights instead of the published table.
    #[arg(long, value_name = "FILE")]
    pub weights: Option<PathBuf>,
    /// Restrict `degree-4` to one row, 0 to 4.
    #[arg(long)]
    pub row: Option<usize>,
    /// Largest violation still counted as satisfied.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Per-vertex `c_out c_in` values, as for `count`.
    #[arg(long, value_name = "FILE")]
    pub cardinality: Option<PathBuf>,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "random-cubic")]
    pub family: Family,
    /// Inclusive range of vertex counts, e.g. `30..60`.
    #[arg(long, value_name = "A..B")]
    pub n: SizeRange,
    /// Distance between consecutive vertex counts.
    #[arg(long, default_value_t = 5)]
    pub step: usize,
    /// First generator seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instances per vertex count, with consecutive seeds.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputInfo {
    pub source: &'static str,
    pub name: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub oracle: String,
    pub solver: String,
    pub solver_without_three_is: String,
    pub matches: bool,
    pub audits_clean: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimumReport {
    pub objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    pub satisfied: bool,
    pub weights: std::collections::BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: String,
    pub checked: String,
    pub constraints: usize,
    pub satisfied: bool,
    pub min_slack: f64,
    pub violations: Vec<ConstraintCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimum: Option<OptimumReport>,
}

/// Everything a command prints. Absent fields are omitted from the JSON.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputInfo>,
    /// Decimal string, never truncated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<RegimeReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench: Option<ScalingTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<SolveStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// A finished command: its report and exit status (0 success, 1
/// verification mismatch).
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub code: i32,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_graph(input: &InputArgs) -> Result<(Graph, InputInfo)> {
    let (g, source, name) = match (&input.file, &input.gen) {
        (Some(path), None) => {
            let g = parse_graph(&read(path)?)
                .with_context(|| format!("cannot parse {}", path.display()))?;
            (g, "file", path.display().to_string())
        }
        (None, Some(spec)) => {
            let parsed: GraphSpec = spec.parse()?;
            (generate(&parsed)?, "generator", parsed.to_string())
        }
        _ => bail!("give either a graph file or --gen"),
    };
    let info = InputInfo {
        source,
        name,
        n: g.n(),
        m: g.m(),
    };
    Ok((g, info))
}

/// Parses `<vertex> <c_out> <c_in>` lines; unlisted vertices keep (1, 1).
pub fn parse_cardinality(text: &str, g: &Graph) -> Result<CardinalityFunction> {
    let mut c = CardinalityFunction::unit(g.capacity());
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [v, out, inn] = fields[..] else {
            bail!(
                "cardinality line {}: expected `<vertex> <c_out> <c_in>`",
                i + 1
            );
        };
        let v: u32 = v
            .parse()
            .map_err(|_| anyhow!("cardinality line {}: bad vertex {v:?}", i + 1))?;
        if !g.contains(v) {
            bail!("cardinality line {}: no vertex {v}", i + 1);
        }
        let value = |s: &str| {
            s.parse::<BigUint>()
                .map_err(|_| anyhow!("cardinality line {}: bad value {s:?}", i + 1))
        };
        c.set(v, value(out)?, value(inn)?);
    }
    Ok(c)
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => {
            let t: usize = s
                .trim()
                .parse()
                .map_err(|_| anyhow!("{THREADS_ENV} must be a positive integer, got {s:?}"))?;
            if t == 0 {
                bail!("{THREADS_ENV} must be positive");
            }
            Ok(Some(t))
        }
        _ => Ok(None),
    }
}

fn solve_options(exec: &ExecArgs) -> Result<SolveOptions> {
    Ok(SolveOptions {
        parallel: !exec.seq,
        threads: threads_from_env()?,
        ..SolveOptions::default()
    })
}

fn timed<T>(exec: &ExecArgs, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let start = Instant::now();
    let x = f();
    let ms = start.elapsed().as_secs_f64() * 1e3;
    (x, (!exec.seq).then_some(ms))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Count(a) => count(a),
        Command::Chromatic(a) => chromatic(a),
        Command::Weights(a) => weights(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    }
}

fn count(a: &CountArgs) -> Result<Outcome> {
    let (g, info) = load_graph(&a.input)?;
    let mut opts = solve_options(&a.exec)?;
    opts.use_three_is = !a.no_three_is;
    if let Some(path) = &a.weights {
        let text = String::from_utf8(read(path)?).context("weight file is not UTF-8")?;
        opts.weights = WeightSet::parse_key_value(&text)?;
    }
    let c = match &a.cardinality {
        Some(path) => {
            let text = String::from_utf8(read(path)?).context("cardinality file is not UTF-8")?;
            parse_cardinality(&text, &g)?
        }
        None => CardinalityFunction::unit(g.capacity()),
    };
    let ((x, stats), ms) = timed(&a.exec, || count_with(&g, &c, &opts));
    Ok(Outcome {
        report: RunReport {
            command: "count",
            input: Some(info),
            count: Some(x.to_string()),
            stats: Some(stats),
            wall_time_ms: ms,
            ..RunReport::default()
        },
        code: 0,
    })
}

fn chromatic(a: &ChromaticArgs) -> Result<Outcome> {
    let (g, info) = load_graph(&a.input)?;
    let opts = solve_options(&a.exec)?;
    let (chi, ms) = timed(&a.exec, || chromatic_number_with(&g, &opts));
    Ok(Outcome {
        report: RunReport {
            command: "chromatic",
            input: Some(info),
            chi: Some(chi?),
            wall_time_ms: ms,
            ..RunReport::default()
        },
        code: 0,
    })
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let (g, info) = load_graph(&a.input)?;
    let c = match &a.cardinality {
        Some(path) => {
            let text = String::from_utf8(read(path)?).context("cardinality file is not UTF-8")?;
            parse_cardinality(&text, &g)?
        }
        None => CardinalityFunction::unit(g.capacity()),
    };
    let opts = SolveOptions {
        audit: true,
        ..solve_options(&a.exec)?
    };
    let ((oracle, (x, stats), (y, plain)), ms) = timed(&a.exec, || {
        let oracle = brute_force_ind(&g, Some(&c));
        let full = count_with(&g, &c, &opts);
        let plain = SolveOptions {
            use_three_is: false,
            ..opts.clone()
        };
        (oracle, full, count_with(&g, &c, &plain))
    });
    let oracle = oracle?;
    let matches = x == oracle && y == oracle;
    let audits_clean = stats.audit.clean() && plain.audit.clean();
    Ok(Outcome {
        report: RunReport {
            command: "verify",
            input: Some(info),
            count: Some(x.to_string()),
            verify: Some(VerifyOutcome {
                oracle: oracle.to_string(),
                solver: x.to_string(),
                solver_without_three_is: y.to_string(),
                matches,
                audits_clean,
            }),
            stats: Some(stats),
            wall_time_ms: ms,
            ..RunReport::default()
        },
        code: if matches && audits_clean { 0 } else { 1 },
    })
}

fn weights(a: &WeightsArgs) -> Result<Outcome> {
    let mut regimes = Regime::published(&a.regime)?;
    if let Some(row) = a.row {
        if !matches!(regimes[0].0, Regime::DegreeFour { .. }) {
            bail!("--row only applies to degree-4");
        }
        if row >= regimes.len() {
            bail!("degree-4 has rows 0 to {}", regimes.len() - 1);
        }
        regimes = vec![regimes.swap_remove(row)];
    }
    let (candidate, checked) = match &a.weights {
        Some(path) => {
            let text = String::from_utf8(read(path)?).context("weight file is not UTF-8")?;
            (
                Some(WeightSet::parse_key_value(&text)?),
                path.display().to_string(),
            )
        }
        None => (None, "published".to_string()),
    };
    let opts = OptimizeOptions::default();
    let mut reports = Vec::new();
    for (regime, published) in regimes {
        let w = candidate.clone().unwrap_or(published);
        let cs = generate_constraints(&regime);
        let rep = verify_weights(&w, &cs);
        let violations: Vec<ConstraintCheck> = rep
            .checks
            .iter()
            .filter(|c| c.slack < -a.tolerance)
            .map(|c| ConstraintCheck {
                satisfied: false,
                ..c.clone()
            })
            .collect();
        let optimum = if a.verify_only {
            None
        } else {
            let o = optimize(&regime, &opts)?;
            Some(OptimumReport {
                objective: o.objective,
                base: o.base,
                satisfied: o.report.all_satisfied(),
                weights: o.weights.to_map(),
            })
        };
        reports.push(RegimeReport {
            regime: regime.name(),
            checked: checked.clone(),
            constraints: cs.len(),
            satisfied: violations.is_empty(),
            min_slack: rep.min_slack(),
            violations,
            optimum,
        });
    }
    let ok = reports.iter().all(|r| r.satisfied);
    Ok(Outcome {
        report: RunReport {
            command: "weights",
            weights: Some(reports),
            ..RunReport::default()
        },
        code: if ok { 0 } else { 1 },
    })
}

fn bench(a: &BenchArgs) -> Result<Outcome> {
    if a.step == 0 {
        bail!("--step must be positive");
    }
    if a.seeds == 0 {
        bail!("--seeds must be positive");
    }
    if a.n.lo < 4 {
        bail!("--n must start at 4 or more");
    }
    let opts = solve_options(&a.exec)?;
    let plan = ScalingPlan {
        family: a.family,
        sizes: (a.n.lo..=a.n.hi).step_by(a.step).collect(),
        seed: a.seed,
        seeds: a.seeds,
        timed: !a.exec.seq,
    };
    let (table, ms) = timed(&a.exec, || scaling::run(&plan, &opts));
    Ok(Outcome {
        report: RunReport {
            command: "bench",
            bench: Some(table?),
            wall_time_ms: ms,
            ..RunReport::default()
        },
        code: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_files() {
        let g = Graph::empty(3);
        let c = parse_cardinality("# v out in\n0 2 3\n2 0 5\n", &g).unwrap();
        assert_eq!(c.c_out(0), &BigUint::from(2u32));
        assert_eq!(c.c_in(2), &BigUint::from(5u32));
        assert_eq!(c.c_in(1), &BigUint::from(1u32));
        assert!(parse_cardinality("3 1 1\n", &g).is_err());
        assert!(parse_cardinality("0 1\n", &g).is_err());
        assert!(parse_cardinality("0 -1 1\n", &g).is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
