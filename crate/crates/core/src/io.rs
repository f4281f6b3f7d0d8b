//! Graph input formats and deterministic generators.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GenerateError, ParseError};
use crate::graph::{Graph, Vertex};

/// Parses DIMACS edge format: `c` comments, one `p edge n m` header and
/// `e u v` lines with 1-based indices.
pub fn parse_dimacs(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut g = Graph::empty(0);
    let mut count = 0usize;
    let mut last_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        msg: "second problem line".into(),
                    });
                }
                let fields: Vec<&str> = parts.collect();
                if fields.len() != 3 || !matches!(fields[0], "edge" | "edges" | "col") {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        msg: format!("expected `p edge <n> <m>`, got {line:?}"),
                    });
                }
                let n = parse_count(fields[1], line_no)?;
                let m = parse_count(fields[2], line_no)?;
                header = Some((n, m, line_no));
                g = Graph::empty(n);
            }
            Some("e") => {
                let Some((n, m, _)) = header else {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        msg: "edge line before problem line".into(),
                    });
                };
                let fields: Vec<&str> = parts.collect();
                if fields.len() != 2 {
                    return Err(ParseError::MalformedLine {
                        line: line_no,
                        msg: format!("expected `e <u> <v>`, got {line:?}"),
                    });
                }
                let u = parse_index(fields[0], line_no)?;
                let v = parse_index(fields[1], line_no)?;
                count += 1;
                if count > m {
                    return Err(ParseError::EdgeCountMismatch {
                        line: line_no,
                        expected: m,
                        found: count,
                    });
                }
                add_checked(&mut g, u, v, 1, n, line_no)?;
            }
            _ => {
                return Err(ParseError::MalformedLine {
                    line: line_no,
                    msg: format!("unrecognized line {line:?}"),
                })
            }
        }
    }
    let Some((_, m, header_line)) = header else {
        return Err(ParseError::MalformedHeader {
            line: last_line.max(1),
            msg: "missing problem line".into(),
        });
    };
    if count != m {
        return Err(ParseError::EdgeCountMismatch {
            line: header_line,
            expected: m,
            found: count,
        });
    }
    Ok(g)
}

/// Parses the plain edge list: first line `n m`, then `m` lines `u v` with
/// 0-based indices. Lines starting with `#` are comments.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut g = Graph::empty(0);
    let mut count = 0usize;
    let mut last_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        msg: format!("expected `<n> <m>`, got {line:?}"),
                    });
                }
                let n = parse_count(fields[0], line_no)?;
                let m = parse_count(fields[1], line_no)?;
                header = Some((n, m, line_no));
                g = Graph::empty(n);
            }
            Some((n, m, _)) => {
                if fields.len() != 2 {
                    return Err(ParseError::MalformedLine {
                        line: line_no,
                        msg: format!("expected `<u> <v>`, got {line:?}"),
                    });
                }
                let u = parse_index(fields[0], line_no)?;
                let v = parse_index(fields[1], line_no)?;
                count += 1;
                if count > m {
                    return Err(ParseError::EdgeCountMismatch {
                        line: line_no,
                        expected: m,
                        found: count,
                    });
                }
                add_checked(&mut g, u, v, 0, n, line_no)?;
            }
        }
    }
    let Some((_, m, header_line)) = header else {
        return Err(ParseError::MalformedHeader {
            line: last_line.max(1),
            msg: "missing `<n> <m>` line".into(),
        });
    };
    if count != m {
        return Err(ParseError::EdgeCountMismatch {
            line: header_line,
            expected: m,
            found: count,
        });
    }
    Ok(g)
}

/// DIMACS when the first significant line is a `c` or `p` line, otherwise the
/// edge list.
pub fn parse_graph(bytes: &[u8]) -> Result<Graph, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError::Encoding)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    match first {
        Some(l) if l.starts_with('p') || l.starts_with('c') => parse_dimacs(text),
        _ => parse_edge_list(text),
    }
}

fn parse_count(s: &str, line: usize) -> Result<usize, ParseError> {
    s.parse::<usize>().map_err(|_| ParseError::MalformedHeader {
        line,
        msg: format!("bad count {s:?}"),
    })
}

fn parse_index(s: &str, line: usize) -> Result<u64, ParseError> {
    s.parse::<u64>().map_err(|_| ParseError::MalformedLine {
        line,
        msg: format!("bad vertex index {s:?}"),
    })
}

fn add_checked(
    g: &mut Graph,
    u: u64,
    v: u64,
    base: u64,
    n: usize,
    line: usize,
) -> Result<(), ParseError> {
    for x in [u, v] {
        if x < base || x - base >= n as u64 {
            return Err(ParseError::IndexOutOfRange { line, index: x, n });
        }
    }
    if u == v {
        return Err(ParseError::SelfLoop { line, vertex: u });
    }
    let (a, b) = ((u - base) as Vertex, (v - base) as Vertex);
    if g.has_edge(a, b) {
        return Err(ParseError::DuplicateEdge { line, u, v });
    }
    g.add_edge(a, b).expect("checked above");
    Ok(())
}

/// DIMACS text for `g`; live vertices are numbered `1..=n` in id order.
pub fn to_dimacs(g: &Graph) -> String {
    let mut index = vec![0usize; g.capacity()];
    for (i, v) in g.vertices().enumerate() {
        index[v as usize] = i + 1;
    }
    let mut out = format!("p edge {} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", index[u as usize], index[v as usize]));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum NamedGraph {
    Petersen,
    Path(usize),
    Cycle(usize),
    Complete(usize),
    /// Two hubs joined by three internally disjoint paths with the given
    /// numbers of interior vertices.
    Theta(usize, usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subdivision {
    /// Subdivide this many distinct edges.
    Edges(usize),
    /// Subdivide one edge at every degree-3 vertex that still lacks a
    /// degree-2 neighbor, which rules out (3,3,3) vertices.
    NoThreeThreeThree,
}

/// Generator description; the seed fully determines random graphs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GraphSpec {
    Named(NamedGraph),
    Gnp {
        n: usize,
        p: f64,
        seed: u64,
    },
    RandomCubic {
        n: usize,
        seed: u64,
    },
    RandomSubcubic {
        n: usize,
        subdivision: Subdivision,
        seed: u64,
    },
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Named(NamedGraph::Petersen) => write!(f, "petersen"),
            GraphSpec::Named(NamedGraph::Path(n)) => write!(f, "path({n})"),
            GraphSpec::Named(NamedGraph::Cycle(n)) => write!(f, "cycle({n})"),
            GraphSpec::Named(NamedGraph::Complete(n)) => write!(f, "complete({n})"),
            GraphSpec::Named(NamedGraph::Theta(a, b, c)) => write!(f, "theta({a},{b},{c})"),
            GraphSpec::Gnp { n, p, seed } => write!(f, "gnp({n},{p},{seed})"),
            GraphSpec::RandomCubic { n, seed } => write!(f, "random-cubic({n},{seed})"),
            GraphSpec::RandomSubcubic {
                n,
                subdivision: Subdivision::Edges(k),
                seed,
            } => write!(f, "random-subcubic({n},{k},{seed})"),
            GraphSpec::RandomSubcubic {
                n,
                subdivision: Subdivision::NoThreeThreeThree,
                seed,
            } => write!(f, "random-subcubic-no333({n},{seed})"),
        }
    }
}

impl std::str::FromStr for GraphSpec {
    type Err = GenerateError;

    /// Accepts `petersen`, `path(n)`, `cycle(n)`, `complete(n)`,
    /// `theta(a,b,c)`, `gnp(n,p,seed)`, `random-cubic(n,seed)`,
    /// `random-subcubic(n,k,seed)` and `random-subcubic-no333(n,seed)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || GenerateError::UnknownSpec(s.to_string());
        let (name, args) = match s.find('(') {
            Some(i) => {
                let inner = s[i + 1..].strip_suffix(')').ok_or_else(bad)?;
                let args: Vec<&str> = inner.split(',').map(str::trim).collect();
                (s[..i].trim(), args)
            }
            None => (s, Vec::new()),
        };
        let int = |i: usize| -> Result<usize, GenerateError> {
            args.get(i).and_then(|a| a.parse().ok()).ok_or_else(bad)
        };
        let seed = |i: usize| -> Result<u64, GenerateError> {
            match args.get(i) {
                None => Ok(0),
                Some(a) => a.parse().map_err(|_| bad()),
            }
        };
        let spec = match (name, args.len()) {
            ("petersen", 0) => GraphSpec::Named(NamedGraph::Petersen),
            ("path", 1) => GraphSpec::Named(NamedGraph::Path(int(0)?)),
            ("cycle", 1) => GraphSpec::Named(NamedGraph::Cycle(int(0)?)),
            ("complete", 1) => GraphSpec::Named(NamedGraph::Complete(int(0)?)),
            ("theta", 3) => GraphSpec::Named(NamedGraph::Theta(int(0)?, int(1)?, int(2)?)),
            ("gnp", 2 | 3) => GraphSpec::Gnp {
                n: int(0)?,
                p: args[1].parse().map_err(|_| bad())?,
                seed: seed(2)?,
            },
            ("random-cubic", 1 | 2) => GraphSpec::RandomCubic {
                n: int(0)?,
                seed: seed(1)?,
            },
            ("random-subcubic", 2 | 3) => GraphSpec::RandomSubcubic {
                n: int(0)?,
                subdivision: Subdivision::Edges(int(1)?),
                seed: seed(2)?,
            },
            ("random-subcubic-no333", 1 | 2) => GraphSpec::RandomSubcubic {
                n: int(0)?,
                subdivision: Subdivision::NoThreeThreeThree,
                seed: seed(1)?,
            },
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

pub fn generate(spec: &GraphSpec) -> Result<Graph, GenerateError> {
    match spec {
        GraphSpec::Named(named) => named_graph(named),
        GraphSpec::Gnp { n, p, seed } => {
            if !(0.0..=1.0).contains(p) {
                return Err(GenerateError::Unsatisfiable(format!(
                    "p = {p} not in [0, 1]"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut edges = Vec::new();
            for u in 0..*n as Vertex {
                for v in u + 1..*n as Vertex {
                    if rng.gen_bool(*p) {
                        edges.push((u, v));
                    }
                }
            }
            Ok(Graph::from_edges(*n, &edges).expect("simple by construction"))
        }
        GraphSpec::RandomCubic { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(Graph::from_edges(*n, &random_cubic_edges(*n, &mut rng)?).expect("simple"))
        }
        GraphSpec::RandomSubcubic {
            n,
            subdivision,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let edges = random_cubic_edges(*n, &mut rng)?;
            subdivide(*n, edges, *subdivision, &mut rng)
        }
    }
}

fn named_graph(named: &NamedGraph) -> Result<Graph, GenerateError> {
    let g = match *named {
        NamedGraph::Petersen => {
            let mut e = Vec::new();
            for i in 0..5 {
                e.push((i, (i + 1) % 5));
                e.push((i, i + 5));
                e.push((i + 5, (i + 2) % 5 + 5));
            }
            Graph::from_edges(10, &e)
        }
        NamedGraph::Path(n) => {
            let e: Vec<_> = (1..n as Vertex).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, &e)
        }
        NamedGraph::Cycle(n) => {
            if n < 3 {
                return Err(GenerateError::Unsatisfiable(format!(
                    "cycle({n}) needs n >= 3"
                )));
            }
            let e: Vec<_> = (0..n as Vertex)
                .map(|i| (i, (i + 1) % n as Vertex))
                .collect();
            Graph::from_edges(n, &e)
        }
        NamedGraph::Complete(n) => {
            let mut e = Vec::new();
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    e.push((u, v));
                }
            }
            Graph::from_edges(n, &e)
        }
        NamedGraph::Theta(a, b, c) => {
            if [a, b, c].iter().filter(|&&k| k == 0).count() > 1 {
                return Err(GenerateError::Unsatisfiable(
                    "theta graph with two direct hub edges is not simple".into(),
                ));
            }
            let n = 2 + a + b + c;
            let mut e = Vec::new();
            let mut next: Vertex = 2;
            for len in [a, b, c] {
                let mut prev = 0;
                for _ in 0..len {
                    e.push((prev, next));
                    prev = next;
                    next += 1;
                }
                e.push((prev, 1));
            }
            Graph::from_edges(n, &e)
        }
    };
    Ok(g.expect("named graphs are simple"))
}

/// Pairing model: 3 points per vertex, a uniform perfect matching, rejected
/// until the result is simple.
fn random_cubic_edges(
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Vertex, Vertex)>, GenerateError> {
    if n % 2 == 1 || n < 4 {
        return Err(GenerateError::Unsatisfiable(format!(
            "random-cubic needs an even n >= 4, got {n}"
        )));
    }
    let mut points: Vec<Vertex> = (0..3 * n).map(|i| (i / 3) as Vertex).collect();
    'attempt: loop {
        points.shuffle(rng);
        let mut edges: Vec<(Vertex, Vertex)> = points
            .chunks(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        if edges.iter().any(|&(u, v)| u == v) {
            continue;
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                continue 'attempt;
            }
        }
        return Ok(edges);
    }
}

fn subdivide(
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    mode: Subdivision,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GenerateError> {
    let mut chosen = vec![false; edges.len()];
    match mode {
        Subdivision::Edges(k) => {
            if k > edges.len() {
                return Err(GenerateError::Unsatisfiable(format!(
                    "cannot subdivide {k} of {} edges",
                    edges.len()
                )));
            }
            let mut order: Vec<usize> = (0..edges.len()).collect();
            order.shuffle(rng);
            for &i in &order[..k] {
                chosen[i] = true;
            }
        }
        Subdivision::NoThreeThreeThree => {
            let mut covered = vec![false; n];
            let mut order: Vec<Vertex> = (0..n as Vertex).collect();
            order.shuffle(rng);
            for v in order {
                if covered[v as usize] {
                    continue;
                }
                let incident: Vec<usize> = (0..edges.len())
                    .filter(|&i| edges[i].0 == v || edges[i].1 == v)
                    .collect();
                let i = *incident.choose(rng).expect("cubic vertex has edges");
                chosen[i] = true;
                covered[edges[i].0 as usize] = true;
                covered[edges[i].1 as usize] = true;
            }
        }
    }
    let extra = chosen.iter().filter(|&&c| c).count();
    let mut out = Vec::with_capacity(edges.len() + extra);
    let mut next = n as Vertex;
    for (i, &(u, v)) in edges.iter().enumerate() {
        if chosen[i] {
            out.push((u, next));
            out.push((next, v));
            next += 1;
        } else {
            out.push((u, v));
        }
    }
    Ok(Graph::from_edges(n + extra, &out).expect("subdivision keeps the graph simple"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_triangle() {
        let g = parse_dimacs("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
    }

    #[test]
    fn dimacs_errors() {
        assert_eq!(
            parse_dimacs("p edge 2 1\ne 1 1\n"),
            Err(ParseError::SelfLoop { line: 2, vertex: 1 })
        );
        assert!(matches!(
            parse_dimacs("p edge 4 2\ne 1 2\n"),
            Err(ParseError::EdgeCountMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_dimacs("p edge 2 1\ne 1 3\n"),
            Err(ParseError::IndexOutOfRange {
                line: 2,
                index: 3,
                ..
            })
        ));
        assert!(matches!(
            parse_dimacs("p edge 3 2\ne 1 2\ne 2 1\n"),
            Err(ParseError::DuplicateEdge { line: 3, .. })
        ));
        assert!(matches!(
            parse_dimacs("p edge x 2\n"),
            Err(ParseError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("c hi\ne 1 2\n"),
            Err(ParseError::MalformedHeader { line: 2, .. })
        ));
    }

    #[test]
    fn crlf_and_edge_list() {
        let g = parse_graph(b"c x\r\np edge 2 1\r\ne 1 2\r\n").unwrap();
        assert_eq!(g.m(), 1);
        let h = parse_graph(b"3 2\n0 1\n1 2\n").unwrap();
        assert_eq!((h.n(), h.m()), (3, 2));
        assert!(h.has_edge(1, 2));
    }

    #[test]
    fn named_generators() {
        let p = generate(&"petersen".parse().unwrap()).unwrap();
        assert_eq!(
            (p.n(), p.m(), p.max_degree(), p.min_degree()),
            (10, 15, 3, 3)
        );
        let c5 = generate(&"cycle(5)".parse().unwrap()).unwrap();
        assert_eq!((c5.n(), c5.m(), c5.max_degree()), (5, 5, 2));
        let t = generate(&"theta(1,2,3)".parse().unwrap()).unwrap();
        assert_eq!((t.n(), t.m(), t.degree(0), t.degree(1)), (8, 9, 3, 3));
    }

    #[test]
    fn random_cubic_is_deterministic_and_cubic() {
        let spec: GraphSpec = "random-cubic(20,7)".parse().unwrap();
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.vertices().all(|v| a.degree(v) == 3));
        assert!(generate(&"random-cubic(7,1)".parse().unwrap()).is_err());
    }

    #[test]
    fn no333_generator() {
        for seed in 0..20 {
            let g = generate(&GraphSpec::RandomSubcubic {
                n: 12,
                subdivision: Subdivision::NoThreeThreeThree,
                seed,
            })
            .unwrap();
            g.audit().unwrap();
            assert!(!g.has_333_vertex());
            assert_eq!(g.max_degree(), 3);
        }
    }

    #[test]
    fn spec_roundtrip() {
        for s in [
            "petersen",
            "path(4)",
            "theta(1,2,3)",
            "gnp(9,0.3,2)",
            "random-cubic(10,3)",
        ] {
            let spec: GraphSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }
}
