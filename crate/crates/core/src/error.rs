use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("empty graph")]
    EmptyGraph,
    #[error("not subcubic")]
    NotSubcubic,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("vertex {0} is not in the graph")]
    NotAVertex(Vertex),
    #[error("vertex {0} has been removed")]
    DeadVertex(Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("corrupt graph: {0}")]
    Corrupt(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("line {line}: malformed line: {msg}")]
    MalformedLine { line: usize, msg: String },
    #[error("line {line}: vertex index {index} out of range 1..={n}")]
    IndexOutOfRange { line: usize, index: u64, n: usize },
    #[error("line {line}: edge count mismatch: header says {expected}, found {found}")]
    EdgeCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u64 },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: u64, v: u64 },
    #[error("input is not valid UTF-8")]
    Encoding,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("unknown generator spec {0:?}")]
    UnknownSpec(String),
    #[error("unsatisfiable spec: {0}")]
    Unsatisfiable(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("non-decreasing branch: delta {0} is not positive")]
    NonDecreasingBranch(f64),
    #[error("empty branching vector")]
    EmptyVector,
    #[error("average degree {0} outside [2, 8/3]")]
    DegreeOutOfRange(String),
    #[error("out(v) is only defined for d(v) in {{5, 6}}, got {0}")]
    BadOutDegree(usize),
    #[error("unknown regime {0:?}")]
    UnknownRegime(String),
    #[error("infeasible constraint set; binding: {binding:?}")]
    Infeasible { binding: Vec<String> },
    #[error("bad weight file: {0}")]
    WeightFile(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("not a valid #3IS instance: {0}")]
    NotThreeIsInstance(String),
    #[error("invalid separation: {0}")]
    InvalidSeparation(String),
    #[error("multiplier reduction precondition violated: {0}")]
    Precondition(String),
    #[error("spider precondition violated: {0}")]
    SpiderPrecondition(String),
    #[error("cardinality function does not cover vertex {0}")]
    Cardinality(Vertex),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph too large for this oracle: n = {n} > {cap}")]
    TooLarge { n: usize, cap: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("graph too large: n = {n} exceeds cap {cap}")]
    CapExceeded { n: usize, cap: usize },
}
