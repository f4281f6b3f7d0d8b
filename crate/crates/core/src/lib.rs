//! Exact counting of weighted independent sets in polynomial space, with a
//! chromatic number wrapper and the measure-analysis toolkit behind the
//! running-time bounds.

pub mod coloring;
pub mod error;
pub mod graph;
pub mod io;
pub mod measure;
pub mod oracle;
pub mod reductions;
pub mod separator;
pub mod solver;
pub mod subcubic;

pub use coloring::{chromatic_number, k_cover_count};
pub use error::{
    ColoringError, GenerateError, GraphError, MeasureError, OracleError, ParseError, SolveError,
};
pub use graph::{Graph, Vertex};
pub use io::{generate, parse_dimacs, parse_edge_list, parse_graph, GraphSpec};
pub use measure::WeightSet;
pub use oracle::{brute_force_chromatic, brute_force_ind};
pub use reductions::CardinalityFunction;
pub use separator::{Separation, Side};
pub use solver::{count_independent_sets, count_unit, count_with, Rule, SolveOptions, SolveStats};
pub use subcubic::three_is;
