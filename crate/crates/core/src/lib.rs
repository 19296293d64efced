//! Optimal broadcast rates and explicit index codes for two-sender unicast
//! index coding, with a brute-force oracle for cross-validation.

mod bitops;
pub mod checks;
pub mod confusion;
pub mod digraph;
pub mod error;
pub mod families;
pub mod graph;
pub mod index_codes;
mod parse;
pub mod problem_model;
pub mod rate;
pub mod rate_engine;
mod search;
pub mod msuic;
pub mod oracle;
pub mod two_sender_coloring;

pub use digraph::Digraph;
pub use error::{Error, Result};
pub use problem_model::{
    classify, classify_problem, compose, enumerate_classes, interaction_map, is_fully_participated,
    parse_problem, parse_problem_with_limit, partition, sender_constraint_graph, CaseLabel,
    InteractionClass, InteractionDigraph, MessagePartition, PaperLabel, Problem,
    SenderConstraintGraph, DEFAULT_MAX_TN,
};
pub use rate::{ceil_log2, Rate};
