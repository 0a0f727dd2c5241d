//! Merge trees, branches and branch decompositions.

mod bdt;
mod branch;
pub mod fixtures;
mod format;
mod random;
mod tree;

pub use bdt::{build_bdt, BranchDecompTree};
pub use branch::{
    elder_rule_decomposition, enumerate_branch_decompositions, induced_decomposition, Branch,
    BranchDecomposition, InducedPart, InducedSplit, DEFAULT_ENUMERATION_CAP,
};
pub use format::{format_mt, parse_mt, read_mt, write_mt};
pub use random::random_merge_tree;
pub(crate) use tree::better_leaf;
pub use tree::{MergeTree, NodeId, ValidationReport, Violation};
