//! Branch mapping distance between merge trees.

pub mod assignment;
pub mod baselines;
pub mod error;
pub mod field;
pub mod mapping;
pub mod metrics;
pub mod pipeline;
pub mod trees;

pub use error::{Error, Result};
pub use mapping::{branch_mapping_distance, delete_tree_cost, validate_branch_mapping, BranchMapping};
pub use metrics::{Aggregation, BaseMetric, BranchLabel, CostModel};
pub use trees::{Branch, BranchDecomposition, MergeTree, NodeId};
