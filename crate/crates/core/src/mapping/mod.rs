//! Branch mappings between two merge trees and the distance they define.

mod dp;
mod oracle;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

pub use dp::{branch_mapping_distance, branch_mapping_distance_with_stats, delete_tree_cost, MemoKey, MemoStats};
pub use oracle::{brute_force_distance, oracle_distance, ORACLE_LEAF_CAP};

use crate::error::{Error, Result};
use crate::metrics::CostModel;
use crate::trees::{Branch, BranchDecomposition, MergeTree, NodeId};

/// A partial one-to-one correspondence between the branches of two decompositions.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchMapping {
    pub decompositions: (BranchDecomposition, BranchDecomposition),
    /// Main pair first, then ordered by the first branch.
    pub pairs: Vec<(Branch, Branch)>,
    pub deletions: Vec<Branch>,
    pub insertions: Vec<Branch>,
    pub total_cost: f64,
    pub cost_model: CostModel,
}

fn decomposition_of(tree: &MergeTree, branches: Vec<Branch>) -> Result<BranchDecomposition> {
    if tree.edge_count() == 0 && branches.is_empty() {
        return Ok(BranchDecomposition::empty());
    }
    BranchDecomposition::from_branches(tree, branches)
}

impl BranchMapping {
    /// Builds a mapping from its edit operations; the decompositions are the branches used.
    pub fn from_parts(
        t1: &MergeTree,
        t2: &MergeTree,
        mut pairs: Vec<(Branch, Branch)>,
        mut deletions: Vec<Branch>,
        mut insertions: Vec<Branch>,
        total_cost: f64,
        cost_model: CostModel,
    ) -> Result<Self> {
        let b1 = decomposition_of(t1, pairs.iter().map(|p| p.0).chain(deletions.iter().copied()).collect())?;
        let b2 = decomposition_of(t2, pairs.iter().map(|p| p.1).chain(insertions.iter().copied()).collect())?;
        let main1 = b1.main();
        pairs.sort_by_key(|&(a, b)| (Some(a) != main1, a, b));
        deletions.sort();
        insertions.sort();
        Ok(BranchMapping {
            decompositions: (b1, b2),
            pairs,
            deletions,
            insertions,
            total_cost,
            cost_model,
        })
    }

    /// Aggregated cost of all edit operations, recomputed from the branch labels.
    pub fn recompute_cost(&self, t1: &MergeTree, t2: &MergeTree) -> f64 {
        self.cost_model.mode.aggregate(&self.operation_costs(t1, t2))
    }

    /// Unaggregated cost of every pair, deletion and insertion, in that order.
    pub fn operation_costs(&self, t1: &MergeTree, t2: &MergeTree) -> Vec<f64> {
        let m = self.cost_model.metric;
        let pairs = self.pairs.iter().map(|&(a, b)| m.pair_cost(a.label(t1), b.label(t2)));
        let deletions = self.deletions.iter().map(|a| m.deletion_cost(a.label(t1)));
        let insertions = self.insertions.iter().map(|b| m.deletion_cost(b.label(t2)));
        pairs.chain(deletions).chain(insertions).collect()
    }

    /// Structured export with per-operation costs.
    pub fn to_export(&self, t1: &MergeTree, t2: &MergeTree) -> MappingExport {
        let m = self.cost_model.metric;
        MappingExport {
            pairs: self
                .pairs
                .iter()
                .map(|&(a, b)| PairExport {
                    t1_start: a.start,
                    t1_leaf: a.leaf,
                    t2_start: b.start,
                    t2_leaf: b.leaf,
                    cost: m.pair_cost(a.label(t1), b.label(t2)),
                })
                .collect(),
            deletions: self
                .deletions
                .iter()
                .map(|&a| BranchExport { start: a.start, leaf: a.leaf, cost: m.deletion_cost(a.label(t1)) })
                .collect(),
            insertions: self
                .insertions
                .iter()
                .map(|&b| BranchExport { start: b.start, leaf: b.leaf, cost: m.deletion_cost(b.label(t2)) })
                .collect(),
            total_cost: self.total_cost,
            mode: self.cost_model.mode.name(),
            metric: self.cost_model.metric.name(),
        }
    }

    pub fn to_json(&self, t1: &MergeTree, t2: &MergeTree) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_export(t1, t2))?)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairExport {
    pub t1_start: NodeId,
    pub t1_leaf: NodeId,
    pub t2_start: NodeId,
    pub t2_leaf: NodeId,
    pub cost: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchExport {
    pub start: NodeId,
    pub leaf: NodeId,
    pub cost: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MappingExport {
    pub pairs: Vec<PairExport>,
    pub deletions: Vec<BranchExport>,
    pub insertions: Vec<BranchExport>,
    pub total_cost: f64,
    pub mode: &'static str,
    pub metric: &'static str,
}

/// A broken mapping condition.
#[derive(Clone, Debug, PartialEq)]
pub enum MappingViolation {
    /// The branches on one side do not form a decomposition of that tree.
    NotADecomposition { side: u8, message: String },
    /// Paired, deleted and inserted branches do not cover the stated decomposition exactly.
    Coverage { side: u8, branch: Branch },
    /// A branch takes part in more than one edit operation.
    NotOneToOne { side: u8, branch: Branch },
    MainNotPaired,
    /// The parent branches of a pair are not paired with each other.
    NotUpwardClosed { pair: (Branch, Branch) },
    /// Two pairs disagree on whether one start vertex lies below the other.
    OrderNotPreserved { first: (Branch, Branch), second: (Branch, Branch) },
    CostMismatch { stated: f64, recomputed: f64 },
}

impl fmt::Display for MappingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let br = |b: &Branch| format!("({},{})", b.start, b.leaf);
        match self {
            MappingViolation::NotADecomposition { side, message } => {
                write!(f, "side {side}: not a branch decomposition: {message}")
            }
            MappingViolation::Coverage { side, branch } => {
                write!(f, "side {side}: branch {} not covered exactly once", br(branch))
            }
            MappingViolation::NotOneToOne { side, branch } => {
                write!(f, "side {side}: branch {} used more than once", br(branch))
            }
            MappingViolation::MainNotPaired => f.write_str("main branches are not paired"),
            MappingViolation::NotUpwardClosed { pair } => {
                write!(f, "parents of {}-{} are not paired", br(&pair.0), br(&pair.1))
            }
            MappingViolation::OrderNotPreserved { first, second } => write!(
                f,
                "start order differs between {}-{} and {}-{}",
                br(&first.0),
                br(&first.1),
                br(&second.0),
                br(&second.1)
            ),
            MappingViolation::CostMismatch { stated, recomputed } => {
                write!(f, "total cost {stated} differs from recomputed {recomputed}")
            }
        }
    }
}

/// Result of [`validate_branch_mapping`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MappingReport {
    pub violations: Vec<MappingViolation>,
}

impl MappingReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for MappingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_side(
    side: u8,
    tree: &MergeTree,
    stated: &BranchDecomposition,
    used: impl Iterator<Item = Branch>,
    out: &mut Vec<MappingViolation>,
) -> Option<BranchDecomposition> {
    let mut seen = HashSet::new();
    let mut all = Vec::new();
    for b in used {
        if !seen.insert(b) {
            out.push(MappingViolation::NotOneToOne { side, branch: b });
        } else {
            all.push(b);
        }
    }
    for b in stated.branches() {
        if !seen.contains(b) {
            out.push(MappingViolation::Coverage { side, branch: *b });
        }
    }
    for b in &all {
        if !stated.contains(b) {
            out.push(MappingViolation::Coverage { side, branch: *b });
        }
    }
    match decomposition_of(tree, stated.branches().to_vec()) {
        Ok(d) => Some(d),
        Err(e) => {
            out.push(MappingViolation::NotADecomposition { side, message: e.to_string() });
            None
        }
    }
}

/// Checks a mapping against the branch mapping conditions and its stated total cost.
///
/// Start-vertex order is compared non-strictly: for pairs `(a, b)` and `(a', b')`,
/// `start(a)` is a descendant-or-self of `start(a')` exactly when `start(b)` is one of
/// `start(b')`.
pub fn validate_branch_mapping(m: &BranchMapping, t1: &MergeTree, t2: &MergeTree) -> MappingReport {
    let mut v = Vec::new();
    let (b1, b2) = &m.decompositions;
    let d1 = check_side(1, t1, b1, m.pairs.iter().map(|p| p.0).chain(m.deletions.iter().copied()), &mut v);
    let d2 = check_side(2, t2, b2, m.pairs.iter().map(|p| p.1).chain(m.insertions.iter().copied()), &mut v);

    if let (Some(d1), Some(d2)) = (d1, d2) {
        match (d1.main(), d2.main()) {
            (Some(x), Some(y)) => {
                if !m.pairs.contains(&(x, y)) {
                    v.push(MappingViolation::MainNotPaired);
                }
            }
            _ => {
                if !m.pairs.is_empty() {
                    v.push(MappingViolation::MainNotPaired);
                }
            }
        }
        let parent1 = parent_map(t1, &d1);
        let parent2 = parent_map(t2, &d2);
        let paired: HashSet<(Branch, Branch)> = m.pairs.iter().copied().collect();
        for &(a, b) in &m.pairs {
            match (parent1.get(&a).copied().flatten(), parent2.get(&b).copied().flatten()) {
                (None, None) => {}
                (Some(pa), Some(pb)) if paired.contains(&(pa, pb)) => {}
                _ => v.push(MappingViolation::NotUpwardClosed { pair: (a, b) }),
            }
        }
        for (i, &(a, b)) in m.pairs.iter().enumerate() {
            for &(a2, b2) in &m.pairs[i + 1..] {
                let fwd = t1.is_ancestor_or_self(a2.start, a.start) == t2.is_ancestor_or_self(b2.start, b.start);
                let bwd = t1.is_ancestor_or_self(a.start, a2.start) == t2.is_ancestor_or_self(b.start, b2.start);
                if !fwd || !bwd {
                    v.push(MappingViolation::OrderNotPreserved { first: (a, b), second: (a2, b2) });
                }
            }
        }
    }

    let recomputed = m.recompute_cost(t1, t2);
    if (recomputed - m.total_cost).abs() > 1e-9 * recomputed.abs().max(1.0) {
        v.push(MappingViolation::CostMismatch { stated: m.total_cost, recomputed });
    }
    MappingReport { violations: v }
}

fn parent_map(tree: &MergeTree, d: &BranchDecomposition) -> HashMap<Branch, Option<Branch>> {
    let parents = d.parent_branches(tree);
    d.branches()
        .iter()
        .zip(parents)
        .map(|(b, p)| (*b, p.map(|i| d.branches()[i])))
        .collect()
}

/// Node correspondence induced by a valid mapping: the start and leaf vertices of every
/// pair, sorted and without duplicates.
pub fn induced_node_mapping(m: &BranchMapping, t1: &MergeTree, t2: &MergeTree) -> Result<Vec<(NodeId, NodeId)>> {
    let report = validate_branch_mapping(m, t1, t2);
    if !report.is_ok() {
        return Err(Error::Precondition(format!("invalid branch mapping: {report}")));
    }
    let mut nodes: Vec<(NodeId, NodeId)> = m
        .pairs
        .iter()
        .flat_map(|&(a, b)| [(a.start, b.start), (a.leaf, b.leaf)])
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}

#[cfg(test)]
mod tests;
