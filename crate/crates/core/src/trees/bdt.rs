use super::branch::{Branch, BranchDecomposition};
use super::tree::{MergeTree, NodeId};

/// The tree formed by the parent-branch relation of a decomposition.
///
/// Vertex `i` is `decomposition.branches()[i]`; vertex 0 is the main branch.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchDecompTree {
    pub branches: Vec<Branch>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Node at which each branch attaches to its parent (its start node).
    pub attachment: Vec<NodeId>,
}

impl BranchDecompTree {
    pub fn root(&self) -> Option<usize> {
        if self.branches.is_empty() {
            None
        } else {
            Some(0)
        }
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// `(child, parent)` pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (i, p)))
            .collect()
    }
}

pub fn build_bdt(tree: &MergeTree, decomposition: &BranchDecomposition) -> BranchDecompTree {
    let branches = decomposition.branches().to_vec();
    let parent = decomposition.parent_branches(tree);
    let mut children = vec![Vec::new(); branches.len()];
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(i);
        }
    }
    let attachment = branches.iter().map(|b| b.start).collect();
    BranchDecompTree {
        branches,
        parent,
        children,
        attachment,
    }
}
