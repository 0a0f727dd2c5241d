use serde::{Deserialize, Serialize};

use super::tree::{better_leaf, MergeTree, NodeId};
use crate::error::{Error, Result};
use crate::metrics::BranchLabel;

/// A root-to-leaf directed path, identified by its first vertex and its leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Branch {
    pub start: NodeId,
    pub leaf: NodeId,
}

impl Branch {
    pub fn new(start: NodeId, leaf: NodeId) -> Self {
        Branch { start, leaf }
    }

    /// Vertices from `start` down to `leaf`.
    ///
    /// Panics if `start` is not an ancestor of `leaf`.
    pub fn vertices(&self, tree: &MergeTree) -> Vec<NodeId> {
        let mut path = vec![self.leaf];
        let mut v = self.leaf;
        while v != self.start {
            v = tree
                .parent(v)
                .unwrap_or_else(|| panic!("{} is not an ancestor of {}", self.start, self.leaf));
            path.push(v);
        }
        path.reverse();
        path
    }

    /// Edges of the path as `(child, parent)` pairs.
    pub fn edges(&self, tree: &MergeTree) -> Vec<(NodeId, NodeId)> {
        let vs = self.vertices(tree);
        vs.windows(2).map(|w| (w[1], w[0])).collect()
    }

    pub fn label(&self, tree: &MergeTree) -> BranchLabel {
        BranchLabel::new(tree.value(self.start), tree.value(self.leaf))
    }

    pub fn persistence(&self, tree: &MergeTree) -> f64 {
        self.label(tree).persistence()
    }

    fn is_path_in(&self, tree: &MergeTree) -> bool {
        self.start < tree.len()
            && self.leaf < tree.len()
            && self.start != self.leaf
            && tree.is_strict_ancestor(self.start, self.leaf)
    }
}

/// A set of branches whose edge sets partition the edges of a tree.
///
/// The branches are kept in canonical order: main branch first, the rest sorted
/// by `(start, leaf)`. Two decompositions of the same tree are equal iff they
/// contain the same branches.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchDecomposition {
    branches: Vec<Branch>,
}

impl BranchDecomposition {
    /// The decomposition of the empty tree.
    pub fn empty() -> Self {
        BranchDecomposition { branches: Vec::new() }
    }

    /// Checks that `branches` is a branch decomposition of `tree`.
    pub fn from_branches(tree: &MergeTree, branches: Vec<Branch>) -> Result<Self> {
        let Some(root) = tree.root() else {
            if branches.is_empty() {
                return Ok(Self::empty());
            }
            return Err(Error::Precondition("the empty tree has no branches".into()));
        };
        let mut covered = vec![false; tree.len()];
        let mut mains = 0;
        for b in &branches {
            if !b.is_path_in(tree) || !tree.is_leaf(b.leaf) {
                return Err(Error::Precondition(format!(
                    "({}, {}) is not a branch of the tree",
                    b.start, b.leaf
                )));
            }
            if b.start == root {
                mains += 1;
            }
            for (child, _) in b.edges(tree) {
                if covered[child] {
                    return Err(Error::Precondition(format!(
                        "edge above node {child} is covered by more than one branch"
                    )));
                }
                covered[child] = true;
            }
        }
        if let Some(v) = (0..tree.len()).find(|&v| v != root && !covered[v]) {
            return Err(Error::Precondition(format!("edge above node {v} is not covered")));
        }
        if mains != 1 {
            return Err(Error::Precondition(format!(
                "expected exactly one branch through the root, found {mains}"
            )));
        }
        Ok(Self::canonical(root, branches))
    }

    fn canonical(root: NodeId, mut branches: Vec<Branch>) -> Self {
        branches.sort_by_key(|b| (b.start != root, b.start, b.leaf));
        BranchDecomposition { branches }
    }

    /// Builds the decomposition in which the branch entering each inner node `v`
    /// continues into `cont[v]`.
    pub fn from_continuations(tree: &MergeTree, cont: &[Option<NodeId>]) -> Self {
        let Some(root) = tree.root() else {
            return Self::empty();
        };
        let follow = |mut v: NodeId| {
            while !tree.is_leaf(v) {
                v = cont[v].expect("every inner node needs a continuation");
            }
            v
        };
        let mut branches = Vec::with_capacity(tree.leaf_count());
        let first = tree.children(root)[0];
        branches.push(Branch::new(root, follow(first)));
        for v in 0..tree.len() {
            if v == root || tree.is_leaf(v) {
                continue;
            }
            for &c in tree.children(v) {
                if Some(c) != cont[v] {
                    branches.push(Branch::new(v, follow(c)));
                }
            }
        }
        Self::canonical(root, branches)
    }

    /// For every non-root inner node, the child into which the branch entering it continues.
    pub fn continuations(&self, tree: &MergeTree) -> Vec<Option<NodeId>> {
        let mut cont = vec![None; tree.len()];
        for b in &self.branches {
            let vs = b.vertices(tree);
            for w in vs.windows(2).skip(1) {
                cont[w[0]] = Some(w[1]);
            }
        }
        cont
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn main(&self) -> Option<Branch> {
        self.branches.first().copied()
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn contains(&self, b: &Branch) -> bool {
        self.branches.contains(b)
    }

    /// Index of the branch owning the edge above each node (`None` for the root).
    pub fn edge_owners(&self, tree: &MergeTree) -> Vec<Option<usize>> {
        let mut owner = vec![None; tree.len()];
        for (i, b) in self.branches.iter().enumerate() {
            for (child, _) in b.edges(tree) {
                owner[child] = Some(i);
            }
        }
        owner
    }

    /// Index of the parent branch of every branch (`None` for the main branch).
    pub fn parent_branches(&self, tree: &MergeTree) -> Vec<Option<usize>> {
        let owner = self.edge_owners(tree);
        self.branches.iter().map(|b| owner[b.start]).collect()
    }

    pub fn labels(&self, tree: &MergeTree) -> Vec<BranchLabel> {
        self.branches.iter().map(|b| b.label(tree)).collect()
    }
}

/// Default cap on the number of leaves accepted by [`enumerate_branch_decompositions`].
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// Every branch decomposition of `tree`. Exponential; intended for small trees.
pub fn enumerate_branch_decompositions(tree: &MergeTree, leaf_cap: usize) -> Result<Vec<BranchDecomposition>> {
    tree.validate().into_result()?;
    let Some(root) = tree.root() else {
        return Ok(vec![BranchDecomposition::empty()]);
    };
    let leaves = tree.leaf_count();
    if leaves > leaf_cap {
        return Err(Error::SizeLimit {
            what: "leaf count",
            actual: leaves,
            cap: leaf_cap,
        });
    }
    let inner: Vec<NodeId> = (0..tree.len())
        .filter(|&v| v != root && !tree.is_leaf(v))
        .collect();
    let mut cont = vec![None; tree.len()];
    let mut out = Vec::new();
    enumerate_rec(tree, &inner, 0, &mut cont, &mut out);
    Ok(out)
}

fn enumerate_rec(
    tree: &MergeTree,
    inner: &[NodeId],
    i: usize,
    cont: &mut Vec<Option<NodeId>>,
    out: &mut Vec<BranchDecomposition>,
) {
    if i == inner.len() {
        out.push(BranchDecomposition::from_continuations(tree, cont));
        return;
    }
    let v = inner[i];
    for &c in tree.children(v) {
        cont[v] = Some(c);
        enumerate_rec(tree, inner, i + 1, cont, out);
    }
    cont[v] = None;
}

/// The elder rule decomposition: at every inner node the branch continues toward the
/// child holding the highest leaf (smallest leaf id on ties).
pub fn elder_rule_decomposition(tree: &MergeTree) -> BranchDecomposition {
    let n = tree.len();
    let mut best_leaf = vec![usize::MAX; n];
    let mut cont = vec![None; n];
    for v in tree.postorder() {
        if tree.is_leaf(v) {
            best_leaf[v] = v;
            continue;
        }
        let mut pick = tree.children(v)[0];
        for &c in &tree.children(v)[1..] {
            let (lc, lp) = (best_leaf[c], best_leaf[pick]);
            if better_leaf(tree.value(lc), lc, tree.value(lp), lp) {
                pick = c;
            }
        }
        best_leaf[v] = best_leaf[pick];
        cont[v] = Some(pick);
    }
    BranchDecomposition::from_continuations(tree, &cont)
}

/// One side of a split produced by [`induced_decomposition`].
#[derive(Clone, Debug)]
pub struct InducedPart {
    pub tree: MergeTree,
    /// Original node id of every node of `tree`.
    pub original_ids: Vec<NodeId>,
    /// Decomposition of `tree`, in its own node ids.
    pub decomposition: BranchDecomposition,
}

impl InducedPart {
    /// The decomposition's branches expressed in the ids of the tree that was split.
    pub fn original_branches(&self) -> Vec<Branch> {
        self.decomposition
            .branches()
            .iter()
            .map(|b| Branch::new(self.original_ids[b.start], self.original_ids[b.leaf]))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct InducedSplit {
    /// The subtree rooted in the split edge.
    pub subtree: InducedPart,
    /// Everything else, with the attachment node spliced out if it is left with one child.
    pub rest: InducedPart,
}

/// Splits `tree` at the edge `(child, parent)` and derives the decompositions that
/// `decomposition` induces on both parts. A branch of `decomposition` must start in that edge.
pub fn induced_decomposition(
    tree: &MergeTree,
    decomposition: &BranchDecomposition,
    root_edge: (NodeId, NodeId),
) -> Result<InducedSplit> {
    let (c, p) = root_edge;
    if c >= tree.len() || tree.parent(c) != Some(p) {
        return Err(Error::Precondition(format!("({c}, {p}) is not an edge of the tree")));
    }
    let starts_here = decomposition
        .branches()
        .iter()
        .any(|b| b.start == p && b.vertices(tree).get(1) == Some(&c));
    if !starts_here {
        return Err(Error::Precondition(format!("no branch starts in edge ({c}, {p})")));
    }

    let mut in_sub = vec![false; tree.len()];
    for v in tree.subtree_nodes(c) {
        in_sub[v] = true;
    }
    let mut keep_sub = in_sub.clone();
    keep_sub[p] = true;
    let (sub_tree, sub_ids) = tree.restrict(&keep_sub, &[]);

    let is_root = tree.root() == Some(p);
    let (rest_tree, rest_ids) = if is_root {
        (MergeTree::empty(), Vec::new())
    } else {
        let mut keep_rest: Vec<bool> = in_sub.iter().map(|&s| !s).collect();
        let mut overrides = Vec::new();
        if tree.children(p).len() == 2 {
            let sibling = tree.children(p).iter().copied().find(|&x| x != c).unwrap();
            keep_rest[p] = false;
            overrides.push((sibling, tree.parent(p)));
        }
        tree.restrict(&keep_rest, &overrides)
    };

    let local = |ids: &[NodeId], t: &MergeTree, pred: &dyn Fn(&Branch) -> bool| -> Result<BranchDecomposition> {
        let mut index = vec![usize::MAX; tree.len()];
        for (i, &v) in ids.iter().enumerate() {
            index[v] = i;
        }
        let branches = decomposition
            .branches()
            .iter()
            .filter(|b| pred(b))
            .map(|b| Branch::new(index[b.start], index[b.leaf]))
            .collect();
        BranchDecomposition::from_branches(t, branches)
    };
    let sub_dec = local(&sub_ids, &sub_tree, &|b| in_sub[b.leaf])?;
    let rest_dec = local(&rest_ids, &rest_tree, &|b| !in_sub[b.leaf])?;

    Ok(InducedSplit {
        subtree: InducedPart {
            tree: sub_tree,
            original_ids: sub_ids,
            decomposition: sub_dec,
        },
        rest: InducedPart {
            tree: rest_tree,
            original_ids: rest_ids,
            decomposition: rest_dec,
        },
    })
}
