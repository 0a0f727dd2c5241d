use std::fmt;

use crate::error::{Error, Result};

/// Dense node index into a [`MergeTree`].
pub type NodeId = usize;

/// A rooted, unordered, scalar-labelled tree.
///
/// Structure (single root, acyclic, ids in range) is checked on construction.
/// The merge tree conditions (degree-one root, no degree-one inner nodes,
/// values strictly increasing away from the root) are reported by
/// [`MergeTree::validate`]; [`MergeTree::new`] rejects trees that fail them.
///
/// The tree with zero nodes is the designated empty tree.
#[derive(Clone, Debug, PartialEq)]
pub struct MergeTree {
    values: Vec<f64>,
    parents: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    root: Option<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    RootDegree { node: NodeId, children: usize },
    InnerDegreeOne { node: NodeId },
    NotIncreasing { child: NodeId, parent: NodeId, child_value: f64, parent_value: f64 },
    NonFinite { node: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootDegree { node, children } => {
                write!(f, "root degree != 1: node {node} has {children} children")
            }
            Violation::InnerDegreeOne { node } => {
                write!(f, "inner node {node} has exactly one child")
            }
            Violation::NotIncreasing { child, parent, child_value, parent_value } => write!(
                f,
                "non-increasing toward root: child {child} ({child_value}) <= parent {parent} ({parent_value})"
            ),
            Violation::NonFinite { node } => write!(f, "node {node} has a non-finite value"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidTree(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl MergeTree {
    pub fn empty() -> Self {
        MergeTree {
            values: Vec::new(),
            parents: Vec::new(),
            children: Vec::new(),
            root: None,
        }
    }

    /// Builds a tree and checks the merge tree conditions.
    pub fn new(values: Vec<f64>, parents: Vec<Option<NodeId>>) -> Result<Self> {
        let tree = Self::from_parents(values, parents)?;
        tree.validate().into_result()?;
        Ok(tree)
    }

    /// Builds a tree checking only that the parent array describes a single rooted tree.
    pub fn from_parents(values: Vec<f64>, parents: Vec<Option<NodeId>>) -> Result<Self> {
        let n = values.len();
        if parents.len() != n {
            return Err(Error::Structure(format!(
                "{} values but {} parent entries",
                n,
                parents.len()
            )));
        }
        if n == 0 {
            return Ok(Self::empty());
        }
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None => {
                    if let Some(r) = root {
                        return Err(Error::Structure(format!("multiple roots: {r} and {v}")));
                    }
                    root = Some(v);
                }
                Some(p) if p >= n => {
                    return Err(Error::Structure(format!("node {v} has unknown parent {p}")));
                }
                Some(p) if p == v => {
                    return Err(Error::Structure(format!("node {v} is its own parent")));
                }
                Some(p) => children[p].push(v),
            }
        }
        let root = root.ok_or_else(|| Error::Structure("no root node".into()))?;
        // every node must reach the root
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            seen[v] = true;
            count += 1;
            stack.extend(children[v].iter().copied());
        }
        if count != n {
            let stray = seen.iter().position(|s| !s).unwrap_or(0);
            return Err(Error::Structure(format!("node {stray} is not connected to the root")));
        }
        Ok(MergeTree {
            values,
            parents,
            children,
            root: Some(root),
        })
    }

    /// Builds a tree from `(id, value, parent)` records; ids must be a permutation of `0..n`.
    pub fn from_records(records: &[(NodeId, f64, Option<NodeId>)]) -> Result<Self> {
        let n = records.len();
        let mut values = vec![f64::NAN; n];
        let mut parents = vec![None; n];
        let mut seen = vec![false; n];
        for &(id, value, parent) in records {
            if id >= n {
                return Err(Error::Structure(format!(
                    "node id {id} out of range; ids must be 0..{n}"
                )));
            }
            if seen[id] {
                return Err(Error::Structure(format!("duplicate node id {id}")));
            }
            seen[id] = true;
            values[id] = value;
            parents[id] = parent;
        }
        Self::new(values, parents)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let Some(root) = self.root else {
            return ValidationReport::default();
        };
        for v in 0..self.len() {
            if !self.values[v].is_finite() {
                violations.push(Violation::NonFinite { node: v });
            }
        }
        if self.children[root].len() != 1 {
            violations.push(Violation::RootDegree {
                node: root,
                children: self.children[root].len(),
            });
        }
        for v in 0..self.len() {
            if v != root && self.children[v].len() == 1 {
                violations.push(Violation::InnerDegreeOne { node: v });
            }
            if let Some(p) = self.parents[v] {
                // NaN compares false, which is reported separately
                if !(self.values[v] > self.values[p]) && self.values[v].is_finite() {
                    violations.push(Violation::NotIncreasing {
                        child: v,
                        parent: p,
                        child_value: self.values[v],
                        parent_value: self.values[p],
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn value(&self, v: NodeId) -> f64 {
        self.values[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parents[v]
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parents
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.children[v].is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).filter(move |&v| self.is_leaf(v) && Some(v) != self.root)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    /// Number of edges (`len - 1` for non-empty trees).
    pub fn edge_count(&self) -> usize {
        self.len().saturating_sub(1)
    }

    /// Edge-distance of every node from the root.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.len()];
        for v in self.preorder() {
            if let Some(p) = self.parents[v] {
                depth[v] = depth[p] + 1;
            }
        }
        depth
    }

    /// Largest node depth, i.e. the height of the tree in edges.
    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Nodes in an order where parents precede their children.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.len());
        if let Some(root) = self.root {
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                order.push(v);
                stack.extend(self.children[v].iter().rev().copied());
            }
        }
        order
    }

    /// Nodes in an order where children precede their parents.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut order = self.preorder();
        order.reverse();
        order
    }

    /// True if `anc` lies on the path from `v` to the root (including `v` itself).
    pub fn is_ancestor_or_self(&self, anc: NodeId, mut v: NodeId) -> bool {
        loop {
            if v == anc {
                return true;
            }
            match self.parents[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    pub fn is_strict_ancestor(&self, anc: NodeId, v: NodeId) -> bool {
        anc != v && self.is_ancestor_or_self(anc, v)
    }

    /// All nodes in the subtree below `v`, including `v`.
    pub fn subtree_nodes(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().copied());
        }
        out
    }

    /// The leaf with the largest value below `v`; ties go to the smallest id.
    pub fn highest_leaf_below(&self, v: NodeId) -> NodeId {
        let mut best = None::<NodeId>;
        for u in self.subtree_nodes(v) {
            if self.is_leaf(u) {
                best = Some(match best {
                    None => u,
                    Some(b) if better_leaf(self.values[u], u, self.values[b], b) => u,
                    Some(b) => b,
                });
            }
        }
        best.unwrap_or(v)
    }

    /// Extracts the subtree spanned by `keep` (which must be closed under parent links up to
    /// its topmost node). Returns the new tree and the original id of each new node; new ids
    /// follow ascending original ids.
    pub(crate) fn restrict(&self, keep: &[bool], parent_override: &[(NodeId, Option<NodeId>)]) -> (MergeTree, Vec<NodeId>) {
        let original: Vec<NodeId> = (0..self.len()).filter(|&v| keep[v]).collect();
        let mut new_id = vec![usize::MAX; self.len()];
        for (i, &v) in original.iter().enumerate() {
            new_id[v] = i;
        }
        let mut parents: Vec<Option<NodeId>> = original
            .iter()
            .map(|&v| self.parents[v].filter(|&p| keep[p]).map(|p| new_id[p]))
            .collect();
        for &(v, p) in parent_override {
            if keep[v] {
                parents[new_id[v]] = p.map(|p| new_id[p]);
            }
        }
        let values = original.iter().map(|&v| self.values[v]).collect();
        let tree = MergeTree::from_parents(values, parents)
            .expect("restricting a tree to a connected node set yields a tree");
        (tree, original)
    }
}

/// Leaf preference used by the elder rule: higher value first, then smaller id.
pub(crate) fn better_leaf(value: f64, id: NodeId, other_value: f64, other_id: NodeId) -> bool {
    value > other_value || (value == other_value && id < other_id)
}
