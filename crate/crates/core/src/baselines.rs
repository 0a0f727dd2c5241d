//! Edit distances that depend on one fixed (elder rule) branch decomposition:
//! the constrained edit distance and the 1-degree edit distance on unordered trees.

use crate::assignment::match_with_gaps;
use crate::metrics::{BranchLabel, CostModel};
use crate::trees::{build_bdt, elder_rule_decomposition, MergeTree};

/// A rooted unordered tree whose nodes carry branch labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledTree {
    pub labels: Vec<BranchLabel>,
    pub parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: Option<usize>,
}

impl LabeledTree {
    /// Panics unless `parent` describes a single rooted tree.
    pub fn new(labels: Vec<BranchLabel>, parent: Vec<Option<usize>>) -> Self {
        assert_eq!(labels.len(), parent.len());
        let mut children = vec![Vec::new(); parent.len()];
        let mut root = None;
        for (v, p) in parent.iter().enumerate() {
            match p {
                Some(p) => children[*p].push(v),
                None => {
                    assert!(root.is_none(), "more than one root");
                    root = Some(v);
                }
            }
        }
        assert!(parent.is_empty() || root.is_some(), "no root");
        let t = LabeledTree { labels, parent, children, root };
        assert_eq!(t.postorder().len(), t.len(), "parent links contain a cycle");
        t
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack: Vec<(usize, bool)> = self.root.map(|r| (r, false)).into_iter().collect();
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
            } else {
                stack.push((v, true));
                stack.extend(self.children[v].iter().rev().map(|&c| (c, false)));
            }
        }
        out
    }

    /// Cost of deleting the subtree below every node (the node included).
    fn subtree_deletion(&self, cost: CostModel) -> Vec<f64> {
        let mut del = vec![0.0; self.len()];
        for v in self.postorder() {
            del[v] = cost.delete(self.labels[v]) + self.children[v].iter().map(|&c| del[c]).sum::<f64>();
        }
        del
    }
}

/// Which structure [`elder_labeled_inputs`] should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabeledTarget {
    /// The merge tree itself: a leaf carries its branch, a saddle the most persistent
    /// branch born there, the root the main branch.
    MergeTree,
    /// The branch decomposition tree, one node per branch.
    Bdt,
}

/// Labeled input for the baselines, derived from the elder rule decomposition.
pub fn elder_labeled_inputs(tree: &MergeTree, target: LabeledTarget) -> LabeledTree {
    let dec = elder_rule_decomposition(tree);
    match target {
        LabeledTarget::Bdt => {
            let bdt = build_bdt(tree, &dec);
            let labels = bdt.branches.iter().map(|b| b.label(tree)).collect();
            LabeledTree::new(labels, bdt.parent)
        }
        LabeledTarget::MergeTree => {
            let Some(root) = tree.root() else {
                return LabeledTree::new(Vec::new(), Vec::new());
            };
            let mut label: Vec<Option<BranchLabel>> = vec![None; tree.len()];
            for b in dec.branches() {
                let l = b.label(tree);
                label[b.leaf] = Some(l);
                let start = &mut label[b.start];
                if b.start == root || start.is_none_or(|s| l.persistence() > s.persistence()) {
                    *start = Some(l);
                }
            }
            let labels = label.into_iter().map(|l| l.expect("every node starts or ends a branch")).collect();
            LabeledTree::new(labels, tree.parents().to_vec())
        }
    }
}

/// Constrained edit distance on unordered labeled trees: disjoint subtrees must map to
/// disjoint subtrees. Labels are compared with the base metric of `cost`.
pub fn constrained_edit_distance(t1: &LabeledTree, t2: &LabeledTree, cost: CostModel) -> f64 {
    let del1 = t1.subtree_deletion(cost);
    let del2 = t2.subtree_deletion(cost);
    let (r1, r2) = match (t1.root(), t2.root()) {
        (None, None) => return 0.0,
        (Some(r), None) => return cost.mode.finish(del1[r]),
        (None, Some(r)) => return cost.mode.finish(del2[r]),
        (Some(a), Some(b)) => (a, b),
    };
    // deletion of the forest of children of each node
    let forest_del = |t: &LabeledTree, del: &[f64], v: usize| t.children(v).iter().map(|&c| del[c]).sum::<f64>();
    let fd1: Vec<f64> = (0..t1.len()).map(|v| forest_del(t1, &del1, v)).collect();
    let fd2: Vec<f64> = (0..t2.len()).map(|v| forest_del(t2, &del2, v)).collect();

    let n2 = t2.len();
    let mut tree_d = vec![f64::NAN; t1.len() * n2];
    let mut forest_d = vec![f64::NAN; t1.len() * n2];
    let post1 = t1.postorder();
    let post2 = t2.postorder();
    for &i in &post1 {
        for &j in &post2 {
            let ci = t1.children(i);
            let cj = t2.children(j);
            // children forest of i against children forest of j
            let mut f = f64::INFINITY;
            if let Some(m) = cj.iter().map(|&k| forest_d[i * n2 + k] - fd2[k]).reduce(f64::min) {
                f = f.min(fd2[j] + m);
            }
            if let Some(m) = ci.iter().map(|&k| forest_d[k * n2 + j] - fd1[k]).reduce(f64::min) {
                f = f.min(fd1[i] + m);
            }
            let del: Vec<f64> = ci.iter().map(|&c| del1[c]).collect();
            let ins: Vec<f64> = cj.iter().map(|&c| del2[c]).collect();
            let m = match_with_gaps(ci.len(), cj.len(), |a, b| tree_d[ci[a] * n2 + cj[b]], &del, &ins);
            f = f.min(m.cost);
            forest_d[i * n2 + j] = f;

            let mut t = forest_d[i * n2 + j] + cost.pair(t1.labels[i], t2.labels[j]);
            if let Some(m) = cj.iter().map(|&k| tree_d[i * n2 + k] - del2[k]).reduce(f64::min) {
                t = t.min(del2[j] + m);
            }
            if let Some(m) = ci.iter().map(|&k| tree_d[k * n2 + j] - del1[k]).reduce(f64::min) {
                t = t.min(del1[i] + m);
            }
            tree_d[i * n2 + j] = t;
        }
    }
    // deleting or inserting everything is always a candidate
    cost.mode.finish(tree_d[r1 * n2 + r2].min(del1[r1] + del2[r2]))
}

/// 1-degree edit distance on unordered labeled trees: roots are matched, and a deleted
/// node takes its whole subtree with it.
pub fn one_degree_distance(t1: &LabeledTree, t2: &LabeledTree, cost: CostModel) -> f64 {
    let del1 = t1.subtree_deletion(cost);
    let del2 = t2.subtree_deletion(cost);
    let (r1, r2) = match (t1.root(), t2.root()) {
        (None, None) => return 0.0,
        (Some(r), None) => return cost.mode.finish(del1[r]),
        (None, Some(r)) => return cost.mode.finish(del2[r]),
        (Some(a), Some(b)) => (a, b),
    };
    let n2 = t2.len();
    let mut d = vec![f64::NAN; t1.len() * n2];
    let post2 = t2.postorder();
    for i in t1.postorder() {
        for &j in &post2 {
            let ci = t1.children(i);
            let cj = t2.children(j);
            let del: Vec<f64> = ci.iter().map(|&c| del1[c]).collect();
            let ins: Vec<f64> = cj.iter().map(|&c| del2[c]).collect();
            let m = match_with_gaps(ci.len(), cj.len(), |a, b| d[ci[a] * n2 + cj[b]], &del, &ins);
            d[i * n2 + j] = cost.pair(t1.labels[i], t2.labels[j]) + m.cost;
        }
    }
    cost.mode.finish(d[r1 * n2 + r2])
}
