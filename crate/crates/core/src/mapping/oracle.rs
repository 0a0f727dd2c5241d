//! Exhaustive reference implementations, exponential in the number of leaves.

use std::collections::HashMap;

use super::{validate_branch_mapping, BranchMapping};
use crate::assignment::match_with_gaps_brute_force;
use crate::error::Result;
use crate::metrics::CostModel;
use crate::trees::{build_bdt, enumerate_branch_decompositions, BranchDecompTree, MergeTree};

/// Leaf cap for [`oracle_distance`].
pub const ORACLE_LEAF_CAP: usize = 7;

/// Minimum mapping cost over every pair of decompositions, found by matching the two
/// decomposition trees branch by branch.
///
/// For a pair of branches the children of each are grouped by attachment node and the
/// groups ordered along the branch; a valid mapping matches groups in order, pairs the
/// children of matched groups one to one, and deletes everything else with its subtree.
pub fn oracle_distance(t1: &MergeTree, t2: &MergeTree, cost: CostModel) -> Result<f64> {
    let d1 = enumerate_branch_decompositions(t1, ORACLE_LEAF_CAP)?;
    let d2 = enumerate_branch_decompositions(t2, ORACLE_LEAF_CAP)?;
    let mut best = f64::INFINITY;
    for b1 in &d1 {
        let x = Side::new(t1, build_bdt(t1, b1), cost);
        for b2 in &d2 {
            let y = Side::new(t2, build_bdt(t2, b2), cost);
            let total = match (x.bdt.root(), y.bdt.root()) {
                (None, None) => 0.0,
                (Some(r), None) => x.subtree_delete[r],
                (None, Some(r)) => y.subtree_delete[r],
                (Some(r1), Some(r2)) => {
                    let mut memo = HashMap::new();
                    match_branches(&x, &y, r1, r2, cost, &mut memo)
                }
            };
            best = best.min(total);
        }
    }
    Ok(cost.mode.finish(best))
}

struct Side<'a> {
    tree: &'a MergeTree,
    bdt: BranchDecompTree,
    depth: Vec<usize>,
    subtree_delete: Vec<f64>,
}

impl<'a> Side<'a> {
    fn new(tree: &'a MergeTree, bdt: BranchDecompTree, cost: CostModel) -> Self {
        let depth = tree.depths();
        let mut subtree_delete = vec![0.0; bdt.len()];
        // children come after their parent in no particular order, so recurse
        fn fill(bdt: &BranchDecompTree, tree: &MergeTree, cost: CostModel, i: usize, out: &mut Vec<f64>) -> f64 {
            let mut total = cost.delete(bdt.branches[i].label(tree));
            for &c in &bdt.children[i] {
                total += fill(bdt, tree, cost, c, out);
            }
            out[i] = total;
            total
        }
        if let Some(r) = bdt.root() {
            fill(&bdt, tree, cost, r, &mut subtree_delete);
        }
        Side { tree, bdt, depth, subtree_delete }
    }

    /// Children of branch `i` grouped by attachment node, ordered from the branch start.
    fn groups(&self, i: usize) -> Vec<Vec<usize>> {
        let mut kids = self.bdt.children[i].clone();
        kids.sort_by_key(|&c| (self.depth[self.bdt.attachment[c]], c));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for c in kids {
            match groups.last_mut() {
                Some(g) if self.bdt.attachment[g[0]] == self.bdt.attachment[c] => g.push(c),
                _ => groups.push(vec![c]),
            }
        }
        groups
    }
}

fn match_branches(x: &Side, y: &Side, a: usize, b: usize, cost: CostModel, memo: &mut HashMap<(usize, usize), f64>) -> f64 {
    if let Some(&c) = memo.get(&(a, b)) {
        return c;
    }
    let own = cost.pair(x.bdt.branches[a].label(x.tree), y.bdt.branches[b].label(y.tree));
    let g1 = x.groups(a);
    let g2 = y.groups(b);
    // best[i][j]: groups i.. of a against groups j.. of b
    let mut best = vec![vec![0.0; g2.len() + 1]; g1.len() + 1];
    let group_delete = |s: &Side, g: &[usize]| g.iter().map(|&c| s.subtree_delete[c]).sum::<f64>();
    for i in (0..=g1.len()).rev() {
        for j in (0..=g2.len()).rev() {
            let mut v = f64::INFINITY;
            if i < g1.len() {
                v = v.min(group_delete(x, &g1[i]) + best[i + 1][j]);
            }
            if j < g2.len() {
                v = v.min(group_delete(y, &g2[j]) + best[i][j + 1]);
            }
            if i < g1.len() && j < g2.len() {
                let (p, q) = (&g1[i], &g2[j]);
                let mut table = vec![0.0; p.len() * q.len()];
                for (k, &c1) in p.iter().enumerate() {
                    for (l, &c2) in q.iter().enumerate() {
                        table[k * q.len() + l] = match_branches(x, y, c1, c2, cost, memo);
                    }
                }
                let del: Vec<f64> = p.iter().map(|&c| x.subtree_delete[c]).collect();
                let ins: Vec<f64> = q.iter().map(|&c| y.subtree_delete[c]).collect();
                let m = match_with_gaps_brute_force(p.len(), q.len(), |k, l| table[k * q.len() + l], &del, &ins);
                v = v.min(m.cost + best[i + 1][j + 1]);
            }
            if i == g1.len() && j == g2.len() {
                v = 0.0;
            }
            best[i][j] = v;
        }
    }
    let total = own + best[0][0];
    memo.insert((a, b), total);
    total
}

/// Minimum cost over every subset of branch pairs that passes [`validate_branch_mapping`],
/// for every pair of decompositions. Only usable for trees with a handful of leaves.
pub fn brute_force_distance(t1: &MergeTree, t2: &MergeTree, cost: CostModel) -> Result<f64> {
    let d1 = enumerate_branch_decompositions(t1, 4)?;
    let d2 = enumerate_branch_decompositions(t2, 4)?;
    let mut best = f64::INFINITY;
    for b1 in &d1 {
        for b2 in &d2 {
            let n1 = b1.len();
            let n2 = b2.len();
            let mut assign = vec![None; n1];
            let mut used = vec![false; n2];
            enumerate_injections(0, &mut assign, &mut used, &mut |assign| {
                let pairs = assign
                    .iter()
                    .enumerate()
                    .filter_map(|(i, j)| j.map(|j| (b1.branches()[i], b2.branches()[j])))
                    .collect::<Vec<_>>();
                let deletions = (0..n1).filter(|&i| assign[i].is_none()).map(|i| b1.branches()[i]).collect();
                let insertions = (0..n2)
                    .filter(|&j| !assign.contains(&Some(j)))
                    .map(|j| b2.branches()[j])
                    .collect();
                let mut m = BranchMapping {
                    decompositions: (b1.clone(), b2.clone()),
                    pairs,
                    deletions,
                    insertions,
                    total_cost: 0.0,
                    cost_model: cost,
                };
                m.total_cost = m.recompute_cost(t1, t2);
                if m.total_cost < best && validate_branch_mapping(&m, t1, t2).is_ok() {
                    best = m.total_cost;
                }
            });
        }
    }
    Ok(best)
}

fn enumerate_injections(i: usize, assign: &mut Vec<Option<usize>>, used: &mut Vec<bool>, visit: &mut dyn FnMut(&[Option<usize>])) {
    if i == assign.len() {
        visit(assign);
        return;
    }
    assign[i] = None;
    enumerate_injections(i + 1, assign, used, visit);
    for j in 0..used.len() {
        if !used[j] {
            used[j] = true;
            assign[i] = Some(j);
            enumerate_injections(i + 1, assign, used, visit);
            used[j] = false;
        }
    }
    assign[i] = None;
}
