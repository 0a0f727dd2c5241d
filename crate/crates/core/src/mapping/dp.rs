//! Memoized recursion for the branch mapping distance.
//!
//! A subproblem is a pair of "rooted paths" `(n, p)`: the subtree hanging below `n`
//! together with the path from its ancestor `p` down to `n`, with every branch that
//! attached in between already split off. In this subtree the branch through `p`
//! continues through `n`, so `p` is the start of the branch currently being tracked.
//! The cost of matching two such subtrees is computed from the children of `n1` and
//! `n2`:
//!
//! * continue the tracked branch into one child of `n1` and delete the rest of `n1`'s
//!   children (and symmetrically for `n2`),
//! * continue into a child of each, and match the remaining children of `n1` to the
//!   remaining children of `n2` as whole subtrees rooted in `n1`/`n2`, with deletions
//!   and insertions allowed (an exact min-cost assignment).
//!
//! In fixed mode only the child given by the decomposition may continue a branch.

use std::collections::HashMap;

use serde::Serialize;

use super::BranchMapping;
use crate::assignment::match_with_gaps;
use crate::error::{Error, Result};
use crate::metrics::{BranchLabel, CostModel};
use crate::trees::{Branch, BranchDecomposition, MergeTree, NodeId};

/// One memo key `(n1, p1, n2, p2)`; `None` is the empty side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MemoKey {
    pub n1: Option<NodeId>,
    pub p1: Option<NodeId>,
    pub n2: Option<NodeId>,
    pub p2: Option<NodeId>,
}

/// Memo table occupancy after one distance computation.
#[derive(Clone, Debug, Default, Serialize)]
pub struct MemoStats {
    /// Filled `(n1, p1, n2, p2)` entries with both sides present.
    pub pair_states: usize,
    /// Filled `(n1, p1, ⊥, ⊥)` entries.
    pub delete_states: usize,
    /// Filled `(⊥, ⊥, n2, p2)` entries.
    pub insert_states: usize,
    /// Every key in insertion order, when recording was requested.
    pub keys: Option<Vec<MemoKey>>,
}

impl MemoStats {
    pub fn total(&self) -> usize {
        self.pair_states + self.delete_states + self.insert_states
    }
}

const KIND_SHIFT: u32 = 30;
const LEAF: u32 = 0;
const DEL: u32 = 1;
const INS: u32 = 2;
const MATCH: u32 = 3;
const MATCHED_FLAG: u32 = 1 << 29;
const IDX_BITS: u32 = 14;
const IDX_MASK: u32 = (1 << IDX_BITS) - 1;

fn encode(kind: u32, a: usize, b: usize) -> u32 {
    debug_assert!(a <= IDX_MASK as usize && b <= IDX_MASK as usize);
    (kind << KIND_SHIFT) | ((a as u32) << IDX_BITS) | b as u32
}

fn decode(d: u32) -> (u32, usize, usize) {
    (d >> KIND_SHIFT, ((d >> IDX_BITS) & IDX_MASK) as usize, (d & IDX_MASK) as usize)
}

/// Per-tree indexing of `(n, p)` states: `p` ranges over the strict ancestors of `n`.
struct Side<'a> {
    tree: &'a MergeTree,
    depth: Vec<usize>,
    offset: Vec<usize>,
    states: usize,
    /// Fixed mode: the only child a branch may continue into.
    continuation: Option<Vec<Option<NodeId>>>,
}

impl<'a> Side<'a> {
    fn new(tree: &'a MergeTree, fixed: Option<&BranchDecomposition>) -> Self {
        let depth = tree.depths();
        let mut offset = Vec::with_capacity(tree.len());
        let mut states = 0;
        for &d in &depth {
            offset.push(states);
            states += d;
        }
        Side {
            tree,
            depth,
            offset,
            states,
            continuation: fixed.map(|b| b.continuations(tree)),
        }
    }

    #[inline]
    fn state(&self, n: NodeId, p: NodeId) -> usize {
        debug_assert!(self.depth[p] < self.depth[n]);
        self.offset[n] + (self.depth[n] - self.depth[p] - 1)
    }

    #[inline]
    fn label(&self, p: NodeId, n: NodeId) -> BranchLabel {
        BranchLabel::new(self.tree.value(p), self.tree.value(n))
    }

    #[inline]
    fn may_continue(&self, n: NodeId, c: NodeId) -> bool {
        match &self.continuation {
            None => true,
            Some(cont) => cont[n] == Some(c),
        }
    }
}

struct Solver<'a> {
    sides: [Side<'a>; 2],
    cost: CostModel,
    pair_cost: Vec<f64>,
    pair_dec: Vec<u32>,
    del_cost: [Vec<f64>; 2],
    del_dec: [Vec<u32>; 2],
    assignments: HashMap<usize, Vec<Option<usize>>>,
    keys: Option<Vec<MemoKey>>,
}

impl<'a> Solver<'a> {
    fn new(t1: &'a MergeTree, t2: &'a MergeTree, cost: CostModel, fixed: Option<(&BranchDecomposition, &BranchDecomposition)>, record: bool) -> Self {
        let s1 = Side::new(t1, fixed.map(|f| f.0));
        let s2 = Side::new(t2, fixed.map(|f| f.1));
        let pairs = s1.states * s2.states;
        let (d1, d2) = (s1.states, s2.states);
        Solver {
            sides: [s1, s2],
            cost,
            pair_cost: vec![f64::NAN; pairs],
            pair_dec: vec![0; pairs],
            del_cost: [vec![f64::NAN; d1], vec![f64::NAN; d2]],
            del_dec: [vec![0; d1], vec![0; d2]],
            assignments: HashMap::new(),
            keys: record.then(Vec::new),
        }
    }

    /// Cost of deleting the rooted path `(n, p)` of side `s` entirely.
    fn delete(&mut self, s: usize, n: NodeId, p: NodeId) -> f64 {
        let idx = self.sides[s].state(n, p);
        let memo = self.del_cost[s][idx];
        if !memo.is_nan() {
            return memo;
        }
        let side = &self.sides[s];
        let tree = side.tree;
        let (best, dec) = if tree.is_leaf(n) {
            (self.cost.delete(side.label(p, n)), 0)
        } else {
            let children = tree.children(n);
            let mut best = f64::INFINITY;
            let mut dec = 0;
            for (i, &c) in children.iter().enumerate() {
                if !self.sides[s].may_continue(n, c) {
                    continue;
                }
                let mut total = self.delete(s, c, p);
                for &o in children.iter().filter(|&&o| o != c) {
                    total += self.delete(s, o, n);
                }
                if total < best {
                    best = total;
                    dec = i;
                }
            }
            (best, dec as u32)
        };
        self.del_cost[s][idx] = best;
        self.del_dec[s][idx] = dec;
        if let Some(keys) = &mut self.keys {
            keys.push(if s == 0 {
                MemoKey { n1: Some(n), p1: Some(p), n2: None, p2: None }
            } else {
                MemoKey { n1: None, p1: None, n2: Some(n), p2: Some(p) }
            });
        }
        best
    }

    fn delete_siblings(&mut self, s: usize, n: NodeId, keep: NodeId) -> f64 {
        let tree = self.sides[s].tree;
        let mut total = 0.0;
        for &o in tree.children(n) {
            if o != keep {
                total += self.delete(s, o, n);
            }
        }
        total
    }

    fn pair(&mut self, n1: NodeId, p1: NodeId, n2: NodeId, p2: NodeId) -> f64 {
        let idx = self.sides[0].state(n1, p1) * self.sides[1].states + self.sides[1].state(n2, p2);
        let memo = self.pair_cost[idx];
        if !memo.is_nan() {
            return memo;
        }
        let t1 = self.sides[0].tree;
        let t2 = self.sides[1].tree;
        let leaf1 = t1.is_leaf(n1);
        let leaf2 = t2.is_leaf(n2);

        let mut best = f64::INFINITY;
        let mut dec = 0u32;
        let mut best_assignment = None;

        if leaf1 && leaf2 {
            best = self.cost.pair(self.sides[0].label(p1, n1), self.sides[1].label(p2, n2));
            dec = encode(LEAF, 0, 0);
        } else {
            // continue in T1 only, deleting the other children of n1
            if !leaf1 {
                for (i, &c1) in t1.children(n1).iter().enumerate() {
                    if !self.sides[0].may_continue(n1, c1) {
                        continue;
                    }
                    let total = self.pair(c1, p1, n2, p2) + self.delete_siblings(0, n1, c1);
                    if total < best {
                        best = total;
                        dec = encode(DEL, i, 0);
                    }
                }
            }
            // continue in T2 only, inserting the other children of n2
            if !leaf2 {
                for (j, &c2) in t2.children(n2).iter().enumerate() {
                    if !self.sides[1].may_continue(n2, c2) {
                        continue;
                    }
                    let total = self.pair(n1, p1, c2, p2) + self.delete_siblings(1, n2, c2);
                    if total < best {
                        best = total;
                        dec = encode(INS, 0, j);
                    }
                }
            }
            // continue in both and match the remaining children as subtrees
            if !leaf1 && !leaf2 {
                for (i, j) in continuation_pairs(t1.children(n1).len(), t2.children(n2).len()) {
                    let c1 = t1.children(n1)[i];
                    let c2 = t2.children(n2)[j];
                    if !self.sides[0].may_continue(n1, c1) || !self.sides[1].may_continue(n2, c2) {
                        continue;
                    }
                    let main = self.pair(c1, p1, c2, p2);
                    let (rest, assignment) = self.match_children(n1, c1, n2, c2);
                    let total = main + rest;
                    if total < best {
                        best = total;
                        dec = encode(MATCH, i, j);
                        best_assignment = Some(assignment);
                    }
                }
            }
        }

        if let Some(assignment) = best_assignment {
            if assignment.len() == 1 && t2.children(n2).len() == 2 {
                if assignment[0].is_some() {
                    dec |= MATCHED_FLAG;
                }
            } else {
                self.assignments.insert(idx, assignment);
            }
        }
        self.pair_cost[idx] = best;
        self.pair_dec[idx] = dec;
        if let Some(keys) = &mut self.keys {
            keys.push(MemoKey { n1: Some(n1), p1: Some(p1), n2: Some(n2), p2: Some(p2) });
        }
        best
    }

    /// Assignment of the children of `n1` other than `c1` to those of `n2` other than `c2`.
    fn match_children(&mut self, n1: NodeId, c1: NodeId, n2: NodeId, c2: NodeId) -> (f64, Vec<Option<usize>>) {
        let rest1: Vec<NodeId> = self.sides[0].tree.children(n1).iter().copied().filter(|&c| c != c1).collect();
        let rest2: Vec<NodeId> = self.sides[1].tree.children(n2).iter().copied().filter(|&c| c != c2).collect();
        let delete: Vec<f64> = rest1.iter().map(|&a| self.delete(0, a, n1)).collect();
        let insert: Vec<f64> = rest2.iter().map(|&b| self.delete(1, b, n2)).collect();
        let mut table = vec![0.0; rest1.len() * rest2.len()];
        for (i, &a) in rest1.iter().enumerate() {
            for (j, &b) in rest2.iter().enumerate() {
                table[i * rest2.len() + j] = self.pair(a, n1, b, n2);
            }
        }
        let cols = rest2.len();
        let m = match_with_gaps(rest1.len(), cols, |i, j| table[i * cols + j], &delete, &insert);
        (m.cost, m.row_to_col)
    }

    fn rebuild_delete(&self, s: usize, n: NodeId, p: NodeId, out: &mut Vec<Branch>) {
        let tree = self.sides[s].tree;
        if tree.is_leaf(n) {
            out.push(Branch::new(p, n));
            return;
        }
        let idx = self.sides[s].state(n, p);
        let keep = tree.children(n)[self.del_dec[s][idx] as usize];
        self.rebuild_delete(s, keep, p, out);
        for &o in tree.children(n) {
            if o != keep {
                self.rebuild_delete(s, o, n, out);
            }
        }
    }

    fn rebuild_pair(&self, n1: NodeId, p1: NodeId, n2: NodeId, p2: NodeId, out: &mut Rebuilt) {
        let t1 = self.sides[0].tree;
        let t2 = self.sides[1].tree;
        let idx = self.sides[0].state(n1, p1) * self.sides[1].states + self.sides[1].state(n2, p2);
        let raw = self.pair_dec[idx];
        let (kind, i, j) = decode(raw & !MATCHED_FLAG);
        match kind {
            LEAF => out.pairs.push((Branch::new(p1, n1), Branch::new(p2, n2))),
            DEL => {
                let c1 = t1.children(n1)[i];
                self.rebuild_pair(c1, p1, n2, p2, out);
                for &o in t1.children(n1).iter().filter(|&&o| o != c1) {
                    self.rebuild_delete(0, o, n1, &mut out.deletions);
                }
            }
            INS => {
                let c2 = t2.children(n2)[j];
                self.rebuild_pair(n1, p1, c2, p2, out);
                for &o in t2.children(n2).iter().filter(|&&o| o != c2) {
                    self.rebuild_delete(1, o, n2, &mut out.insertions);
                }
            }
            _ => {
                let c1 = t1.children(n1)[i];
                let c2 = t2.children(n2)[j];
                self.rebuild_pair(c1, p1, c2, p2, out);
                let rest1: Vec<NodeId> = t1.children(n1).iter().copied().filter(|&c| c != c1).collect();
                let rest2: Vec<NodeId> = t2.children(n2).iter().copied().filter(|&c| c != c2).collect();
                let assignment = match self.assignments.get(&idx) {
                    Some(a) => a.clone(),
                    None => vec![(raw & MATCHED_FLAG != 0).then_some(0)],
                };
                let mut used = vec![false; rest2.len()];
                for (a, col) in rest1.iter().zip(&assignment) {
                    match col {
                        Some(col) => {
                            used[*col] = true;
                            self.rebuild_pair(*a, n1, rest2[*col], n2, out);
                        }
                        None => self.rebuild_delete(0, *a, n1, &mut out.deletions),
                    }
                }
                for (b, used) in rest2.iter().zip(used) {
                    if !used {
                        self.rebuild_delete(1, *b, n2, &mut out.insertions);
                    }
                }
            }
        }
    }

    fn stats(&self) -> MemoStats {
        let filled = |v: &[f64]| v.iter().filter(|c| !c.is_nan()).count();
        MemoStats {
            pair_states: filled(&self.pair_cost),
            delete_states: filled(&self.del_cost[0]),
            insert_states: filled(&self.del_cost[1]),
            keys: self.keys.clone(),
        }
    }
}

/// Order in which `(continuation in T1, continuation in T2)` pairs are tried. For two binary
/// nodes this is the order of the four matching options of the binary recursion.
fn continuation_pairs(k1: usize, k2: usize) -> Vec<(usize, usize)> {
    if k1 == 2 && k2 == 2 {
        return vec![(0, 0), (1, 1), (1, 0), (0, 1)];
    }
    (0..k1).flat_map(|i| (0..k2).map(move |j| (i, j))).collect()
}

#[derive(Default)]
struct Rebuilt {
    pairs: Vec<(Branch, Branch)>,
    deletions: Vec<Branch>,
    insertions: Vec<Branch>,
}

/// Branch mapping distance between two merge trees.
///
/// With `fixed = None` the minimum is taken over all pairs of branch decompositions;
/// otherwise only the given pair is considered. Either tree may be empty.
pub fn branch_mapping_distance(
    t1: &MergeTree,
    t2: &MergeTree,
    cost: CostModel,
    fixed: Option<(&BranchDecomposition, &BranchDecomposition)>,
) -> Result<(f64, BranchMapping)> {
    let (d, m, _) = solve(t1, t2, cost, fixed, false)?;
    Ok((d, m))
}

/// Like [`branch_mapping_distance`], also reporting memo table occupancy and, if
/// `record_keys` is set, every memo key.
pub fn branch_mapping_distance_with_stats(
    t1: &MergeTree,
    t2: &MergeTree,
    cost: CostModel,
    fixed: Option<(&BranchDecomposition, &BranchDecomposition)>,
    record_keys: bool,
) -> Result<(f64, BranchMapping, MemoStats)> {
    solve(t1, t2, cost, fixed, record_keys)
}

/// Cost of deleting a whole tree, minimized over its branch decompositions.
pub fn delete_tree_cost(tree: &MergeTree, cost: CostModel) -> Result<f64> {
    let (d, _) = branch_mapping_distance(tree, &MergeTree::empty(), cost, None)?;
    Ok(d)
}

fn check_fixed(tree: &MergeTree, b: &BranchDecomposition, which: &str) -> Result<()> {
    BranchDecomposition::from_branches(tree, b.branches().to_vec())
        .map(|_| ())
        .map_err(|e| Error::Precondition(format!("fixed decomposition of {which} is invalid: {e}")))
}

fn solve(
    t1: &MergeTree,
    t2: &MergeTree,
    cost: CostModel,
    fixed: Option<(&BranchDecomposition, &BranchDecomposition)>,
    record_keys: bool,
) -> Result<(f64, BranchMapping, MemoStats)> {
    t1.validate().into_result()?;
    t2.validate().into_result()?;
    if let Some((b1, b2)) = fixed {
        check_fixed(t1, b1, "the first tree")?;
        check_fixed(t2, b2, "the second tree")?;
    }
    let mut solver = Solver::new(t1, t2, cost, fixed, record_keys);
    let mut out = Rebuilt::default();
    let total = match (t1.root(), t2.root()) {
        (None, None) => 0.0,
        (Some(r1), None) => {
            let c1 = t1.children(r1)[0];
            let total = solver.delete(0, c1, r1);
            solver.rebuild_delete(0, c1, r1, &mut out.deletions);
            total
        }
        (None, Some(r2)) => {
            let c2 = t2.children(r2)[0];
            let total = solver.delete(1, c2, r2);
            solver.rebuild_delete(1, c2, r2, &mut out.insertions);
            total
        }
        (Some(r1), Some(r2)) => {
            let (c1, c2) = (t1.children(r1)[0], t2.children(r2)[0]);
            let total = solver.pair(c1, r1, c2, r2);
            solver.rebuild_pair(c1, r1, c2, r2, &mut out);
            total
        }
    };
    let distance = cost.mode.finish(total);
    let mapping = BranchMapping::from_parts(t1, t2, out.pairs, out.deletions, out.insertions, distance, cost)?;
    Ok((distance, mapping, solver.stats()))
}
