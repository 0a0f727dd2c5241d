//! Persistence simplification of merge trees.

use crate::error::{Error, Result};
use crate::trees::{better_leaf, MergeTree, NodeId};

/// Repeatedly prunes the least persistent leaf edge below `threshold`, never the edge
/// carrying the highest leaf of its saddle. A saddle left with one child is spliced out.
///
/// Afterwards every non-main branch of the elder rule decomposition has persistence at
/// least `threshold`. Ties between candidate leaves go to the smaller node id.
pub fn simplify(tree: &MergeTree, threshold: f64) -> Result<MergeTree> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!("simplification threshold must be >= 0, got {threshold}")));
    }
    tree.validate().into_result()?;
    let Some(root) = tree.root() else {
        return Ok(tree.clone());
    };
    let n = tree.len();
    let mut parent: Vec<Option<NodeId>> = tree.parents().to_vec();
    let mut children: Vec<Vec<NodeId>> = (0..n).map(|v| tree.children(v).to_vec()).collect();
    let mut alive = vec![true; n];

    loop {
        let best = highest_leaves(tree, root, &children);
        let mut pick: Option<(f64, NodeId)> = None;
        for leaf in (0..n).filter(|&v| alive[v] && v != root && children[v].is_empty()) {
            let s = parent[leaf].expect("non-root node has a parent");
            if s == root {
                continue;
            }
            let elder = children[s].iter().any(|&c| c != leaf && better_leaf(tree.value(best[c]), best[c], tree.value(leaf), leaf));
            if !elder {
                continue;
            }
            let pers = tree.value(leaf) - tree.value(s);
            if pers < threshold && pick.is_none_or(|(p, l)| pers < p || (pers == p && leaf < l)) {
                pick = Some((pers, leaf));
            }
        }
        let Some((_, leaf)) = pick else { break };
        let s = parent[leaf].unwrap();
        alive[leaf] = false;
        children[s].retain(|&c| c != leaf);
        if children[s].len() == 1 {
            let only = children[s][0];
            let above = parent[s].expect("saddle below the root");
            alive[s] = false;
            parent[only] = Some(above);
            for c in children[above].iter_mut() {
                if *c == s {
                    *c = only;
                }
            }
        }
    }

    let overrides: Vec<(NodeId, Option<NodeId>)> = (0..n).filter(|&v| alive[v]).map(|v| (v, parent[v])).collect();
    let (out, _) = tree.restrict(&alive, &overrides);
    Ok(out)
}

/// Highest leaf below every node under the current child lists.
fn highest_leaves(tree: &MergeTree, root: NodeId, children: &[Vec<NodeId>]) -> Vec<NodeId> {
    let mut best = vec![usize::MAX; tree.len()];
    let mut stack = vec![(root, false)];
    while let Some((v, done)) = stack.pop() {
        if !done {
            stack.push((v, true));
            stack.extend(children[v].iter().map(|&c| (c, false)));
            continue;
        }
        let mut b = v;
        for (i, &c) in children[v].iter().enumerate() {
            if i == 0 || better_leaf(tree.value(best[c]), best[c], tree.value(b), b) {
                b = best[c];
            }
        }
        best[v] = b;
    }
    best
}
