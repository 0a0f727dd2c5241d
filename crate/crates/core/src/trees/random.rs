use rand::Rng;

use super::{MergeTree, NodeId};

/// A random valid merge tree with `leaves` leaves whose inner nodes have between 2 and
/// `max_children` children. Edge lengths are drawn from `[0.05, 1)`, so values are
/// distinct with probability 1.
pub fn random_merge_tree<R: Rng + ?Sized>(rng: &mut R, leaves: usize, max_children: usize) -> MergeTree {
    assert!(max_children >= 2, "inner nodes need room for 2 children");
    if leaves == 0 {
        return MergeTree::empty();
    }
    let mut values = vec![0.0, rng.gen_range(0.05..1.0)];
    let mut parents: Vec<Option<NodeId>> = vec![None, Some(0)];
    let mut stack = vec![(1, leaves)];
    while let Some((node, k)) = stack.pop() {
        if k == 1 {
            continue;
        }
        let count = rng.gen_range(2..=max_children.min(k));
        // split k into `count` positive parts
        let mut cuts: Vec<usize> = rand::seq::index::sample(rng, k - 1, count - 1).into_iter().map(|c| c + 1).collect();
        cuts.sort_unstable();
        cuts.push(k);
        let mut prev = 0;
        for cut in cuts {
            let id = values.len();
            values.push(values[node] + rng.gen_range(0.05..1.0));
            parents.push(Some(node));
            stack.push((id, cut - prev));
            prev = cut;
        }
    }
    MergeTree::new(values, parents).expect("generated tree is valid")
}
