//! Small hand-built trees shared by unit tests, examples and the acceptance suite.

use super::tree::MergeTree;

/// `root -> leaf`.
pub fn single_branch(low: f64, high: f64) -> MergeTree {
    MergeTree::new(vec![low, high], vec![None, Some(0)]).unwrap()
}

/// Root 0, one saddle, two leaves; ids `0 root, 1 saddle, 2 higher leaf, 3 lower leaf`.
pub fn one_saddle(saddle: f64, high_leaf: f64, low_leaf: f64) -> MergeTree {
    MergeTree::new(
        vec![0.0, saddle, high_leaf, low_leaf],
        vec![None, Some(0), Some(1), Some(1)],
    )
    .unwrap()
}

/// The next three trees: free-mode distances 2 (a,b), 1 (b,c) and 5 (a,c), so the
/// triangle inequality fails. Saddle 3, leaves 10 and 6.
pub fn triangle_a() -> MergeTree {
    one_saddle(3.0, 10.0, 6.0)
}

/// Saddle 5, leaves 10 and 8.
pub fn triangle_b() -> MergeTree {
    one_saddle(5.0, 10.0, 8.0)
}

/// Saddle 6, leaves 11 and 8.
pub fn triangle_c() -> MergeTree {
    one_saddle(6.0, 11.0, 8.0)
}

/// Root 0, saddle 3, saddle 9, leaves 12 (under 3), 12 and 11 (under 9).
///
/// ids: `0 root, 1 saddle 3, 2 leaf 12, 3 saddle 9, 4 leaf 12, 5 leaf 11`.
pub fn with_short_branch() -> MergeTree {
    MergeTree::new(
        vec![0.0, 3.0, 12.0, 9.0, 12.0, 11.0],
        vec![None, Some(0), Some(1), Some(1), Some(3), Some(3)],
    )
    .unwrap()
}

/// Root 0, saddle 3, leaves 12 and 12.
pub fn without_short_branch() -> MergeTree {
    one_saddle(3.0, 12.0, 12.0)
}

/// Binary tree with three saddles and four leaves.
///
/// ids: `0 root(0), 1 s(1), 2 s(2), 3 s(3), 4 leaf(10), 5 leaf(6), 6 leaf(9), 7 leaf(5)`;
/// saddles 2 and 3 hang below 1, leaves 4, 5 below 2 and 6, 7 below 3.
pub fn balanced_four_leaves() -> MergeTree {
    MergeTree::new(
        vec![0.0, 1.0, 2.0, 3.0, 10.0, 6.0, 9.0, 5.0],
        vec![None, Some(0), Some(1), Some(1), Some(2), Some(2), Some(3), Some(3)],
    )
    .unwrap()
}
