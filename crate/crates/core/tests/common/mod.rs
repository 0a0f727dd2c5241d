#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Random merge tree with between 1 and `max_leaves` leaves.
pub fn random_tree(rng: &mut ChaCha8Rng, max_leaves: usize, max_children: usize) -> branchmap::MergeTree {
    let leaves = rand::Rng::gen_range(rng, 1..=max_leaves);
    branchmap::trees::random_merge_tree(rng, leaves, max_children)
}
