//! Merge trees of grid fields by a union-find sweep.

use std::fmt;
use std::str::FromStr;

use super::grid::ScalarField2D;
use crate::error::{Error, Result};
use crate::trees::MergeTree;

/// Which superlevel (maxima) or sublevel (minima) sets are tracked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Direction {
    #[default]
    Maxima,
    /// Built from the negated field, so node values are negated field values.
    Minima,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Direction::Maxima),
            "min" => Ok(Direction::Minima),
            _ => Err(Error::InvalidArgument(format!("unknown direction '{s}' (expected max or min)"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Maxima => "max",
            Direction::Minima => "min",
        })
    }
}

/// Grid neighborhood.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "4" => Ok(Connectivity::Four),
            "8" => Ok(Connectivity::Eight),
            _ => Err(Error::InvalidArgument(format!("unknown connectivity '{s}' (expected 4 or 8)"))),
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connectivity::Four => "4",
            Connectivity::Eight => "8",
        })
    }
}

fn neighbors(field: &ScalarField2D, conn: Connectivity, v: usize, out: &mut Vec<usize>) {
    out.clear();
    let (rows, cols) = (field.rows() as isize, field.cols() as isize);
    let (r, c) = ((v / field.cols()) as isize, (v % field.cols()) as isize);
    for dr in -1..=1isize {
        for dc in -1..=1isize {
            if (dr == 0 && dc == 0) || (conn == Connectivity::Four && dr != 0 && dc != 0) {
                continue;
            }
            let (nr, nc) = (r + dr, c + dc);
            if nr >= 0 && nr < rows && nc >= 0 && nc < cols {
                out.push((nr * cols + nc) as usize);
            }
        }
    }
}

/// Scalar values with ties resolved by linear index: a later index counts as lower.
///
/// When the field has repeated values every value is shifted down by
/// `eps · index / len` with `eps = 1e-9 · max(1, max |v|)`, which keeps distinct values in
/// their order (up to differences below `eps`) and makes equal values strictly decreasing
/// in index. Also returns `eps`.
pub fn simulated_values(values: &[f64]) -> (Vec<f64>, f64) {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-9 * scale;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).all(|w| w[0] != w[1]) {
        return (values.to_vec(), eps);
    }
    let n = values.len() as f64;
    (values.iter().enumerate().map(|(i, v)| v - eps * i as f64 / n).collect(), eps)
}

/// Linear indices sorted by decreasing simulated value, ties by ascending index.
pub(crate) fn sweep_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }
}

/// Merge tree of a field: each local extremum becomes a leaf, every grid vertex where
/// two or more components meet becomes an inner node, and the last vertex of the sweep
/// becomes the root.
///
/// If the last vertex is itself a leaf or a junction, a root is added `eps` below it.
pub fn compute_merge_tree(field: &ScalarField2D, direction: Direction, conn: Connectivity) -> Result<MergeTree> {
    let raw = match direction {
        Direction::Maxima => field.values().to_vec(),
        Direction::Minima => field.negated().values().to_vec(),
    };
    let (values, eps) = simulated_values(&raw);
    let order = sweep_order(&values);

    let mut uf = UnionFind::new(values.len());
    // lowest tree node of the component represented by each union-find root
    let mut head = vec![usize::MAX; values.len()];
    let mut processed = vec![false; values.len()];
    let mut node_values = Vec::new();
    let mut node_parents: Vec<Option<usize>> = Vec::new();
    let mut nbrs = Vec::with_capacity(8);
    let mut comps = Vec::with_capacity(8);
    let mut last_created = false;

    for (step, &v) in order.iter().enumerate() {
        neighbors(field, conn, v, &mut nbrs);
        comps.clear();
        for &w in &nbrs {
            if processed[w] {
                let r = uf.find(w);
                if !comps.contains(&r) {
                    comps.push(r);
                }
            }
        }
        processed[v] = true;
        let is_last = step + 1 == order.len();
        match comps.len() {
            0 => {
                node_values.push(values[v]);
                node_parents.push(None);
                head[v] = node_values.len() - 1;
                last_created = true;
            }
            1 if !is_last => {
                uf.parent[v] = comps[0];
                last_created = false;
            }
            _ => {
                let node = node_values.len();
                node_values.push(values[v]);
                node_parents.push(None);
                // sorted so that child order does not depend on neighbor scan order
                comps.sort_by_key(|&r| head[r]);
                for &r in &comps {
                    node_parents[head[r]] = Some(node);
                    uf.parent[r] = v;
                }
                head[v] = node;
                last_created = comps.len() >= 2;
            }
        }
    }
    if last_created {
        let top = node_values.len() - 1;
        node_values.push(node_values[top] - eps);
        node_parents.push(None);
        node_parents[top] = Some(top + 1);
    }
    let tree = MergeTree::from_parents(node_values, node_parents)?;
    tree.validate().into_result()?;
    Ok(tree)
}

/// Number of grid vertices that come before all of their neighbors in the sweep order.
pub fn count_local_extrema(field: &ScalarField2D, direction: Direction, conn: Connectivity) -> usize {
    let raw = match direction {
        Direction::Maxima => field.values().to_vec(),
        Direction::Minima => field.negated().values().to_vec(),
    };
    let (values, _) = simulated_values(&raw);
    let before = |a: usize, b: usize| values[a] > values[b] || (values[a] == values[b] && a < b);
    let mut nbrs = Vec::new();
    (0..values.len())
        .filter(|&v| {
            neighbors(field, conn, v, &mut nbrs);
            nbrs.iter().all(|&w| before(v, w))
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(rows: usize, cols: usize, v: &[f64]) -> ScalarField2D {
        ScalarField2D::new(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn constant_field_gives_single_branch() {
        let t = compute_merge_tree(&field(3, 3, &[2.0; 9]), Direction::Maxima, Connectivity::Eight).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.leaf_count(), 1);
    }

    #[test]
    fn hand_traced_row() {
        let t = compute_merge_tree(&field(1, 4, &[1.0, 3.0, 2.0, 4.0]), Direction::Maxima, Connectivity::Four).unwrap();
        assert_eq!(t.len(), 4);
        let root = t.root().unwrap();
        assert_eq!(t.value(root), 1.0);
        let saddle = t.children(root)[0];
        assert_eq!(t.value(saddle), 2.0);
        let mut leaves: Vec<f64> = t.children(saddle).iter().map(|&c| t.value(c)).collect();
        leaves.sort_by(f64::total_cmp);
        assert_eq!(leaves, vec![3.0, 4.0]);
    }

    #[test]
    fn minima_tree_stores_negated_values() {
        let f = field(1, 4, &[1.0, 3.0, 2.0, 4.0]);
        let t = compute_merge_tree(&f.negated(), Direction::Minima, Connectivity::Four).unwrap();
        let u = compute_merge_tree(&f, Direction::Maxima, Connectivity::Four).unwrap();
        assert_eq!(t, u);
    }

    #[test]
    fn last_vertex_at_a_junction_gets_a_root_below() {
        // the minimum sits between the two peaks
        let t = compute_merge_tree(&field(1, 3, &[5.0, 0.0, 4.0]), Direction::Maxima, Connectivity::Four).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.value(t.root().unwrap()) < 0.0);
        let single = compute_merge_tree(&field(1, 1, &[7.0]), Direction::Maxima, Connectivity::Four).unwrap();
        assert_eq!(single.len(), 2);
    }

    #[test]
    fn connectivity_changes_diagonal_peaks() {
        #[rustfmt::skip]
        let f = field(2, 2, &[
            5.0, 1.0,
            0.0, 4.0,
        ]);
        let four = compute_merge_tree(&f, Direction::Maxima, Connectivity::Four).unwrap();
        let eight = compute_merge_tree(&f, Direction::Maxima, Connectivity::Eight).unwrap();
        assert_eq!(four.leaf_count(), 2);
        assert_eq!(eight.leaf_count(), 1);
        assert_eq!(count_local_extrema(&f, Direction::Maxima, Connectivity::Four), 2);
        assert_eq!(count_local_extrema(&f, Direction::Maxima, Connectivity::Eight), 1);
    }

    #[test]
    fn ties_are_perturbed_into_a_strict_order() {
        let f = field(2, 3, &[1.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        let t = compute_merge_tree(&f, Direction::Maxima, Connectivity::Four).unwrap();
        assert!(t.validate().is_ok());
        assert_eq!(t.leaf_count(), count_local_extrema(&f, Direction::Maxima, Connectivity::Four));
    }

    #[test]
    fn direction_parsing() {
        assert_eq!("min".parse::<Direction>().unwrap(), Direction::Minima);
        assert!("up".parse::<Direction>().is_err());
        assert_eq!("4".parse::<Connectivity>().unwrap(), Connectivity::Four);
        assert!("6".parse::<Connectivity>().is_err());
    }
}
