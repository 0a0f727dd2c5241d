//! Minimum-cost assignment between two child lists where any element may instead be
//! removed at its own cost.
//!
//! Solved exactly with the Hungarian method (shortest augmenting paths with vertex
//! potentials, O(n³)) on the usual square extension: `rows + cols` on each side, where
//! row `i`'s dummy column carries its deletion cost and column `j`'s dummy row its
//! insertion cost.

/// Outcome of [`match_with_gaps`].
#[derive(Clone, Debug, PartialEq)]
pub struct GapMatching {
    pub cost: f64,
    /// For every row, the matched column or `None` if the row is deleted.
    pub row_to_col: Vec<Option<usize>>,
}

impl GapMatching {
    /// Columns left unmatched (inserted).
    pub fn unmatched_cols(&self, cols: usize) -> Vec<usize> {
        let mut used = vec![false; cols];
        for c in self.row_to_col.iter().flatten() {
            used[*c] = true;
        }
        (0..cols).filter(|&c| !used[c]).collect()
    }
}

/// Solves the square assignment problem on a row-major `n × n` matrix.
/// Returns the column assigned to every row.
pub fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    // 1-based potentials; column 0 is the virtual start
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            assignment[row_of[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Matches `rows` against `cols` at `pair(i, j)`, or deletes row `i` at `delete[i]` /
/// inserts column `j` at `insert[j]`, minimizing the total.
pub fn match_with_gaps(
    rows: usize,
    cols: usize,
    pair: impl Fn(usize, usize) -> f64,
    delete: &[f64],
    insert: &[f64],
) -> GapMatching {
    debug_assert_eq!(delete.len(), rows);
    debug_assert_eq!(insert.len(), cols);
    if rows == 0 || cols == 0 {
        return GapMatching {
            cost: delete.iter().sum::<f64>() + insert.iter().sum::<f64>(),
            row_to_col: vec![None; rows],
        };
    }
    if rows == 1 && cols == 1 {
        let m = pair(0, 0);
        let g = delete[0] + insert[0];
        return if m <= g {
            GapMatching { cost: m, row_to_col: vec![Some(0)] }
        } else {
            GapMatching { cost: g, row_to_col: vec![None] }
        };
    }

    let n = rows + cols;
    let finite_total: f64 = delete.iter().chain(insert).sum::<f64>();
    let mut pairs = vec![0.0; rows * cols];
    let mut big = finite_total;
    for i in 0..rows {
        for j in 0..cols {
            let c = pair(i, j);
            pairs[i * cols + j] = c;
            big += c;
        }
    }
    let big = big * 2.0 + 1.0;
    let mut m = vec![big; n * n];
    for i in 0..rows {
        m[i * n..i * n + cols].copy_from_slice(&pairs[i * cols..(i + 1) * cols]);
        m[i * n + cols + i] = delete[i];
    }
    for j in 0..cols {
        m[(rows + j) * n + j] = insert[j];
        for i in 0..rows {
            m[(rows + j) * n + cols + i] = 0.0;
        }
    }
    let assignment = hungarian(&m, n);
    let mut row_to_col = vec![None; rows];
    let mut matched_col = vec![false; cols];
    for i in 0..rows {
        if assignment[i] < cols {
            row_to_col[i] = Some(assignment[i]);
            matched_col[assignment[i]] = true;
        }
    }
    // re-sum in a fixed order so the total does not depend on potential round-off
    let mut cost = 0.0;
    for i in 0..rows {
        cost += match row_to_col[i] {
            Some(j) => pairs[i * cols + j],
            None => delete[i],
        };
    }
    for j in 0..cols {
        if !matched_col[j] {
            cost += insert[j];
        }
    }
    GapMatching { cost, row_to_col }
}

/// Exhaustive version of [`match_with_gaps`]; only for tiny inputs.
pub fn match_with_gaps_brute_force(
    rows: usize,
    cols: usize,
    pair: impl Fn(usize, usize) -> f64,
    delete: &[f64],
    insert: &[f64],
) -> GapMatching {
    fn rec(
        i: usize,
        rows: usize,
        cols: usize,
        pair: &dyn Fn(usize, usize) -> f64,
        delete: &[f64],
        insert: &[f64],
        used: &mut Vec<bool>,
        current: &mut Vec<Option<usize>>,
        best: &mut GapMatching,
    ) {
        if i == rows {
            let mut cost = 0.0;
            for (r, c) in current.iter().enumerate() {
                cost += match c {
                    Some(j) => pair(r, *j),
                    None => delete[r],
                };
            }
            for j in 0..cols {
                if !used[j] {
                    cost += insert[j];
                }
            }
            if cost < best.cost {
                *best = GapMatching { cost, row_to_col: current.clone() };
            }
            return;
        }
        current.push(None);
        rec(i + 1, rows, cols, pair, delete, insert, used, current, best);
        current.pop();
        for j in 0..cols {
            if !used[j] {
                used[j] = true;
                current.push(Some(j));
                rec(i + 1, rows, cols, pair, delete, insert, used, current, best);
                current.pop();
                used[j] = false;
            }
        }
    }
    let mut best = GapMatching { cost: f64::INFINITY, row_to_col: vec![None; rows] };
    rec(0, rows, cols, &pair, delete, insert, &mut vec![false; cols], &mut Vec::new(), &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_hungarian() {
        #[rustfmt::skip]
        let m = [
            4.0, 1.0, 3.0,
            2.0, 0.0, 5.0,
            3.0, 2.0, 2.0,
        ];
        let a = hungarian(&m, 3);
        let cost: f64 = a.iter().enumerate().map(|(i, &j)| m[i * 3 + j]).sum();
        assert_eq!(cost, 5.0);
    }

    #[test]
    fn deletion_beats_bad_match() {
        let g = match_with_gaps(2, 1, |i, _| if i == 0 { 10.0 } else { 1.0 }, &[2.0, 2.0], &[3.0]);
        assert_eq!(g.row_to_col, vec![None, Some(0)]);
        assert_eq!(g.cost, 3.0);
    }

    #[test]
    fn empty_sides() {
        let g = match_with_gaps(0, 2, |_, _| 0.0, &[], &[1.0, 2.0]);
        assert_eq!(g.cost, 3.0);
        assert_eq!(g.unmatched_cols(2), vec![0, 1]);
    }

    proptest! {
        #[test]
        fn hungarian_matches_brute_force(
            rows in 0usize..5,
            cols in 0usize..5,
            seed in proptest::collection::vec(0.0f64..10.0, 25 + 10),
        ) {
            let pair = |i: usize, j: usize| seed[i * 5 + j];
            let delete: Vec<f64> = seed[25..25 + rows].to_vec();
            let insert: Vec<f64> = seed[30..30 + cols].to_vec();
            let fast = match_with_gaps(rows, cols, pair, &delete, &insert);
            let slow = match_with_gaps_brute_force(rows, cols, pair, &delete, &insert);
            prop_assert!((fast.cost - slow.cost).abs() < 1e-9, "{} vs {}", fast.cost, slow.cost);
        }
    }
}
