//! Three one-saddle trees whose free branch mapping distances break the triangle
//! inequality, while the elder rule decompositions give a metric.
//!
//! cargo run --example triangle_triple

use branchmap::trees::elder_rule_decomposition;
use branchmap::trees::fixtures::{triangle_a, triangle_b, triangle_c};
use branchmap::{branch_mapping_distance, Aggregation, BaseMetric, CostModel, MergeTree};

fn main() -> branchmap::Result<()> {
    let cost = CostModel::new(BaseMetric::BirthPersistenceL1, Aggregation::Sum);
    let trees = [("a", triangle_a()), ("b", triangle_b()), ("c", triangle_c())];

    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let ((n1, t1), (n2, t2)) = (&trees[i], &trees[j]);
        let (d, mapping) = branch_mapping_distance(t1, t2, cost, None)?;
        println!("d({n1}, {n2}) = {d}");
        for (x, y) in &mapping.pairs {
            println!("  ({}, {}) <-> ({}, {})", v(t1, x.start), v(t1, x.leaf), v(t2, y.start), v(t2, y.leaf));
        }
    }

    let fixed = |t1: &MergeTree, t2: &MergeTree| -> branchmap::Result<f64> {
        let (b1, b2) = (elder_rule_decomposition(t1), elder_rule_decomposition(t2));
        Ok(branch_mapping_distance(t1, t2, cost, Some((&b1, &b2)))?.0)
    };
    let (a, b, c) = (&trees[0].1, &trees[1].1, &trees[2].1);
    println!(
        "elder decompositions: d(a,b) = {}, d(b,c) = {}, d(a,c) = {}",
        fixed(a, b)?,
        fixed(b, c)?,
        fixed(a, c)?
    );
    Ok(())
}

fn v(t: &MergeTree, n: usize) -> f64 {
    t.value(n)
}
