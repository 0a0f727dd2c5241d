//! Scalar field to merge tree: sweep, simplification, and MT/SF2 text.
//!
//! cargo run --example field_to_tree

use branchmap::field::{compute_merge_tree, count_local_extrema, format_sf2, simplify, Connectivity, Direction, ScalarField2D};
use branchmap::trees::{elder_rule_decomposition, format_mt};

fn main() -> branchmap::Result<()> {
    // two bumps and a ripple
    let field = ScalarField2D::from_fn(24, 24, |x, y| {
        let bump = |cx: f64, cy: f64, a: f64, w: f64| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * w * w)).exp();
        bump(0.3, 0.4, 1.0, 0.12) + bump(0.75, 0.6, 0.7, 0.1) + 0.03 * (40.0 * x).sin() * (35.0 * y).cos()
    })?;
    let sf2 = format_sf2(&field);
    println!("{}", sf2.lines().next().unwrap_or_default());

    for dir in [Direction::Maxima, Direction::Minima] {
        let tree = compute_merge_tree(&field, dir, Connectivity::Eight)?;
        println!(
            "{dir:?}: {} extrema, tree with {} nodes and {} leaves",
            count_local_extrema(&field, dir, Connectivity::Eight),
            tree.len(),
            tree.leaf_count()
        );
        for tau in [0.05, 0.2] {
            let s = simplify(&tree, tau)?;
            let persistences: Vec<String> = elder_rule_decomposition(&s)
                .branches()
                .iter()
                .map(|b| format!("{:.3}", b.persistence(&s)))
                .collect();
            println!("  simplified at {tau}: {} leaves, persistences [{}]", s.leaf_count(), persistences.join(", "));
        }
    }

    let tree = simplify(&compute_merge_tree(&field, Direction::Maxima, Connectivity::Eight)?, 0.2)?;
    print!("{}", format_mt(&tree));
    Ok(())
}
