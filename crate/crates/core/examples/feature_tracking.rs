//! Follows maxima through a series in which one bump splits into two, printing the track
//! of every leaf and the births along the way.
//!
//! cargo run --example feature_tracking

use branchmap::field::{generate_split_series, SplitSpec};
use branchmap::pipeline::{track_features, tree_from_field, DistanceKind, TreeOptions};
use branchmap::{Aggregation, BaseMetric, CostModel};

fn main() -> branchmap::Result<()> {
    let fields = generate_split_series(&SplitSpec::default())?;
    let options = TreeOptions { simplify: 0.01, ..TreeOptions::default() };
    let trees = fields.iter().map(|f| tree_from_field(f, &options)).collect::<branchmap::Result<Vec<_>>>()?;
    let cost = CostModel::new(BaseMetric::BirthPersistenceL1, Aggregation::Sum);
    let tracking = track_features(&trees, DistanceKind::Branch, cost)?;

    for step in &tracking.steps {
        println!("{:>2} -> {:>2}: distance {:.4}, {} leaves matched", step.from_step, step.to_step, step.distance, step.pairs.len());
    }
    for track in &tracking.tracks {
        let heights: Vec<String> = track
            .nodes
            .iter()
            .map(|&(t, n)| format!("{:.2}", trees[t].value(n)))
            .collect();
        println!("track {} (steps {}..={}): {}", track.id, track.start_step, track.end_step, heights.join(" "));
    }
    Ok(())
}
