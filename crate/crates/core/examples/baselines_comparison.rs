//! Branch mapping distance next to the fixed-decomposition baselines on trees whose
//! two highest peaks swap order.
//!
//! cargo run --example baselines_comparison

use branchmap::pipeline::{compute_distance, DistanceKind};
use branchmap::{Aggregation, BaseMetric, CostModel, MergeTree};

/// Root, saddle at 1, a high peak with a small side peak, and a second peak of height `other`.
fn two_peaks(other: f64) -> MergeTree {
    MergeTree::new(
        vec![0.0, 1.0, 6.0, 10.0, 7.0, other],
        vec![None, Some(0), Some(1), Some(2), Some(2), Some(1)],
    )
    .unwrap()
}

fn main() -> branchmap::Result<()> {
    let (t1, t2) = (two_peaks(9.8), two_peaks(10.2));
    for metric in BaseMetric::ALL {
        for mode in [Aggregation::Sum, Aggregation::RootOfSquaredSum] {
            let cost = CostModel::new(metric, mode);
            let row: Vec<String> = DistanceKind::ALL
                .iter()
                .map(|&k| Ok(format!("{k} {:.3}", compute_distance(k, &t1, &t2, cost)?)))
                .collect::<branchmap::Result<_>>()?;
            println!("{:>17} {:>3}: {}", metric.name(), mode.name(), row.join("  "));
        }
    }
    Ok(())
}
