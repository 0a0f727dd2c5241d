//! A time series with period 75: the distance matrix shows bands at multiples of the
//! period, and each row's best match away from the diagonal lies one period away.
//!
//! cargo run --release --example periodicity

use branchmap::field::{generate_periodic_series, PeriodicSpec};
use branchmap::pipeline::{compute_matrix, tree_from_field, DistanceKind, TreeOptions};
use branchmap::{Aggregation, BaseMetric, CostModel};

fn main() -> branchmap::Result<()> {
    let (length, period) = (225, 75);
    let fields = generate_periodic_series(&PeriodicSpec::new(length, period, 42))?;
    let trees = fields
        .iter()
        .map(|f| tree_from_field(f, &TreeOptions::default()))
        .collect::<branchmap::Result<Vec<_>>>()?;
    let labels = (0..length).map(|t| t.to_string()).collect();
    let cost = CostModel::new(BaseMetric::BirthPersistenceL1, Aggregation::Sum);
    let m = compute_matrix(&trees, labels, DistanceKind::Branch, cost, 0)?;

    let mut lags = std::collections::BTreeMap::new();
    for i in 0..length {
        let best = (0..length)
            .filter(|&j| i.abs_diff(j) >= period / 2)
            .min_by(|&a, &b| m.get(i, a).total_cmp(&m.get(i, b)))
            .unwrap();
        *lags.entry(i.abs_diff(best)).or_insert(0) += 1;
    }
    println!("off-band best-match lag histogram: {lags:?}");

    // mean distance as a function of lag
    for lag in [1, period / 4, period / 2, period - 1, period, period + 1, 2 * period] {
        let values: Vec<f64> = (0..length - lag).map(|i| m.get(i, i + lag)).collect();
        println!("lag {lag:>3}: mean distance {:.4}", values.iter().sum::<f64>() / values.len() as f64);
    }
    Ok(())
}
