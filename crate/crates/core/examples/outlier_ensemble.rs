//! A 20-member peak ensemble where one member lacks the center peak. The branch mapping
//! distance singles it out; the one-degree distance on elder decompositions does not,
//! because members whose two highest peaks swap order look far apart.
//!
//! cargo run --release --example outlier_ensemble [out-dir]

use std::path::PathBuf;

use branchmap::field::{generate_ensemble, EnsembleSpec};
use branchmap::pipeline::{cluster_order, compute_matrix, tree_from_field, DistanceKind, TreeOptions};
use branchmap::{Aggregation, BaseMetric, CostModel};

fn main() -> branchmap::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let (members, outlier) = (20, 7);
    let fields = generate_ensemble(&EnsembleSpec::outlier(members, outlier, 42))?;
    let options = TreeOptions { simplify: 0.05, ..TreeOptions::default() };
    let trees = fields.iter().map(|f| tree_from_field(f, &options)).collect::<branchmap::Result<Vec<_>>>()?;
    let labels: Vec<String> = (0..members).map(|i| format!("member_{i}")).collect();
    let cost = CostModel::new(BaseMetric::EuclideanBD, Aggregation::RootOfSquaredSum);

    for kind in [DistanceKind::Branch, DistanceKind::OneDegree, DistanceKind::Constrained] {
        let m = compute_matrix(&trees, labels.clone(), kind, cost, 0)?;
        let mut outlier_min = f64::INFINITY;
        let mut others_max: f64 = 0.0;
        for i in 0..members {
            for j in (0..members).filter(|&j| j != i) {
                if i == outlier || j == outlier {
                    outlier_min = outlier_min.min(m.get(i, j));
                } else {
                    others_max = others_max.max(m.get(i, j));
                }
            }
        }
        let verdict = if outlier_min > others_max { "separated" } else { "hidden" };
        println!("{kind:>12}: outlier min {outlier_min:.4}, others max {others_max:.4} -> {verdict}");

        let ordered = m.permuted(&cluster_order(&m));
        let stem = out.join(format!("outlier_{kind}"));
        ordered.save_csv(&stem.with_extension("csv"))?;
        ordered.save_pgm(&stem.with_extension("pgm"))?;
    }
    println!("clustered matrices written to {}", out.display());
    Ok(())
}
