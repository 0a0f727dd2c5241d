//! End-to-end operations behind the command line: loading trees, choosing a distance,
//! distance matrices and feature tracking.

mod matrix;
mod track;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

pub use matrix::{cluster_order, compute_matrix, DistanceMatrix};
pub use track::{track_features, StepMatching, Track, TrackPair, Tracking};

use crate::baselines::{constrained_edit_distance, elder_labeled_inputs, one_degree_distance, LabeledTarget};
use crate::error::{Error, Result};
use crate::field::{compute_merge_tree, parse_sf2, simplify, Connectivity, Direction, ScalarField2D};
use crate::mapping::{branch_mapping_distance, BranchMapping};
use crate::metrics::CostModel;
use crate::trees::{elder_rule_decomposition, parse_mt, MergeTree};

/// The distances offered for comparing two merge trees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    /// Branch mapping distance over all branch decompositions.
    #[default]
    Branch,
    /// Branch mapping distance restricted to the elder rule decompositions.
    BranchFixed,
    /// Constrained edit distance on the merge trees labeled with elder branches.
    Constrained,
    /// 1-degree edit distance on the elder branch decomposition trees.
    OneDegree,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 4] = [
        DistanceKind::Branch,
        DistanceKind::BranchFixed,
        DistanceKind::Constrained,
        DistanceKind::OneDegree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Branch => "branch",
            DistanceKind::BranchFixed => "branch-fixed",
            DistanceKind::Constrained => "constrained",
            DistanceKind::OneDegree => "one-degree",
        }
    }

    /// Whether the distance comes with a branch mapping.
    pub fn has_mapping(self) -> bool {
        matches!(self, DistanceKind::Branch | DistanceKind::BranchFixed)
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown distance '{s}'")))
    }
}

pub fn compute_distance(kind: DistanceKind, t1: &MergeTree, t2: &MergeTree, cost: CostModel) -> Result<f64> {
    match kind {
        DistanceKind::Branch | DistanceKind::BranchFixed => compute_mapping(kind, t1, t2, cost).map(|(d, _)| d),
        DistanceKind::Constrained => {
            t1.validate().into_result()?;
            t2.validate().into_result()?;
            let a = elder_labeled_inputs(t1, LabeledTarget::MergeTree);
            let b = elder_labeled_inputs(t2, LabeledTarget::MergeTree);
            Ok(constrained_edit_distance(&a, &b, cost))
        }
        DistanceKind::OneDegree => {
            t1.validate().into_result()?;
            t2.validate().into_result()?;
            let a = elder_labeled_inputs(t1, LabeledTarget::Bdt);
            let b = elder_labeled_inputs(t2, LabeledTarget::Bdt);
            Ok(one_degree_distance(&a, &b, cost))
        }
    }
}

/// Branch mapping distance and an optimal mapping, for the two branch distance kinds.
pub fn compute_mapping(kind: DistanceKind, t1: &MergeTree, t2: &MergeTree, cost: CostModel) -> Result<(f64, BranchMapping)> {
    match kind {
        DistanceKind::Branch => branch_mapping_distance(t1, t2, cost, None),
        DistanceKind::BranchFixed => {
            t1.validate().into_result()?;
            t2.validate().into_result()?;
            let b1 = elder_rule_decomposition(t1);
            let b2 = elder_rule_decomposition(t2);
            branch_mapping_distance(t1, t2, cost, Some((&b1, &b2)))
        }
        _ => Err(Error::InvalidArgument(format!("distance '{kind}' does not produce a branch mapping"))),
    }
}

/// How scalar fields are turned into merge trees.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TreeOptions {
    pub direction: Direction,
    pub connectivity: Connectivity,
    /// Persistence threshold; 0 keeps every branch.
    pub simplify: f64,
}

pub fn tree_from_field(field: &ScalarField2D, options: &TreeOptions) -> Result<MergeTree> {
    let tree = compute_merge_tree(field, options.direction, options.connectivity)?;
    if options.simplify > 0.0 {
        simplify(&tree, options.simplify)
    } else {
        Ok(tree)
    }
}

/// Reads a merge tree file, or a field file (recognized by its `SF2` header) that is
/// converted with `options`. Simplification applies to both.
pub fn load_tree(path: &Path, options: &TreeOptions) -> Result<MergeTree> {
    load_tree_inner(path, options).map_err(|e| match e {
        Error::Io { .. } | Error::Parse { .. } | Error::InFile { .. } => e,
        e => Error::InFile { path: path.to_path_buf(), source: Box::new(e) },
    })
}

fn load_tree_inner(path: &Path, options: &TreeOptions) -> Result<MergeTree> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next());
    if first == Some("SF2") {
        tree_from_field(&parse_sf2(&text, path)?, options)
    } else {
        let tree = parse_mt(&text, path)?;
        if options.simplify > 0.0 {
            simplify(&tree, options.simplify)
        } else {
            Ok(tree)
        }
    }
}

/// Fixed-point text with 9 decimals, the precision of every numeric output.
pub fn format_value(v: f64) -> String {
    format!("{v:.9}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{Aggregation, BaseMetric};
    use crate::trees::fixtures::*;

    fn bp() -> CostModel {
        CostModel::new(BaseMetric::BirthPersistenceL1, Aggregation::Sum)
    }

    #[test]
    fn every_kind_on_the_triangle_trees() {
        let (b, c) = (triangle_b(), triangle_c());
        assert_eq!(compute_distance(DistanceKind::Branch, &b, &c, bp()).unwrap(), 1.0);
        assert_eq!(compute_distance(DistanceKind::OneDegree, &b, &c, bp()).unwrap(), 3.0);
        assert_eq!(compute_distance(DistanceKind::BranchFixed, &b, &c, bp()).unwrap(), 3.0);
        // every merge tree node carries its branch label: 1 + 2 for the labels, twice
        assert_eq!(compute_distance(DistanceKind::Constrained, &b, &c, bp()).unwrap(), 6.0);
        for k in DistanceKind::ALL {
            assert_eq!(compute_distance(k, &b, &b, bp()).unwrap(), 0.0);
        }
    }

    #[test]
    fn kind_names() {
        for k in DistanceKind::ALL {
            assert_eq!(k.name().parse::<DistanceKind>().unwrap(), k);
        }
        assert!("edit".parse::<DistanceKind>().is_err());
        assert!(compute_mapping(DistanceKind::OneDegree, &triangle_a(), &triangle_a(), bp()).is_err());
    }

    #[test]
    fn nine_decimals() {
        assert_eq!(format_value(5.0), "5.000000000");
        assert_eq!(format_value(1.0 / 3.0), "0.333333333");
    }
}
