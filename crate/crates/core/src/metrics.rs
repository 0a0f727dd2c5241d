//! Pure branch costs and cost aggregation.
//!
//! A branch is reduced to its [`BranchLabel`]: the scalar value where it starts
//! (the saddle it is born at, or the root for the main branch) and the value of
//! its leaf. Every cost here reads nothing else, so any decomposition of a tree
//! can be priced branch by branch.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Start and end value of a branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchLabel {
    pub low: f64,
    pub high: f64,
}

impl BranchLabel {
    pub fn new(low: f64, high: f64) -> Self {
        BranchLabel { low, high }
    }

    pub fn persistence(&self) -> f64 {
        self.high - self.low
    }
}

/// Base metric on branch labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseMetric {
    /// `|pers(a) - pers(b)|`; deleting costs the persistence.
    PersistenceDiff,
    /// `|low(a) - low(b)| + |pers(a) - pers(b)|`; deleting costs the persistence.
    BirthPersistenceL1,
    /// Euclidean distance of the `(low, high)` points; deleting costs the distance to the diagonal.
    EuclideanBD,
    /// Chebyshev distance of the `(low, high)` points; deleting costs half the persistence.
    LInfinityBD,
}

impl BaseMetric {
    pub const ALL: [BaseMetric; 4] = [
        BaseMetric::PersistenceDiff,
        BaseMetric::BirthPersistenceL1,
        BaseMetric::EuclideanBD,
        BaseMetric::LInfinityBD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseMetric::PersistenceDiff => "persistence",
            BaseMetric::BirthPersistenceL1 => "birth-persistence",
            BaseMetric::EuclideanBD => "euclidean",
            BaseMetric::LInfinityBD => "linf",
        }
    }

    pub fn pair_cost(self, a: BranchLabel, b: BranchLabel) -> f64 {
        match self {
            BaseMetric::PersistenceDiff => (a.persistence() - b.persistence()).abs(),
            BaseMetric::BirthPersistenceL1 => {
                (a.low - b.low).abs() + (a.persistence() - b.persistence()).abs()
            }
            BaseMetric::EuclideanBD => (a.low - b.low).hypot(a.high - b.high),
            BaseMetric::LInfinityBD => (a.low - b.low).abs().max((a.high - b.high).abs()),
        }
    }

    /// Cost of matching a branch against nothing.
    pub fn deletion_cost(self, a: BranchLabel) -> f64 {
        let p = a.persistence();
        match self {
            BaseMetric::PersistenceDiff | BaseMetric::BirthPersistenceL1 => p,
            BaseMetric::EuclideanBD => p / std::f64::consts::SQRT_2,
            BaseMetric::LInfinityBD => p / 2.0,
        }
    }

    /// Cost of an edit operation; `None` stands for the empty branch.
    pub fn branch_cost(self, a: Option<BranchLabel>, b: Option<BranchLabel>) -> Result<f64> {
        match (a, b) {
            (Some(a), Some(b)) => Ok(self.pair_cost(a, b)),
            (Some(a), None) | (None, Some(a)) => Ok(self.deletion_cost(a)),
            (None, None) => Err(Error::InvalidArgument(
                "branch cost needs at least one non-empty branch".into(),
            )),
        }
    }
}

impl fmt::Display for BaseMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseMetric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric '{s}'")))
    }
}

/// How the costs of the individual edit operations are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    Sum,
    /// Square root of the sum of squared costs.
    RootOfSquaredSum,
}

impl Aggregation {
    pub const ALL: [Aggregation; 2] = [Aggregation::Sum, Aggregation::RootOfSquaredSum];

    pub fn name(self) -> &'static str {
        match self {
            Aggregation::Sum => "sum",
            Aggregation::RootOfSquaredSum => "l2",
        }
    }

    /// Maps a single operation cost into the additive domain the optimizer works in.
    #[inline]
    pub fn lift(self, cost: f64) -> f64 {
        match self {
            Aggregation::Sum => cost,
            Aggregation::RootOfSquaredSum => cost * cost,
        }
    }

    /// Maps an additive total back to a distance.
    #[inline]
    pub fn finish(self, total: f64) -> f64 {
        match self {
            Aggregation::Sum => total,
            Aggregation::RootOfSquaredSum => total.max(0.0).sqrt(),
        }
    }

    pub fn aggregate(self, costs: &[f64]) -> f64 {
        self.finish(costs.iter().map(|&c| self.lift(c)).sum())
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Aggregation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown aggregation '{s}'")))
    }
}

/// A base metric together with an aggregation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostModel {
    pub metric: BaseMetric,
    pub mode: Aggregation,
}

impl CostModel {
    pub fn new(metric: BaseMetric, mode: Aggregation) -> Self {
        CostModel { metric, mode }
    }

    #[inline]
    pub(crate) fn pair(&self, a: BranchLabel, b: BranchLabel) -> f64 {
        self.mode.lift(self.metric.pair_cost(a, b))
    }

    #[inline]
    pub(crate) fn delete(&self, a: BranchLabel) -> f64 {
        self.mode.lift(self.metric.deletion_cost(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(low: f64, high: f64) -> BranchLabel {
        BranchLabel::new(low, high)
    }

    #[test]
    fn birth_persistence_example() {
        let c = BaseMetric::BirthPersistenceL1.pair_cost(l(3.0, 6.0), l(5.0, 8.0));
        assert_eq!(c, 2.0);
    }

    #[test]
    fn identical_labels_cost_nothing() {
        for m in BaseMetric::ALL {
            assert_eq!(m.pair_cost(l(0.0, 12.0), l(0.0, 12.0)), 0.0);
        }
    }

    #[test]
    fn persistence_deletion() {
        let c = BaseMetric::PersistenceDiff.branch_cost(Some(l(9.0, 11.0)), None).unwrap();
        assert_eq!(c, 2.0);
    }

    #[test]
    fn euclidean_deletion_is_distance_to_diagonal() {
        let a = l(1.0, 5.0);
        let mid = (a.low + a.high) / 2.0;
        let direct = (a.low - mid).hypot(a.high - mid);
        assert!((BaseMetric::EuclideanBD.deletion_cost(a) - direct).abs() < 1e-12);
        assert_eq!(BaseMetric::LInfinityBD.deletion_cost(a), 2.0);
    }

    #[test]
    fn both_empty_is_rejected() {
        assert!(BaseMetric::EuclideanBD.branch_cost(None, None).is_err());
    }

    #[test]
    fn aggregation_examples() {
        assert_eq!(Aggregation::Sum.aggregate(&[2.0, 0.0]), 2.0);
        assert_eq!(Aggregation::RootOfSquaredSum.aggregate(&[3.0, 4.0]), 5.0);
        assert_eq!(Aggregation::Sum.aggregate(&[]), 0.0);
        assert_eq!(Aggregation::RootOfSquaredSum.aggregate(&[]), 0.0);
    }

    #[test]
    fn names_round_trip() {
        for m in BaseMetric::ALL {
            assert_eq!(m.name().parse::<BaseMetric>().unwrap(), m);
        }
        for a in Aggregation::ALL {
            assert_eq!(a.name().parse::<Aggregation>().unwrap(), a);
        }
        assert!("manhattan".parse::<BaseMetric>().is_err());
    }

    fn label() -> impl Strategy<Value = Option<BranchLabel>> {
        prop_oneof![
            1 => Just(None),
            6 => (-50.0f64..50.0, 0.001f64..40.0).prop_map(|(lo, p)| Some(l(lo, lo + p))),
        ]
    }

    fn cost(m: BaseMetric, a: Option<BranchLabel>, b: Option<BranchLabel>) -> f64 {
        if a.is_none() && b.is_none() {
            0.0
        } else {
            m.branch_cost(a, b).unwrap()
        }
    }

    /// With an empty branch in the middle, `c(a, b) <= c(a, 0) + c(0, b)` only holds for
    /// persistence differences: two short branches born far apart are cheaper to delete and
    /// re-insert than to match. Every other configuration of the triangle inequality holds,
    /// which is what composing two branch mappings needs.
    #[test]
    fn empty_branch_does_not_shortcut_far_apart_births() {
        let a = l(0.0, 1.0);
        let b = l(100.0, 101.0);
        for m in [BaseMetric::BirthPersistenceL1, BaseMetric::EuclideanBD, BaseMetric::LInfinityBD] {
            assert!(m.pair_cost(a, b) > m.deletion_cost(a) + m.deletion_cost(b));
        }
        let m = BaseMetric::PersistenceDiff;
        assert!(m.pair_cost(a, b) <= m.deletion_cost(a) + m.deletion_cost(b));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn base_metrics_are_metrics(a in label(), b in label(), c in label()) {
            for m in BaseMetric::ALL {
                let ab = cost(m, a, b);
                let bc = cost(m, b, c);
                let ac = cost(m, a, c);
                prop_assert!(ab >= 0.0);
                prop_assert_eq!(ab, cost(m, b, a));
                let empty_middle = b.is_none() && a.is_some() && c.is_some();
                if !empty_middle || m == BaseMetric::PersistenceDiff {
                    prop_assert!(ac <= ab + bc + 1e-12, "{m}: {ac} > {ab} + {bc}");
                }
                if a.is_some() && b.is_some() && ab == 0.0 && m != BaseMetric::PersistenceDiff {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
