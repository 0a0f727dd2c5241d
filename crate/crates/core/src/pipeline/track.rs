use serde::Serialize;

use super::{compute_mapping, DistanceKind};
use crate::error::{Error, Result};
use crate::mapping::induced_node_mapping;
use crate::metrics::CostModel;
use crate::trees::{MergeTree, NodeId};

/// A leaf of one time step matched to a leaf of the next.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrackPair {
    pub from_node: NodeId,
    pub to_node: NodeId,
    pub from_value: f64,
    pub to_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepMatching {
    pub from_step: usize,
    pub to_step: usize,
    pub distance: f64,
    pub pairs: Vec<TrackPair>,
}

/// A leaf followed through consecutive time steps.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Track {
    pub id: usize,
    pub start_step: usize,
    pub end_step: usize,
    /// `(step, node)` for every step the track is alive.
    pub nodes: Vec<(usize, NodeId)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tracking {
    pub steps: Vec<StepMatching>,
    pub tracks: Vec<Track>,
}

impl Tracking {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Matches the leaves of consecutive trees through optimal branch mappings and chains
/// the matches into tracks. A leaf without a predecessor starts a new track.
pub fn track_features(trees: &[MergeTree], kind: DistanceKind, cost: CostModel) -> Result<Tracking> {
    if trees.len() < 2 {
        return Err(Error::InvalidArgument("tracking needs at least 2 time steps".into()));
    }
    let mut steps = Vec::with_capacity(trees.len() - 1);
    let mut tracks: Vec<Track> = Vec::new();
    // track id of every leaf of the current step
    let mut current: Vec<Option<usize>> = vec![None; trees[0].len()];
    for leaf in trees[0].leaves() {
        current[leaf] = Some(tracks.len());
        tracks.push(Track { id: tracks.len(), start_step: 0, end_step: 0, nodes: vec![(0, leaf)] });
    }
    for t in 0..trees.len() - 1 {
        let (a, b) = (&trees[t], &trees[t + 1]);
        let (distance, mapping) = compute_mapping(kind, a, b, cost)?;
        let pairs: Vec<TrackPair> = induced_node_mapping(&mapping, a, b)?
            .into_iter()
            .filter(|&(x, y)| a.is_leaf(x) && b.is_leaf(y) && Some(x) != a.root())
            .map(|(x, y)| TrackPair { from_node: x, to_node: y, from_value: a.value(x), to_value: b.value(y) })
            .collect();
        let mut next = vec![None; b.len()];
        for p in &pairs {
            if let Some(id) = current[p.from_node] {
                next[p.to_node] = Some(id);
                tracks[id].end_step = t + 1;
                tracks[id].nodes.push((t + 1, p.to_node));
            }
        }
        for leaf in b.leaves() {
            if next[leaf].is_none() {
                next[leaf] = Some(tracks.len());
                tracks.push(Track { id: tracks.len(), start_step: t + 1, end_step: t + 1, nodes: vec![(t + 1, leaf)] });
            }
        }
        current = next;
        steps.push(StepMatching { from_step: t, to_step: t + 1, distance, pairs });
    }
    Ok(Tracking { steps, tracks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{Aggregation, BaseMetric};
    use crate::trees::fixtures::*;

    #[test]
    fn constant_series_keeps_every_track() {
        let t = balanced_four_leaves();
        let cost = CostModel::new(BaseMetric::PersistenceDiff, Aggregation::Sum);
        let tracking = track_features(&[t.clone(), t.clone(), t], DistanceKind::Branch, cost).unwrap();
        assert_eq!(tracking.tracks.len(), 4);
        assert!(tracking.tracks.iter().all(|tr| tr.start_step == 0 && tr.end_step == 2));
    }

    #[test]
    fn appearing_leaf_starts_a_track() {
        let cost = CostModel::new(BaseMetric::PersistenceDiff, Aggregation::Sum);
        let tracking = track_features(&[single_branch(0.0, 10.0), triangle_a()], DistanceKind::Branch, cost).unwrap();
        assert_eq!(tracking.steps[0].pairs.len(), 1);
        assert_eq!(tracking.tracks.len(), 2);
        assert_eq!(tracking.tracks[1].start_step, 1);
        let json: serde_json::Value = serde_json::from_str(&tracking.to_json().unwrap()).unwrap();
        assert_eq!(json["steps"][0]["pairs"][0]["toValue"], 10.0);
    }

    #[test]
    fn needs_two_steps() {
        let cost = CostModel::new(BaseMetric::PersistenceDiff, Aggregation::Sum);
        assert!(track_features(&[triangle_a()], DistanceKind::Branch, cost).is_err());
    }
}
