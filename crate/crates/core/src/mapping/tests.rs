use super::*;
use crate::metrics::{Aggregation, BaseMetric, BranchLabel};
use crate::trees::fixtures::*;
use crate::trees::{elder_rule_decomposition, enumerate_branch_decompositions};

fn bp() -> CostModel {
    CostModel::new(BaseMetric::BirthPersistenceL1, Aggregation::Sum)
}

fn pers() -> CostModel {
    CostModel::new(BaseMetric::PersistenceDiff, Aggregation::Sum)
}

fn b(start: NodeId, leaf: NodeId) -> Branch {
    Branch::new(start, leaf)
}

/// Main branch 0→4 with three side branches attached at increasing depth.
fn three_siblings() -> MergeTree {
    MergeTree::new(
        vec![0.0, 1.0, 2.0, 3.0, 10.0, 5.0, 6.0, 7.0],
        vec![None, Some(0), Some(1), Some(2), Some(3), Some(1), Some(2), Some(3)],
    )
    .unwrap()
}

#[test]
fn triangle_pairwise_distances() {
    let (a, bb, c) = (triangle_a(), triangle_b(), triangle_c());
    let (ab, m) = branch_mapping_distance(&a, &bb, bp(), None).unwrap();
    assert_eq!(ab, 2.0);
    assert_eq!(m.pairs, vec![(b(0, 2), b(0, 2)), (b(1, 3), b(1, 3))]);
    assert_eq!(branch_mapping_distance(&bb, &c, bp(), None).unwrap().0, 1.0);
    let (ac, m) = branch_mapping_distance(&a, &c, bp(), None).unwrap();
    assert_eq!(ac, 5.0);
    assert_eq!(m.pairs, vec![(b(0, 2), b(0, 2)), (b(1, 3), b(1, 3))]);
    assert!(validate_branch_mapping(&m, &a, &c).is_ok());
}

#[test]
fn short_branch_is_deleted() {
    let (l, r) = (with_short_branch(), without_short_branch());
    let (d, m) = branch_mapping_distance(&l, &r, pers(), None).unwrap();
    assert_eq!(d, 2.0);
    assert_eq!(m.deletions.len(), 1);
    assert_eq!(m.deletions[0].label(&l), BranchLabel::new(9.0, 11.0));
    assert!(m.insertions.is_empty());
}

#[test]
fn self_distance_is_zero_with_identity() {
    for t in [triangle_a(), with_short_branch(), balanced_four_leaves(), three_siblings()] {
        for metric in BaseMetric::ALL {
            let (d, m) = branch_mapping_distance(&t, &t, CostModel::new(metric, Aggregation::Sum), None).unwrap();
            assert_eq!(d, 0.0);
            assert!(m.pairs.iter().all(|(x, y)| x == y));
            assert!(m.deletions.is_empty() && m.insertions.is_empty());
        }
    }
}

#[test]
fn deleting_trees() {
    assert_eq!(delete_tree_cost(&single_branch(0.0, 10.0), pers()).unwrap(), 10.0);
    assert_eq!(delete_tree_cost(&triangle_a(), pers()).unwrap(), 13.0);
    assert_eq!(delete_tree_cost(&MergeTree::empty(), pers()).unwrap(), 0.0);
    let (d, m) = branch_mapping_distance(&MergeTree::empty(), &triangle_a(), pers(), None).unwrap();
    assert_eq!(d, 13.0);
    assert_eq!(m.insertions.len(), 2);
    assert!(validate_branch_mapping(&m, &MergeTree::empty(), &triangle_a()).is_ok());
}

#[test]
fn squared_aggregation() {
    let t1 = one_saddle(0.5, 10.0, 4.0);
    let t2 = single_branch(0.0, 10.0);
    let cost = CostModel::new(BaseMetric::PersistenceDiff, Aggregation::RootOfSquaredSum);
    let (d, m) = branch_mapping_distance(&t1, &t2, cost, None).unwrap();
    // main (0,10) ↔ (0,10) at 0 plus deleting (0.5,4): 3.5
    assert!((d - 3.5).abs() < 1e-12);
    assert!(validate_branch_mapping(&m, &t1, &t2).is_ok());
}

#[test]
fn fixed_mode_uses_given_decompositions() {
    let (a, c) = (triangle_a(), triangle_c());
    let da = enumerate_branch_decompositions(&a, 10).unwrap();
    let dc = enumerate_branch_decompositions(&c, 10).unwrap();
    let mut best = f64::INFINITY;
    for x in &da {
        for y in &dc {
            let (d, m) = branch_mapping_distance(&a, &c, bp(), Some((x, y))).unwrap();
            assert_eq!(&m.decompositions.0, x);
            assert_eq!(&m.decompositions.1, y);
            assert!(validate_branch_mapping(&m, &a, &c).is_ok());
            best = best.min(d);
        }
    }
    assert_eq!(best, branch_mapping_distance(&a, &c, bp(), None).unwrap().0);
}

#[test]
fn fixed_decomposition_of_the_wrong_tree_is_rejected() {
    let a = triangle_a();
    let other = elder_rule_decomposition(&balanced_four_leaves());
    let own = elder_rule_decomposition(&a);
    let err = branch_mapping_distance(&a, &a, bp(), Some((&other, &own))).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
}

#[test]
fn invalid_tree_is_rejected() {
    let bad = MergeTree::from_parents(vec![5.0, 3.0], vec![None, Some(0)]).unwrap();
    let err = branch_mapping_distance(&bad, &triangle_a(), bp(), None).unwrap_err();
    assert!(matches!(err, Error::InvalidTree(_)));
}

#[test]
fn missing_main_pair_is_reported() {
    let a = triangle_a();
    let (_, mut m) = branch_mapping_distance(&a, &a, bp(), None).unwrap();
    let main = m.pairs.remove(0);
    m.deletions.push(main.0);
    m.insertions.push(main.1);
    m.total_cost = m.recompute_cost(&a, &a);
    let report = validate_branch_mapping(&m, &a, &a);
    assert!(report.violations.contains(&MappingViolation::MainNotPaired), "{report}");
}

#[test]
fn crossed_siblings_break_order() {
    let t = three_siblings();
    let dec = elder_rule_decomposition(&t);
    let mut m = BranchMapping {
        decompositions: (dec.clone(), dec),
        pairs: vec![(b(0, 4), b(0, 4)), (b(1, 5), b(2, 6)), (b(2, 6), b(1, 5)), (b(3, 7), b(3, 7))],
        deletions: vec![],
        insertions: vec![],
        total_cost: 0.0,
        cost_model: pers(),
    };
    m.total_cost = m.recompute_cost(&t, &t);
    let report = validate_branch_mapping(&m, &t, &t);
    assert!(
        report.violations.iter().any(|v| matches!(v, MappingViolation::OrderNotPreserved { .. })),
        "{report}"
    );
    assert!(!report.violations.contains(&MappingViolation::MainNotPaired));
}

#[test]
fn orphaned_pair_breaks_upward_closure() {
    let t = balanced_four_leaves();
    let dec = elder_rule_decomposition(&t);
    let bdt = crate::trees::build_bdt(&t, &dec);
    // a grandchild branch paired while its parent branch is deleted
    let grand = (0..bdt.len()).find(|&i| bdt.parent[i].is_some_and(|p| p != 0)).unwrap();
    let parent = bdt.parent[grand].unwrap();
    let main = dec.main().unwrap();
    let others: Vec<Branch> = dec.branches().iter().copied().filter(|&x| x != main && x != dec.branches()[grand]).collect();
    let mut m = BranchMapping {
        decompositions: (dec.clone(), dec.clone()),
        pairs: vec![(main, main), (dec.branches()[grand], dec.branches()[grand])],
        deletions: others.clone(),
        insertions: others,
        total_cost: 0.0,
        cost_model: pers(),
    };
    m.total_cost = m.recompute_cost(&t, &t);
    let report = validate_branch_mapping(&m, &t, &t);
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, MappingViolation::NotUpwardClosed { pair } if pair.0 == dec.branches()[grand])));
    assert_ne!(parent, 0);
}

#[test]
fn cost_mismatch_is_reported() {
    let a = triangle_a();
    let (_, mut m) = branch_mapping_distance(&a, &triangle_c(), bp(), None).unwrap();
    m.total_cost = 1.0;
    let report = validate_branch_mapping(&m, &a, &triangle_c());
    assert!(matches!(report.violations[..], [MappingViolation::CostMismatch { .. }]));
}

#[test]
fn node_mapping_of_the_triangle_trees() {
    let (a, c) = (triangle_a(), triangle_c());
    let (_, m) = branch_mapping_distance(&a, &c, bp(), None).unwrap();
    let nodes = induced_node_mapping(&m, &a, &c).unwrap();
    let values: Vec<(f64, f64)> = nodes.iter().map(|&(x, y)| (a.value(x), c.value(y))).collect();
    assert_eq!(values, vec![(0.0, 0.0), (3.0, 6.0), (10.0, 11.0), (6.0, 8.0)]);
}

#[test]
fn node_mapping_skips_deletions() {
    let (l, r) = (with_short_branch(), without_short_branch());
    let (_, m) = branch_mapping_distance(&l, &r, pers(), None).unwrap();
    let nodes = induced_node_mapping(&m, &l, &r).unwrap();
    assert!(nodes.iter().all(|&(x, _)| x != m.deletions[0].leaf));
    assert_eq!(nodes.len(), 4);
}

#[test]
fn node_mapping_rejects_invalid_mapping() {
    let a = triangle_a();
    let (_, mut m) = branch_mapping_distance(&a, &a, bp(), None).unwrap();
    m.total_cost += 3.0;
    assert!(induced_node_mapping(&m, &a, &a).is_err());
}

#[test]
fn oracles_agree_on_fixtures() {
    let trees = [triangle_a(), triangle_b(), triangle_c(), with_short_branch(), without_short_branch(), balanced_four_leaves(), three_siblings()];
    for metric in BaseMetric::ALL {
        for mode in Aggregation::ALL {
            let cost = CostModel::new(metric, mode);
            for x in &trees {
                for y in &trees {
                    let dp = branch_mapping_distance(x, y, cost, None).unwrap().0;
                    let oracle = oracle_distance(x, y, cost).unwrap();
                    let brute = brute_force_distance(x, y, cost).unwrap();
                    assert!((dp - oracle).abs() < 1e-9, "{metric} {mode}: {dp} vs {oracle}");
                    assert!((dp - brute).abs() < 1e-9, "{metric} {mode}: {dp} vs {brute}");
                }
            }
        }
    }
}

#[test]
fn oracle_respects_leaf_cap() {
    let mut values = vec![0.0];
    let mut parents = vec![None];
    // a comb with 8 leaves
    let mut spine = 0;
    for i in 0..7 {
        values.push(1.0 + i as f64);
        parents.push(Some(spine));
        let s = values.len() - 1;
        values.push(20.0 + i as f64);
        parents.push(Some(s));
        spine = s;
    }
    values.push(100.0);
    parents.push(Some(spine));
    let comb = MergeTree::new(values, parents).unwrap();
    assert_eq!(comb.leaf_count(), 8);
    assert!(matches!(oracle_distance(&comb, &comb, pers()), Err(Error::SizeLimit { .. })));
}

#[test]
fn memo_keys_respect_ancestry() {
    let (x, y) = (balanced_four_leaves(), three_siblings());
    let (_, _, stats) = branch_mapping_distance_with_stats(&x, &y, bp(), None, true).unwrap();
    let keys = stats.keys.as_ref().unwrap();
    assert_eq!(keys.len(), stats.total());
    for k in keys {
        if let (Some(n), Some(p)) = (k.n1, k.p1) {
            assert!(x.is_strict_ancestor(p, n));
        }
        if let (Some(n), Some(p)) = (k.n2, k.p2) {
            assert!(y.is_strict_ancestor(p, n));
        }
    }
    let bound = x.len() * x.height() * y.len() * y.height();
    assert!(stats.pair_states <= bound);
}

#[test]
fn json_export_fields() {
    let (a, c) = (triangle_a(), triangle_c());
    let (_, m) = branch_mapping_distance(&a, &c, bp(), None).unwrap();
    let v: serde_json::Value = serde_json::from_str(&m.to_json(&a, &c).unwrap()).unwrap();
    assert_eq!(v["totalCost"], 5.0);
    assert_eq!(v["metric"], "birth-persistence");
    assert_eq!(v["mode"], "sum");
    assert_eq!(v["pairs"][1]["t2Leaf"], 3);
    assert_eq!(v["pairs"][1]["cost"], 4.0);
    assert!(v["deletions"].as_array().unwrap().is_empty());
}
