//! Property tests over generated datasets and documents.

mod common;

use common::{distance_oracle, kruskal_weight, random_dataset, GenConfig};
use metarepo::arff::{parse_arff, write_arff};
use metarepo::hardness::{aggregate_hardness, compute_hardness, compute_kdn};
use metarepo::learners::cv::stratified_folds;
use metarepo::learners::DistanceMetric;
use metarepo::metafeatures::separability::prim_mst;
use metarepo::model::{aggregate_accuracy, FoldAssignment, PartitionFamily, PredictionSet, Role, ExperimentKey};
use metarepo::store::canonical_json;
use proptest::prelude::*;

fn small() -> GenConfig {
    GenConfig {
        min_n: 3,
        max_n: 30,
        ..GenConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn arff_round_trip(seed in any::<u64>()) {
        let d = random_dataset(seed, small());
        let back = parse_arff(&write_arff(&d)).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn prim_matches_kruskal(seed in any::<u64>()) {
        let d = random_dataset(seed, small());
        let m = DistanceMetric::fit(&d).matrix(&d);
        let edges = prim_mst(&m);
        prop_assert_eq!(edges.len(), d.n_instances() - 1);
        let w: f64 = edges.iter().map(|e| e.2).sum();
        prop_assert!((w - kruskal_weight(&distance_oracle(&d))).abs() < 1e-12);
    }

    #[test]
    fn distances_are_symmetric_and_bounded(seed in any::<u64>()) {
        let d = random_dataset(seed, small());
        let m = DistanceMetric::fit(&d).matrix(&d);
        let bound = (d.n_features() as f64).sqrt();
        for i in 0..d.n_instances() {
            prop_assert_eq!(m.get(i, i), 0.0);
            for j in 0..d.n_instances() {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                prop_assert!(m.get(i, j) <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn stratified_folds_are_balanced(labels in prop::collection::vec(0usize..4, 1..80), k in 1usize..11, seed in any::<u64>()) {
        let folds = stratified_folds(&labels, k, seed);
        let mut sizes = vec![0usize; k];
        for &f in &folds {
            prop_assert!(f < k);
            sizes[f] += 1;
        }
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
        prop_assert_eq!(folds.clone(), stratified_folds(&labels, k, seed));
    }

    #[test]
    fn hardness_mean_ignores_order(seed in any::<u64>(), rot in 0usize..30) {
        let d = random_dataset(seed, small());
        let h = compute_hardness(&d, 1).unwrap();
        let mut rotated = h.clone();
        rotated.rotate_left(rot % h.len());
        let (a, b) = (aggregate_hardness(&h).unwrap(), aggregate_hardness(&rotated).unwrap());
        for (x, y) in a.iter().zip(b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn kdn_with_all_neighbors_is_closed_form(seed in any::<u64>()) {
        let d = random_dataset(seed, small());
        let n = d.n_instances();
        let counts = d.class_counts();
        for (i, v) in compute_kdn(&d, n - 1).unwrap().into_iter().enumerate() {
            let same = counts[d.class_of(i)] - 1;
            prop_assert!((v - (1.0 - same as f64 / (n - 1) as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn accuracy_ignores_set_order(seed in any::<u64>(), k in 2usize..6) {
        let d = random_dataset(seed, GenConfig { min_n: 12, ..small() });
        let labels = d.labels();
        let assign = stratified_folds(&labels, k, seed);
        let family: PartitionFamily = format!("t_{}_{k}", seed % 1000).parse().unwrap();
        let exp = ExperimentKey::new("t", "X", 1, "");
        let mut folds = Vec::new();
        let mut sets = Vec::new();
        for f in 0..k {
            let roles = assign.iter().map(|&a| if a == f { Role::Test } else { Role::Train(1.0) }).collect();
            folds.push(FoldAssignment::new(family.fold(f + 1), roles).unwrap());
            let predictions = (0..d.n_instances())
                .filter(|&i| assign[i] == f)
                .map(|i| (i, (labels[i] + i % 2) % d.n_classes()))
                .collect();
            sets.push(PredictionSet { experiment: exp.clone(), partition: family.fold(f + 1), predictions });
        }
        let a = aggregate_accuracy(&sets, &folds, &d).unwrap();
        sets.reverse();
        let b = aggregate_accuracy(&sets, &folds, &d).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn canonical_json_is_order_independent(pairs in prop::collection::btree_map("[a-z]{1,6}", -1000i64..1000, 0..12)) {
        let forward: serde_json::Map<String, serde_json::Value> =
            pairs.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
        let backward: serde_json::Map<String, serde_json::Value> =
            pairs.iter().rev().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
        let (a, b) = (canonical_json(&forward.into()), canonical_json(&backward.into()));
        prop_assert_eq!(&a, &b);
        let reparsed: serde_json::Value = serde_json::from_str(&a).unwrap();
        prop_assert_eq!(canonical_json(&reparsed), a);
    }
}
