//! Per-instance hardness measures and their dataset-level means.

use crate::error::{Error, Result};
use crate::learners::{fit_class_conditionals, k_nearest, train_tree, DistanceMetric};
use crate::model::Dataset;
use crate::store::InstanceMetaFeatures;

pub const DEFAULT_K: usize = 5;

/// Measure names in vector order.
pub const MEASURE_NAMES: [&str; 8] = ["kDN", "DS", "DCP", "TD_U", "TD_P", "CL", "MV", "CB"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceHardness {
    /// Fraction of the k nearest neighbors with another class.
    pub kdn: f64,
    /// Covering leaf size over the largest leaf size, unpruned tree.
    pub disjunct_size: f64,
    /// Share of the covering pruned-tree leaf that has the instance's class.
    pub disjunct_class_pct: f64,
    pub tree_depth_unpruned: usize,
    pub tree_depth_pruned: usize,
    pub class_likelihood: f64,
    pub minority_value: f64,
    pub class_balance: f64,
}

impl InstanceHardness {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.kdn,
            self.disjunct_size,
            self.disjunct_class_pct,
            self.tree_depth_unpruned as f64,
            self.tree_depth_pruned as f64,
            self.class_likelihood,
            self.minority_value,
            self.class_balance,
        ]
    }
}

pub fn compute_kdn(dataset: &Dataset, k: usize) -> Result<Vec<f64>> {
    let n = dataset.n_instances();
    if k == 0 || n <= k {
        return Err(Error::data(format!("kDN needs 1 <= k < N (k = {k}, N = {n})")));
    }
    let matrix = DistanceMetric::fit(dataset).matrix(dataset);
    let labels = dataset.labels();
    Ok((0..n)
        .map(|i| {
            let other = k_nearest(&matrix, i, k)
                .into_iter()
                .filter(|&j| labels[j] != labels[i])
                .count();
            other as f64 / k as f64
        })
        .collect())
}

pub struct DisjunctMeasures {
    pub disjunct_size: Vec<f64>,
    pub disjunct_class_pct: Vec<f64>,
    pub tree_depth_unpruned: Vec<usize>,
    pub tree_depth_pruned: Vec<usize>,
}

pub fn compute_disjunct_measures(dataset: &Dataset) -> DisjunctMeasures {
    let unpruned = train_tree(dataset, false);
    let pruned = train_tree(dataset, true);
    let largest = unpruned.leaves().iter().map(|l| l.count).max().unwrap_or(1).max(1) as f64;
    let mut out = DisjunctMeasures {
        disjunct_size: Vec::new(),
        disjunct_class_pct: Vec::new(),
        tree_depth_unpruned: Vec::new(),
        tree_depth_pruned: Vec::new(),
    };
    for (i, row) in dataset.rows.iter().enumerate() {
        let u = unpruned.leaf_for(row);
        let p = pruned.leaf_for(row);
        out.disjunct_size.push(u.count as f64 / largest);
        out.disjunct_class_pct
            .push(p.class_counts[dataset.class_of(i)] as f64 / p.count.max(1) as f64);
        out.tree_depth_unpruned.push(u.depth);
        out.tree_depth_pruned.push(p.depth);
    }
    out
}

/// Product over attributes of p(x_i | class of x), each factor capped at 1.
pub fn compute_likelihood(dataset: &Dataset) -> Vec<f64> {
    let model = fit_class_conditionals(dataset);
    let features = dataset.feature_indices();
    (0..dataset.n_instances())
        .map(|i| {
            let class = dataset.class_of(i);
            features
                .iter()
                .map(|&a| model.probability(class, a, dataset.rows[i][a]).min(1.0))
                .product()
        })
        .collect()
}

/// Minority value and class balance per instance. Class balance subtracts
/// 1 / (declared number of classes).
pub fn compute_skew(dataset: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let counts = dataset.class_counts();
    let max = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let n = dataset.n_instances().max(1) as f64;
    let c = dataset.n_classes().max(1) as f64;
    (0..dataset.n_instances())
        .map(|i| {
            let own = counts[dataset.class_of(i)] as f64;
            (own / max, own / n - 1.0 / c)
        })
        .unzip()
}

/// All eight measures for every instance.
pub fn compute_hardness(dataset: &Dataset, k: usize) -> Result<Vec<InstanceHardness>> {
    dataset.require_measurable()?;
    let kdn = compute_kdn(dataset, k)?;
    let dj = compute_disjunct_measures(dataset);
    let cl = compute_likelihood(dataset);
    let (mv, cb) = compute_skew(dataset);
    Ok((0..dataset.n_instances())
        .map(|i| InstanceHardness {
            kdn: kdn[i],
            disjunct_size: dj.disjunct_size[i],
            disjunct_class_pct: dj.disjunct_class_pct[i],
            tree_depth_unpruned: dj.tree_depth_unpruned[i],
            tree_depth_pruned: dj.tree_depth_pruned[i],
            class_likelihood: cl[i],
            minority_value: mv[i],
            class_balance: cb[i],
        })
        .collect())
}

/// Mean of each measure over the instances.
pub fn aggregate_hardness(vectors: &[InstanceHardness]) -> Result<[f64; 8]> {
    if vectors.is_empty() {
        return Err(Error::data("no instances to aggregate"));
    }
    let mut sum = [0.0; 8];
    for v in vectors {
        for (s, x) in sum.iter_mut().zip(v.to_array()) {
            *s += x;
        }
    }
    Ok(sum.map(|s| s / vectors.len() as f64))
}

/// Store form of the per-instance vectors, named by [`MEASURE_NAMES`].
pub fn to_instance_metafeatures(vectors: &[InstanceHardness]) -> InstanceMetaFeatures {
    InstanceMetaFeatures {
        measures: MEASURE_NAMES.iter().map(|m| m.to_string()).collect(),
        instances: vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.to_array().iter().map(|&x| Some(x)).collect()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::testutil::one_numeric;
    use crate::model::{AttributeSpec, Value};

    #[test]
    fn alternating_classes_have_full_kdn() {
        let d = one_numeric(&[(0.0, 0), (1.0, 1), (2.0, 0), (3.0, 1)], 2);
        assert_eq!(compute_kdn(&d, 1).unwrap(), vec![1.0; 4]);
        assert!(compute_kdn(&d, 4).is_err());
    }

    #[test]
    fn skew_fixture() {
        let pts: Vec<(f64, usize)> = (0..10).map(|i| (i as f64, usize::from(i == 9))).collect();
        let d = one_numeric(&pts, 2);
        let (mv, cb) = compute_skew(&d);
        assert!((mv[9] - 1.0 / 9.0).abs() < 1e-12);
        assert!((cb[9] + 0.4).abs() < 1e-12);
        assert_eq!(mv[0], 1.0);
        assert!((cb[0] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn likelihood_fixture() {
        let d = Dataset::new(
            "cl",
            vec![
                AttributeSpec::nominal("a", ["v", "w"]),
                AttributeSpec::nominal("class", ["A", "B"]),
            ],
            1,
            vec![
                vec![Value::Nominal(0), Value::Nominal(0)],
                vec![Value::Nominal(0), Value::Nominal(0)],
                vec![Value::Nominal(0), Value::Nominal(0)],
                vec![Value::Missing, Value::Nominal(1)],
            ],
        );
        let cl = compute_likelihood(&d);
        for v in &cl[..3] {
            assert!((v - 0.8).abs() < 1e-12);
        }
        assert_eq!(cl[3], 1.0);
    }

    #[test]
    fn pure_dataset_has_one_disjunct() {
        let d = one_numeric(&[(0.0, 0), (1.0, 0), (2.0, 0)], 2);
        let m = compute_disjunct_measures(&d);
        assert_eq!(m.disjunct_size, vec![1.0; 3]);
        assert_eq!(m.disjunct_class_pct, vec![1.0; 3]);
        assert_eq!(m.tree_depth_unpruned, vec![0; 3]);
    }

    #[test]
    fn aggregate_means() {
        let d = one_numeric(&[(0.0, 0), (1.0, 1), (2.0, 0), (3.0, 1)], 2);
        let v = compute_hardness(&d, 1).unwrap();
        let mean = aggregate_hardness(&v).unwrap();
        assert_eq!(mean[0], 1.0);
        assert_eq!(mean[7], 0.0);
        assert!(aggregate_hardness(&[]).is_err());
    }
}
