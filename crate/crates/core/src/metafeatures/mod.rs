//! Dataset-level meta-features: simple counts, data complexity measures
//! and landmarkers.

pub mod geometry;
pub mod landmarkers;
pub mod overlap;
pub mod separability;
pub mod simple;

pub use geometry::{compute_geometry, covering_spheres, interpolated_set, GeometryMeasures};
pub use landmarkers::{compute_landmarkers, Landmarkers};
pub use overlap::{compute_overlap, fisher_ratio, OverlapMeasures};
pub use separability::{boundary_fraction, compute_separability, intra_inter_ratio, prim_mst, SeparabilityMeasures};
pub use simple::{compute_simple, SimpleMeasures};

use crate::error::Result;
use crate::learners::stump::DEFAULT_FOLDS;
use crate::learners::{DistanceMetric, LinearConfig};
use crate::model::Dataset;

/// Column names of the dataset-level meta-features, in export order.
pub const FEATURE_NAMES: [&str; 25] = [
    "numInst",
    "numAttr",
    "propSymbolic",
    "propMissing",
    "propOutlierAttrs",
    "classEntropy",
    "F1",
    "F2",
    "F3",
    "F4",
    "L1",
    "L2",
    "N1",
    "N2",
    "N3",
    "L3",
    "N4",
    "T1",
    "T2",
    "lmLDA",
    "lm1NN",
    "lmStumpBest",
    "lmStumpRandom",
    "lmStumpWorst",
    "lmStumpAvg",
];

/// All dataset-level meta-features. `None` marks a measure that is
/// undefined for the dataset; the reason is in `report`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMetaFeatures {
    pub n_examples: usize,
    pub n_attributes: usize,
    pub prop_symbolic: Option<f64>,
    pub prop_missing: Option<f64>,
    pub prop_outlier_attrs: Option<f64>,
    pub class_entropy: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub f3: Option<f64>,
    pub f4: Option<f64>,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub n1: Option<f64>,
    pub n2: Option<f64>,
    pub n3: Option<f64>,
    pub l3: Option<f64>,
    pub n4: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub lm_lda: Option<f64>,
    pub lm_1nn: Option<f64>,
    pub lm_stump_best: Option<f64>,
    pub lm_stump_random: Option<f64>,
    pub lm_stump_worst: Option<f64>,
    pub lm_stump_avg: Option<f64>,
    pub report: Vec<String>,
}

impl DatasetMetaFeatures {
    /// `(name, value)` pairs in [`FEATURE_NAMES`] order.
    pub fn values(&self) -> Vec<(&'static str, Option<f64>)> {
        let v = [
            Some(self.n_examples as f64),
            Some(self.n_attributes as f64),
            self.prop_symbolic,
            self.prop_missing,
            self.prop_outlier_attrs,
            self.class_entropy,
            self.f1,
            self.f2,
            self.f3,
            self.f4,
            self.l1,
            self.l2,
            self.n1,
            self.n2,
            self.n3,
            self.l3,
            self.n4,
            self.t1,
            self.t2,
            self.lm_lda,
            self.lm_1nn,
            self.lm_stump_best,
            self.lm_stump_random,
            self.lm_stump_worst,
            self.lm_stump_avg,
        ];
        FEATURE_NAMES.into_iter().zip(v).collect()
    }
}

/// Computes every dataset-level meta-feature. Measures that cannot be
/// computed are left undefined rather than failing the whole call; only an
/// invalid or empty dataset is an error. `seed` drives the interpolation
/// used by L3 and N4.
pub fn compute_all(dataset: &Dataset, seed: u64) -> Result<DatasetMetaFeatures> {
    compute_all_with(dataset, seed, DEFAULT_FOLDS)
}

/// Like [`compute_all`] with an explicit landmarker fold count.
pub fn compute_all_with(dataset: &Dataset, seed: u64, folds: usize) -> Result<DatasetMetaFeatures> {
    dataset.require_measurable()?;
    let mut report = Vec::new();
    for a in dataset.feature_indices() {
        if dataset.rows.iter().all(|r| r[a].is_missing()) {
            report.push(format!(
                "attribute '{}' has no observed values; excluded from F1-F4",
                dataset.attributes[a].name
            ));
        }
    }
    let simple = compute_simple(dataset);
    let overlap = compute_overlap(dataset).unwrap_or_else(|e| {
        report.push(format!("F1-F4: {e}"));
        OverlapMeasures {
            f1: None,
            f2: None,
            f3: None,
            f4: None,
        }
    });
    if overlap.f1.is_none() {
        report.push("F1: no numeric attribute with a defined Fisher ratio".into());
    }
    let matrix = DistanceMetric::fit(dataset).matrix(dataset);
    let config = LinearConfig::default();
    let sep = compute_separability(dataset, &matrix, &config, &mut report);
    let geo = compute_geometry(dataset, &matrix, seed, &config, &mut report);
    let lm = compute_landmarkers(dataset, folds, &mut report);
    Ok(DatasetMetaFeatures {
        n_examples: simple.n_examples,
        n_attributes: dataset.n_features(),
        prop_symbolic: simple.prop_symbolic,
        prop_missing: simple.prop_missing,
        prop_outlier_attrs: simple.prop_outlier_attrs,
        class_entropy: Some(simple.class_entropy),
        f1: overlap.f1,
        f2: overlap.f2,
        f3: overlap.f3,
        f4: overlap.f4,
        l1: sep.l1,
        l2: sep.l2,
        n1: sep.n1,
        n2: sep.n2,
        n3: sep.n3,
        l3: geo.l3,
        n4: geo.n4,
        t1: geo.t1,
        t2: geo.t2,
        lm_lda: lm.lm_lda,
        lm_1nn: sep.n3.map(|e| 1.0 - e),
        lm_stump_best: lm.lm_stump_best,
        lm_stump_random: lm.lm_stump_random,
        lm_stump_worst: lm.lm_stump_worst,
        lm_stump_avg: lm.lm_stump_avg,
        report,
    })
}
