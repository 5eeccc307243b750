//! Small from-scratch classifiers used by the landmarkers, the separability
//! measures and the instance hardness measures.

pub mod conditional;
pub mod cv;
pub mod distance;
pub mod encode;
pub mod knn;
pub mod lda;
pub mod linear;
pub mod stump;
pub mod tree;

use crate::model::Value;

pub use conditional::{fit_class_conditionals, ClassConditionalModel};
pub use cv::{cross_validate, stratified_folds};
pub use distance::{DistanceMatrix, DistanceMetric};
pub use knn::{k_nearest, loo_1nn_error, NearestNeighbor};
pub use lda::{fit_lda, train_lda, LdaClassifier};
pub use linear::{linear_error_distance, train_linear, LinearConfig, LinearModel};
pub use stump::{information_gain, train_stump, Stump, StumpLandmark, StumpMode};
pub use tree::{train_tree, TreeConfig, TreeModel};

/// A trained model that assigns a class index to a row.
pub trait Classifier {
    fn predict(&self, row: &[Value]) -> usize;
}

/// Index of the largest count, lowest index on ties. `None` when all counts
/// are zero.
pub(crate) fn majority(counts: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (c, &n) in counts.iter().enumerate() {
        if n > 0 && best.is_none_or(|(_, bn)| n > bn) {
            best = Some((c, n));
        }
    }
    best.map(|(c, _)| c)
}

/// Shannon entropy in bits of a class histogram.
pub(crate) fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            let p = n as f64 / total;
            -p * p.log2()
        })
        .sum()
}
