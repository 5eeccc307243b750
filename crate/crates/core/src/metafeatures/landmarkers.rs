//! Cross-validated accuracy of fast learners.

use crate::learners::lda::train_lda_with;
use crate::learners::stump::{train_stump_with, DEFAULT_CV_SEED};
use crate::learners::StumpMode;
use crate::model::Dataset;

/// Seed for the randomly chosen stump attribute.
pub const RANDOM_STUMP_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct Landmarkers {
    pub lm_lda: Option<f64>,
    pub lm_stump_best: Option<f64>,
    pub lm_stump_random: Option<f64>,
    pub lm_stump_worst: Option<f64>,
    pub lm_stump_avg: Option<f64>,
}

/// Landmarkers evaluated by stratified `folds`-fold cross-validation.
/// Every landmarker except 1-NN, which is derived from the leave-one-out
/// error already computed for the separability measures.
pub fn compute_landmarkers(dataset: &Dataset, folds: usize, report: &mut Vec<String>) -> Landmarkers {
    let mut record = |name: &str, r: crate::Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            report.push(format!("{name}: {e}"));
            None
        }
    };
    let stump = |mode| train_stump_with(dataset, mode, folds, DEFAULT_CV_SEED).map(|s| s.cv_accuracy);
    Landmarkers {
        lm_lda: record("lmLDA", train_lda_with(dataset, folds, DEFAULT_CV_SEED).map(|(_, acc)| acc)),
        lm_stump_best: record("lmStumpBest", stump(StumpMode::Best)),
        lm_stump_random: record("lmStumpRandom", stump(StumpMode::Random(RANDOM_STUMP_SEED))),
        lm_stump_worst: record("lmStumpWorst", stump(StumpMode::Worst)),
        lm_stump_avg: record("lmStumpAvg", stump(StumpMode::AveragePerAttribute)),
    }
}
