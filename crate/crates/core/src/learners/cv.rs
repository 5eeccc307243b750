//! Stratified k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Classifier;
use crate::error::{Error, Result};
use crate::model::Dataset;

/// Assigns each instance a fold in `0..k`. Instances of each class are
/// shuffled with `seed` and dealt round-robin, continuing the deal across
/// classes so fold sizes differ by at most one.
pub fn stratified_folds(labels: &[usize], k: usize, seed: u64) -> Vec<usize> {
    assert!(k >= 1, "fold count must be positive");
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; labels.len()];
    let mut next = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[i] = next % k;
            next += 1;
        }
    }
    folds
}

/// Stratified k-fold accuracy of the model produced by `fit`, pooled over
/// all test predictions. Folds with no test instances are skipped.
pub fn cross_validate<M, F>(dataset: &Dataset, k: usize, seed: u64, fit: F) -> Result<f64>
where
    M: Classifier,
    F: Fn(&Dataset) -> Result<M>,
{
    let n = dataset.n_instances();
    if n < 2 {
        return Err(Error::data("cross-validation needs at least two instances"));
    }
    let k = k.clamp(2, n);
    let folds = stratified_folds(&dataset.labels(), k, seed);
    let mut correct = 0usize;
    for f in 0..k {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| folds[i] == f);
        if test.is_empty() {
            continue;
        }
        let model = fit(&dataset.subset(&train))?;
        correct += test
            .iter()
            .filter(|&&i| model.predict(&dataset.rows[i]) == dataset.class_of(i))
            .count();
    }
    Ok(correct as f64 / n as f64)
}
