//! Pairwise Fisher linear discriminants with majority voting.

use nalgebra::{DMatrix, DVector};

use super::encode::Encoder;
use super::stump::{DEFAULT_CV_SEED, DEFAULT_FOLDS};
use super::{cross_validate, Classifier};
use crate::error::{Error, Result};
use crate::model::{Dataset, Value};

pub const RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
struct PairDiscriminant {
    /// Lower class index; wins when the score is non-negative.
    first: usize,
    second: usize,
    direction: Vec<f64>,
    threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdaClassifier {
    encoder: Encoder,
    n_classes: usize,
    fallback: usize,
    pairs: Vec<PairDiscriminant>,
}

/// Fits one Fisher discriminant per pair of classes present in `dataset`:
/// direction `(S + ridge*I)^-1 (mu_a - mu_b)` with `S` the pooled within-class
/// scatter, threshold at the projected midpoint of the two means.
pub fn fit_lda(dataset: &Dataset) -> Result<LdaClassifier> {
    let encoder = Encoder::fit(dataset);
    let width = encoder.width();
    if width == 0 {
        return Err(Error::data("linear discriminant needs at least one feature"));
    }
    let x = encoder.encode_all(dataset);
    let labels = dataset.labels();
    let n_classes = dataset.n_classes();
    let counts = dataset.class_counts();
    let present: Vec<usize> = (0..n_classes).filter(|&c| counts[c] > 0).collect();
    let fallback = *present
        .first()
        .ok_or_else(|| Error::data("linear discriminant needs training instances"))?;

    let mut means = vec![DVector::<f64>::zeros(width); n_classes];
    for (row, &c) in x.iter().zip(&labels) {
        means[c] += DVector::from_column_slice(row);
    }
    for &c in &present {
        means[c] /= counts[c] as f64;
    }
    let mut scatter = vec![DMatrix::<f64>::zeros(width, width); n_classes];
    for (row, &c) in x.iter().zip(&labels) {
        let d = DVector::from_column_slice(row) - &means[c];
        scatter[c] += &d * d.transpose();
    }

    let mut pairs = Vec::new();
    for (ai, &a) in present.iter().enumerate() {
        for &b in &present[ai + 1..] {
            let mut pooled = &scatter[a] + &scatter[b];
            for j in 0..width {
                pooled[(j, j)] += RIDGE;
            }
            let chol = pooled
                .cholesky()
                .ok_or_else(|| Error::data("singular scatter matrix"))?;
            let direction = chol.solve(&(&means[a] - &means[b]));
            if direction.iter().any(|v| !v.is_finite()) {
                return Err(Error::data("singular scatter matrix"));
            }
            let threshold = direction.dot(&((&means[a] + &means[b]) / 2.0));
            pairs.push(PairDiscriminant {
                first: a,
                second: b,
                direction: direction.iter().copied().collect(),
                threshold,
            });
        }
    }
    Ok(LdaClassifier {
        encoder,
        n_classes,
        fallback,
        pairs,
    })
}

impl Classifier for LdaClassifier {
    fn predict(&self, row: &[Value]) -> usize {
        if self.pairs.is_empty() {
            return self.fallback;
        }
        let x = self.encoder.encode(row);
        let mut votes = vec![0usize; self.n_classes];
        for p in &self.pairs {
            let score: f64 = p.direction.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() - p.threshold;
            votes[if score >= 0.0 { p.first } else { p.second }] += 1;
        }
        super::majority(&votes).unwrap_or(self.fallback)
    }
}

/// LDA landmarker: the classifier fitted on all data plus its stratified
/// cross-validated accuracy.
pub fn train_lda(dataset: &Dataset) -> Result<(LdaClassifier, f64)> {
    train_lda_with(dataset, DEFAULT_FOLDS, DEFAULT_CV_SEED)
}

pub fn train_lda_with(dataset: &Dataset, folds: usize, cv_seed: u64) -> Result<(LdaClassifier, f64)> {
    dataset.require_measurable()?;
    let model = fit_lda(dataset)?;
    let acc = cross_validate(dataset, folds, cv_seed, fit_lda)?;
    Ok((model, acc))
}
