//! One-vs-rest linear classifier trained by full-batch subgradient descent
//! on the mean hinge loss.

use super::encode::Encoder;
use crate::error::{Error, Result};
use crate::model::{Dataset, Value};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Weights start at zero, so training is deterministic regardless of the
    /// seed; it is kept so callers can record it with the experiment.
    pub seed: u64,
}

impl Default for LinearConfig {
    fn default() -> Self {
        LinearConfig {
            epochs: 500,
            learning_rate: 0.01,
            seed: 0,
        }
    }
}

/// Hyperplane in the encoder's feature space separating `positive_class`
/// from every other class.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub encoder: Encoder,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub positive_class: usize,
}

impl LinearModel {
    pub fn decision(&self, row: &[Value]) -> f64 {
        self.decision_encoded(&self.encoder.encode(row))
    }

    fn decision_encoded(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predicts_positive(&self, row: &[Value]) -> bool {
        self.decision(row) > 0.0
    }

    fn is_wrong(&self, row: &[Value], class: usize) -> bool {
        self.predicts_positive(row) != (class == self.positive_class)
    }

    /// Fraction of rows whose side of the hyperplane disagrees with the
    /// one-vs-rest label.
    pub fn error_rate(&self, dataset: &Dataset) -> f64 {
        self.error_rate_on(dataset.rows.iter().zip(dataset.labels()))
    }

    pub(crate) fn error_rate_on<'a>(&self, rows: impl Iterator<Item = (&'a Vec<Value>, usize)>) -> f64 {
        let (mut wrong, mut total) = (0usize, 0usize);
        for (row, class) in rows {
            total += 1;
            if self.is_wrong(row, class) {
                wrong += 1;
            }
        }
        if total == 0 {
            0.0
        } else {
            wrong as f64 / total as f64
        }
    }
}

fn hinge_loss(z: &[Vec<f64>], y: &[f64], w: &[f64], b: f64) -> f64 {
    z.iter()
        .zip(y)
        .map(|(x, &t)| {
            let f: f64 = w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b;
            (1.0 - t * f).max(0.0)
        })
        .sum::<f64>()
        / z.len() as f64
}

/// Trains a `positive_class`-vs-rest hyperplane. Features are standardized
/// internally; the returned model is expressed in the encoder's space. The
/// iterate with the lowest hinge loss is kept.
pub fn train_linear(dataset: &Dataset, positive_class: usize, config: &LinearConfig) -> Result<LinearModel> {
    let labels = dataset.labels();
    let pos = labels.iter().filter(|&&c| c == positive_class).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::data("linear classifier needs instances on both sides"));
    }
    let encoder = Encoder::fit(dataset);
    let x = encoder.encode_all(dataset);
    let width = encoder.width();
    let n = x.len() as f64;

    let mut mean = vec![0.0; width];
    for row in &x {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    let mut scale = vec![0.0; width];
    for row in &x {
        for ((s, v), m) in scale.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m) / n;
        }
    }
    for s in &mut scale {
        *s = s.sqrt();
    }
    let z: Vec<Vec<f64>> = x
        .iter()
        .map(|row| {
            row.iter()
                .zip(&mean)
                .zip(&scale)
                .map(|((v, m), s)| if *s > 0.0 { (v - m) / s } else { 0.0 })
                .collect()
        })
        .collect();
    let y: Vec<f64> = labels
        .iter()
        .map(|&c| if c == positive_class { 1.0 } else { -1.0 })
        .collect();

    let mut w = vec![0.0; width];
    let mut b = 0.0;
    let mut best = (hinge_loss(&z, &y, &w, b), w.clone(), b);
    for _ in 0..config.epochs {
        let mut gw = vec![0.0; width];
        let mut gb = 0.0;
        for (row, &t) in z.iter().zip(&y) {
            let f: f64 = w.iter().zip(row).map(|(a, v)| a * v).sum::<f64>() + b;
            if t * f < 1.0 {
                for (g, v) in gw.iter_mut().zip(row) {
                    *g -= t * v / n;
                }
                gb -= t / n;
            }
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= config.learning_rate * g;
        }
        b -= config.learning_rate * gb;
        let loss = hinge_loss(&z, &y, &w, b);
        if loss < best.0 {
            best = (loss, w.clone(), b);
        }
    }

    let (_, w, b) = best;
    let mut weights = vec![0.0; width];
    let mut bias = b;
    for j in 0..width {
        if scale[j] > 0.0 {
            weights[j] = w[j] / scale[j];
            bias -= w[j] * mean[j] / scale[j];
        }
    }
    Ok(LinearModel {
        encoder,
        weights,
        bias,
        positive_class,
    })
}

/// Mean distance of misclassified instances to the hyperplane:
/// `sum(|decision| / ||w||) / N` over the misclassified rows.
pub fn linear_error_distance(model: &LinearModel, dataset: &Dataset) -> Result<f64> {
    let norm = model.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::data("degenerate model"));
    }
    if dataset.n_instances() == 0 {
        return Err(Error::data("no instances"));
    }
    let total: f64 = dataset
        .rows
        .iter()
        .zip(dataset.labels())
        .filter(|(row, class)| model.is_wrong(row, *class))
        .map(|(row, _)| model.decision(row).abs() / norm)
        .sum();
    Ok(total / dataset.n_instances() as f64)
}
