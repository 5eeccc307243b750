use super::{Classifier, DistanceMatrix, DistanceMetric};
use crate::error::{Error, Result};
use crate::model::{Dataset, Value};

/// The `k` instances nearest to `i` (excluding `i`), ordered by distance
/// and then by index.
pub fn k_nearest(matrix: &DistanceMatrix, i: usize, k: usize) -> Vec<usize> {
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (j, &d) in matrix.row(i).iter().enumerate() {
        if j == i {
            continue;
        }
        if best.len() == k && d >= best[k - 1].0 {
            continue;
        }
        // j grows monotonically, so equal distances keep index order
        let pos = best.partition_point(|&(bd, _)| bd <= d);
        best.insert(pos, (d, j));
        best.truncate(k);
    }
    best.into_iter().map(|(_, j)| j).collect()
}

/// Nearest other instance of `i`, lowest index on ties.
pub(crate) fn nearest(matrix: &DistanceMatrix, i: usize) -> Option<usize> {
    k_nearest(matrix, i, 1).first().copied()
}

/// Leave-one-out error rate of the 1-nearest-neighbor classifier.
pub fn loo_1nn_error(dataset: &Dataset, metric: &DistanceMetric) -> Result<f64> {
    if dataset.n_instances() < 2 {
        return Err(Error::data("leave-one-out 1-NN needs at least two instances"));
    }
    let matrix = metric.matrix(dataset);
    Ok(loo_1nn_error_from(&matrix, &dataset.labels()))
}

pub(crate) fn loo_1nn_error_from(matrix: &DistanceMatrix, labels: &[usize]) -> f64 {
    let wrong = (0..labels.len())
        .filter(|&i| nearest(matrix, i).is_none_or(|j| labels[j] != labels[i]))
        .count();
    wrong as f64 / labels.len() as f64
}

/// 1-NN classifier over a stored training set.
#[derive(Debug, Clone)]
pub struct NearestNeighbor {
    metric: DistanceMetric,
    rows: Vec<Vec<Value>>,
    labels: Vec<usize>,
}

impl NearestNeighbor {
    pub fn fit(dataset: &Dataset) -> Result<Self> {
        if dataset.n_instances() == 0 {
            return Err(Error::data("1-NN needs at least one training instance"));
        }
        Ok(NearestNeighbor {
            metric: DistanceMetric::fit(dataset),
            rows: dataset.rows.clone(),
            labels: dataset.labels(),
        })
    }

    /// Same as [`NearestNeighbor::fit`] but with a caller-supplied metric.
    pub fn with_metric(dataset: &Dataset, metric: DistanceMetric) -> Self {
        NearestNeighbor {
            metric,
            rows: dataset.rows.clone(),
            labels: dataset.labels(),
        }
    }
}

impl Classifier for NearestNeighbor {
    fn predict(&self, row: &[Value]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (j, r) in self.rows.iter().enumerate() {
            let d = self.metric.distance(row, r);
            if d < best.0 {
                best = (d, j);
            }
        }
        self.labels[best.1]
    }
}
