//! Mixed numeric/nominal distance with min-max normalization.

use crate::model::{AttributeKind, Dataset, Value};

#[derive(Debug, Clone, PartialEq)]
enum Feature {
    Numeric { attr: usize, min: f64, range: f64 },
    Nominal { attr: usize },
}

/// Heterogeneous Euclidean-overlap distance fitted to one dataset.
///
/// Per attribute: numeric values contribute `|a - b| / range` (capped at 1),
/// nominal values 0 when equal and 1 otherwise, and any missing operand 1.
/// The per-attribute terms combine as a Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMetric {
    features: Vec<Feature>,
}

impl DistanceMetric {
    pub fn fit(dataset: &Dataset) -> Self {
        let features = dataset
            .feature_indices()
            .into_iter()
            .map(|attr| match dataset.attributes[attr].kind {
                AttributeKind::Nominal(_) => Feature::Nominal { attr },
                AttributeKind::Numeric => {
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for row in &dataset.rows {
                        if let Value::Numeric(v) = row[attr] {
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                    if lo > hi {
                        (lo, hi) = (0.0, 0.0);
                    }
                    Feature::Numeric {
                        attr,
                        min: lo,
                        range: hi - lo,
                    }
                }
            })
            .collect();
        DistanceMetric { features }
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    fn term(&self, f: &Feature, a: &[Value], b: &[Value]) -> f64 {
        match *f {
            Feature::Numeric { attr, range, .. } => match (a[attr], b[attr]) {
                (Value::Numeric(x), Value::Numeric(y)) => {
                    if x == y {
                        0.0
                    } else if range > 0.0 {
                        ((x - y).abs() / range).min(1.0)
                    } else {
                        1.0
                    }
                }
                _ => 1.0,
            },
            Feature::Nominal { attr } => match (a[attr], b[attr]) {
                (Value::Nominal(x), Value::Nominal(y)) if x == y => 0.0,
                _ => 1.0,
            },
        }
    }

    pub fn distance(&self, a: &[Value], b: &[Value]) -> f64 {
        self.features
            .iter()
            .map(|f| {
                let t = self.term(f, a, b);
                t * t
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Full pairwise matrix over the dataset rows; the diagonal is 0.
    pub fn matrix(&self, dataset: &Dataset) -> DistanceMatrix {
        let n = dataset.n_instances();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.distance(&dataset.rows[i], &dataset.rows[j]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}
