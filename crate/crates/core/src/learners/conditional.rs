//! Per-class attribute distributions: Laplace-smoothed category frequencies
//! for nominal attributes, Gaussians for numeric ones.

use crate::model::{AttributeKind, Dataset, Value};

const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Conditional {
    /// Smoothed probability per category.
    Categorical(Vec<f64>),
    Gaussian { mean: f64, variance: f64 },
    /// The class has no observed value for this attribute.
    Absent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassConditionalModel {
    /// Indexed `[class][attribute]`; the class attribute holds `Absent`.
    pub conditionals: Vec<Vec<Conditional>>,
}

pub fn fit_class_conditionals(dataset: &Dataset) -> ClassConditionalModel {
    let n_classes = dataset.n_classes();
    let features = dataset.feature_indices();
    let mut conditionals = vec![vec![Conditional::Absent; dataset.attributes.len()]; n_classes];
    for (class, per_attr) in conditionals.iter_mut().enumerate() {
        let members: Vec<&Vec<Value>> = dataset
            .rows
            .iter()
            .filter(|r| r[dataset.class_index] == Value::Nominal(class))
            .collect();
        for &a in &features {
            per_attr[a] = match &dataset.attributes[a].kind {
                AttributeKind::Nominal(cats) => {
                    let mut counts = vec![0usize; cats.len()];
                    for r in &members {
                        if let Value::Nominal(c) = r[a] {
                            counts[c] += 1;
                        }
                    }
                    let total: usize = counts.iter().sum();
                    let denom = (total + cats.len()) as f64;
                    Conditional::Categorical(counts.iter().map(|&c| (c + 1) as f64 / denom).collect())
                }
                AttributeKind::Numeric => {
                    let vals: Vec<f64> = members.iter().filter_map(|r| r[a].as_f64()).collect();
                    if vals.is_empty() {
                        Conditional::Absent
                    } else {
                        let n = vals.len() as f64;
                        let mean = vals.iter().sum::<f64>() / n;
                        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                        Conditional::Gaussian {
                            mean,
                            variance: var.max(VARIANCE_FLOOR),
                        }
                    }
                }
            };
        }
    }
    ClassConditionalModel { conditionals }
}

impl ClassConditionalModel {
    /// p(value | class) for one attribute. Missing values and attributes the
    /// class never observed give 1. Gaussian densities are not capped.
    pub fn probability(&self, class: usize, attribute: usize, value: Value) -> f64 {
        match (&self.conditionals[class][attribute], value) {
            (_, Value::Missing) | (Conditional::Absent, _) => 1.0,
            (Conditional::Categorical(p), Value::Nominal(c)) => p.get(c).copied().unwrap_or(1.0),
            (Conditional::Gaussian { mean, variance }, Value::Numeric(x)) => {
                (-(x - mean).powi(2) / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
            }
            _ => 1.0,
        }
    }
}
