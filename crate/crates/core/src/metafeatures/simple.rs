//! Counts and proportions describing the shape of a dataset.

use crate::learners::entropy;
use crate::model::{AttributeKind, Dataset};

/// Ratio var(trimmed) / var(all) below which an attribute counts as having
/// outliers.
const OUTLIER_RATIO: f64 = 0.7;
const TRIM: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleMeasures {
    pub n_examples: usize,
    pub prop_symbolic: Option<f64>,
    pub prop_missing: Option<f64>,
    pub prop_outlier_attrs: Option<f64>,
    pub class_entropy: f64,
}

fn population_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

/// Whether the variance of the 5%-trimmed values falls below 0.7 of the
/// full variance. `None` when the attribute has no observed value.
pub fn has_outliers(values: &[f64]) -> Option<bool> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = (TRIM * sorted.len() as f64).floor() as usize;
    let trimmed = &sorted[k..sorted.len() - k];
    let full = population_variance(&sorted);
    if full <= 0.0 || trimmed.is_empty() {
        return Some(false);
    }
    Some(population_variance(trimmed) / full < OUTLIER_RATIO)
}

pub fn compute_simple(dataset: &Dataset) -> SimpleMeasures {
    let features = dataset.feature_indices();
    let n = dataset.n_instances();
    let n_feat = features.len();
    let symbolic = features
        .iter()
        .filter(|&&a| dataset.attributes[a].is_nominal())
        .count();
    let missing: usize = dataset
        .rows
        .iter()
        .map(|r| features.iter().filter(|&&a| r[a].is_missing()).count())
        .sum();

    let mut numeric = 0usize;
    let mut outliers = 0usize;
    for &a in &features {
        if dataset.attributes[a].kind != AttributeKind::Numeric {
            continue;
        }
        let values: Vec<f64> = dataset.rows.iter().filter_map(|r| r[a].as_f64()).collect();
        if let Some(flag) = has_outliers(&values) {
            numeric += 1;
            outliers += usize::from(flag);
        }
    }

    SimpleMeasures {
        n_examples: n,
        prop_symbolic: (n_feat > 0).then(|| symbolic as f64 / n_feat as f64),
        prop_missing: (n * n_feat > 0).then(|| missing as f64 / (n * n_feat) as f64),
        prop_outlier_attrs: (numeric > 0).then(|| outliers as f64 / numeric as f64),
        class_entropy: entropy(&dataset.class_counts()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::testutil::one_numeric;
    use crate::model::{AttributeSpec, Value};

    #[test]
    fn balanced_two_class_entropy() {
        let d = one_numeric(&[(0.0, 0), (1.0, 1), (2.0, 0), (3.0, 1)], 2);
        let s = compute_simple(&d);
        assert!((s.class_entropy - 1.0).abs() < 1e-12);
        assert_eq!(s.prop_symbolic, Some(0.0));
        assert_eq!(s.prop_missing, Some(0.0));
    }

    #[test]
    fn missing_proportion() {
        let rows = (0..5)
            .map(|i| {
                let a = if i < 2 { Value::Missing } else { Value::Numeric(i as f64) };
                vec![a, Value::Nominal(0), Value::Nominal(i % 2)]
            })
            .collect();
        let d = Dataset::new(
            "m",
            vec![
                AttributeSpec::numeric("a"),
                AttributeSpec::nominal("b", ["x"]),
                AttributeSpec::nominal("class", ["p", "q"]),
            ],
            2,
            rows,
        );
        let s = compute_simple(&d);
        assert_eq!(s.prop_missing, Some(0.2));
        assert_eq!(s.prop_symbolic, Some(0.5));
    }

    #[test]
    fn outlier_detection() {
        let mut v: Vec<f64> = (0..40).map(|i| (i % 5) as f64).collect();
        assert_eq!(has_outliers(&v), Some(false));
        v.push(1000.0);
        v.push(-1000.0);
        assert_eq!(has_outliers(&v), Some(true));
        assert_eq!(has_outliers(&[3.0, 3.0]), Some(false));
        assert_eq!(has_outliers(&[]), None);
    }
}
