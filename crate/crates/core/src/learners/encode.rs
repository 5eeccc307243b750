//! Numeric encoding for the linear learners: mean imputation and min-max
//! scaling for numeric attributes, one-hot columns for nominal ones (plus a
//! dedicated column for missing values when the fitting data has any).

use crate::model::{AttributeKind, Dataset, Value};

#[derive(Debug, Clone, PartialEq)]
enum Column {
    Numeric { attr: usize, fill: f64, min: f64, range: f64 },
    Category { attr: usize, category: usize },
    MissingIndicator { attr: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    columns: Vec<Column>,
}

impl Encoder {
    pub fn fit(dataset: &Dataset) -> Self {
        let mut columns = Vec::new();
        for attr in dataset.feature_indices() {
            let any_missing = dataset.rows.iter().any(|r| r[attr].is_missing());
            match &dataset.attributes[attr].kind {
                AttributeKind::Numeric => {
                    let observed: Vec<f64> = dataset.rows.iter().filter_map(|r| r[attr].as_f64()).collect();
                    let (min, max) = observed
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
                    let (min, range, fill) = if observed.is_empty() {
                        (0.0, 0.0, 0.0)
                    } else {
                        (min, max - min, observed.iter().sum::<f64>() / observed.len() as f64)
                    };
                    columns.push(Column::Numeric { attr, fill, min, range });
                }
                AttributeKind::Nominal(cats) => {
                    for category in 0..cats.len() {
                        columns.push(Column::Category { attr, category });
                    }
                    if any_missing {
                        columns.push(Column::MissingIndicator { attr });
                    }
                }
            }
        }
        Encoder { columns }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn encode(&self, row: &[Value]) -> Vec<f64> {
        self.columns
            .iter()
            .map(|col| match *col {
                Column::Numeric { attr, fill, min, range } => {
                    let v = row[attr].as_f64().unwrap_or(fill);
                    if range > 0.0 {
                        (v - min) / range
                    } else {
                        0.0
                    }
                }
                Column::Category { attr, category } => match row[attr] {
                    Value::Nominal(c) if c == category => 1.0,
                    _ => 0.0,
                },
                Column::MissingIndicator { attr } => {
                    if row[attr].is_missing() {
                        1.0
                    } else {
                        0.0
                    }
                }
            })
            .collect()
    }

    pub fn encode_all(&self, dataset: &Dataset) -> Vec<Vec<f64>> {
        dataset.rows.iter().map(|r| self.encode(r)).collect()
    }
}
