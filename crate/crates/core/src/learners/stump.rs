//! One-node decision trees split on information gain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cross_validate, entropy, majority, Classifier};
use crate::error::{Error, Result};
use crate::model::{AttributeKind, Dataset, Value};

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_CV_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StumpMode {
    /// Attribute with the highest information gain.
    Best,
    /// Attribute drawn uniformly with the given seed.
    Random(u64),
    /// Attribute with the lowest information gain.
    Worst,
    /// One stump per attribute; accuracy is the mean over attributes.
    AveragePerAttribute,
}

#[derive(Debug, Clone, PartialEq)]
enum Split {
    /// `value <= threshold` goes to branch 0, larger values to branch 1.
    Threshold(f64),
    /// One branch per category.
    Categories,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stump {
    pub attribute: usize,
    split: Split,
    branch_class: Vec<usize>,
    missing_class: usize,
}

struct Candidate {
    split: Split,
    gain: f64,
}

fn weighted_entropy(parts: &[&[usize]], n: f64) -> f64 {
    parts
        .iter()
        .map(|p| p.iter().sum::<usize>() as f64 / n * entropy(p))
        .sum()
}

/// Best split on one attribute and its information gain over all rows
/// (missing values form their own branch). `None` when every value is missing.
fn best_split(dataset: &Dataset, attr: usize) -> Option<Candidate> {
    let n_classes = dataset.n_classes();
    let n = dataset.n_instances() as f64;
    let mut parent = vec![0; n_classes];
    let mut missing = vec![0; n_classes];
    let mut known: Vec<(f64, usize)> = Vec::new();
    let mut by_category: Vec<Vec<usize>> = match &dataset.attributes[attr].kind {
        AttributeKind::Nominal(cats) => vec![vec![0; n_classes]; cats.len()],
        AttributeKind::Numeric => Vec::new(),
    };
    for (i, row) in dataset.rows.iter().enumerate() {
        let c = dataset.class_of(i);
        parent[c] += 1;
        match row[attr] {
            Value::Missing => missing[c] += 1,
            Value::Numeric(v) => known.push((v, c)),
            Value::Nominal(k) => {
                by_category[k][c] += 1;
                known.push((k as f64, c));
            }
        }
    }
    if known.is_empty() {
        return None;
    }
    let h_parent = entropy(&parent);

    if dataset.attributes[attr].is_nominal() {
        let mut parts: Vec<&[usize]> = by_category.iter().map(Vec::as_slice).collect();
        parts.push(&missing);
        return Some(Candidate {
            split: Split::Categories,
            gain: h_parent - weighted_entropy(&parts, n),
        });
    }

    known.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut right = vec![0; n_classes];
    for &(_, c) in &known {
        right[c] += 1;
    }
    let mut left = vec![0; n_classes];
    let mut best: Option<Candidate> = None;
    for w in 0..known.len() {
        let (v, c) = known[w];
        left[c] += 1;
        right[c] -= 1;
        let Some(&(next, _)) = known.get(w + 1) else { break };
        if next == v {
            continue;
        }
        let gain = h_parent - weighted_entropy(&[&left, &right, &missing], n);
        if best.as_ref().is_none_or(|b| gain > b.gain) {
            best = Some(Candidate {
                split: Split::Threshold((v + next) / 2.0),
                gain,
            });
        }
    }
    Some(best.unwrap_or_else(|| {
        // single distinct value: every known row goes left
        let all: Vec<usize> = left.clone();
        Candidate {
            split: Split::Threshold(known[0].0),
            gain: h_parent - weighted_entropy(&[&all, &missing], n),
        }
    }))
}

/// Information gain of the best stump on `attr`, or `None` if the attribute
/// has no observed values.
pub fn information_gain(dataset: &Dataset, attr: usize) -> Option<f64> {
    best_split(dataset, attr).map(|c| c.gain)
}

impl Stump {
    /// Fits a stump on `attr`. Each branch predicts its majority class (lowest
    /// index on ties); empty branches predict the overall majority.
    pub fn fit(dataset: &Dataset, attr: usize) -> Stump {
        let n_classes = dataset.n_classes();
        let overall = majority(&dataset.class_counts()).unwrap_or(0);
        let split = best_split(dataset, attr).map_or(Split::Threshold(f64::INFINITY), |c| c.split);
        let n_branches = match split {
            Split::Threshold(_) => 2,
            Split::Categories => dataset.attributes[attr].categories().map_or(0, <[String]>::len),
        };
        let mut counts = vec![vec![0; n_classes]; n_branches];
        let mut missing = vec![0; n_classes];
        for (i, row) in dataset.rows.iter().enumerate() {
            let c = dataset.class_of(i);
            match branch(&split, row[attr]) {
                Some(b) => counts[b][c] += 1,
                None => missing[c] += 1,
            }
        }
        Stump {
            attribute: attr,
            split,
            branch_class: counts.iter().map(|h| majority(h).unwrap_or(overall)).collect(),
            missing_class: majority(&missing).unwrap_or(overall),
        }
    }
}

fn branch(split: &Split, value: Value) -> Option<usize> {
    match (split, value) {
        (_, Value::Missing) => None,
        (Split::Threshold(t), Value::Numeric(v)) => Some(usize::from(v > *t)),
        (Split::Categories, Value::Nominal(k)) => Some(k),
        _ => None,
    }
}

impl Classifier for Stump {
    fn predict(&self, row: &[Value]) -> usize {
        branch(&self.split, row[self.attribute])
            .and_then(|b| self.branch_class.get(b).copied())
            .unwrap_or(self.missing_class)
    }
}

/// Outcome of a stump landmarker.
#[derive(Debug, Clone, PartialEq)]
pub struct StumpLandmark {
    /// Attributes the stumps split on (one, or all eligible for the average mode).
    pub attributes: Vec<usize>,
    /// Information gain of every eligible attribute on the full data.
    pub gains: Vec<(usize, f64)>,
    /// Stumps fitted on the full data.
    pub stumps: Vec<Stump>,
    pub cv_accuracy: f64,
}

pub fn train_stump(dataset: &Dataset, mode: StumpMode) -> Result<StumpLandmark> {
    train_stump_with(dataset, mode, DEFAULT_FOLDS, DEFAULT_CV_SEED)
}

/// Like [`train_stump`] with an explicit cross-validation fold count and seed.
pub fn train_stump_with(dataset: &Dataset, mode: StumpMode, folds: usize, cv_seed: u64) -> Result<StumpLandmark> {
    dataset.require_measurable()?;
    let gains: Vec<(usize, f64)> = dataset
        .feature_indices()
        .into_iter()
        .filter_map(|a| information_gain(dataset, a).map(|g| (a, g)))
        .collect();
    if gains.is_empty() {
        return Err(Error::data("no attribute has observed values"));
    }
    let attributes = match mode {
        StumpMode::Best => {
            let mut best = gains[0];
            for &g in &gains[1..] {
                if g.1 > best.1 {
                    best = g;
                }
            }
            vec![best.0]
        }
        StumpMode::Worst => {
            let mut worst = gains[0];
            for &g in &gains[1..] {
                if g.1 < worst.1 {
                    worst = g;
                }
            }
            vec![worst.0]
        }
        StumpMode::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            vec![gains[rng.gen_range(0..gains.len())].0]
        }
        StumpMode::AveragePerAttribute => gains.iter().map(|g| g.0).collect(),
    };
    let mut total = 0.0;
    for &a in &attributes {
        total += cross_validate(dataset, folds, cv_seed, |train| Ok(Stump::fit(train, a)))?;
    }
    Ok(StumpLandmark {
        stumps: attributes.iter().map(|&a| Stump::fit(dataset, a)).collect(),
        cv_accuracy: total / attributes.len() as f64,
        attributes,
        gains,
    })
}
