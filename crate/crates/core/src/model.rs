//! Domain types shared by the whole crate: datasets, experiment identity,
//! fold assignments and per-instance predictions.
//!
//! Instance and class indices are 0-based everywhere in this module. The
//! store, run files and exports render both 1-based.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    Numeric,
    /// Ordered category names.
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn nominal<S: Into<String>>(name: impl Into<String>, categories: impl IntoIterator<Item = S>) -> Self {
        AttributeSpec {
            name: name.into(),
            kind: AttributeKind::Nominal(categories.into_iter().map(Into::into).collect()),
        }
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self.kind, AttributeKind::Nominal(_))
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.kind {
            AttributeKind::Nominal(c) => Some(c),
            AttributeKind::Numeric => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Numeric(f64),
    /// Category index into the attribute's category list.
    Nominal(usize),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Numeric(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub attributes: Vec<AttributeSpec>,
    pub class_index: usize,
    pub rows: Vec<Vec<Value>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<AttributeSpec>,
        class_index: usize,
        rows: Vec<Vec<Value>>,
    ) -> Self {
        Dataset {
            name: name.into(),
            attributes,
            class_index,
            rows,
        }
    }

    pub fn n_instances(&self) -> usize {
        self.rows.len()
    }

    /// Declared number of classes.
    pub fn n_classes(&self) -> usize {
        self.class_names().len()
    }

    pub fn class_names(&self) -> &[String] {
        self.attributes
            .get(self.class_index)
            .and_then(AttributeSpec::categories)
            .unwrap_or(&[])
    }

    /// Positions of the non-class attributes.
    pub fn feature_indices(&self) -> Vec<usize> {
        (0..self.attributes.len()).filter(|&a| a != self.class_index).collect()
    }

    pub fn n_features(&self) -> usize {
        self.attributes.len().saturating_sub(1)
    }

    /// Class index of row `i`. Only meaningful on a validated dataset.
    pub fn class_of(&self, i: usize) -> usize {
        match self.rows[i][self.class_index] {
            Value::Nominal(c) => c,
            ref v => panic!("row {i} has non-nominal class value {v:?}"),
        }
    }

    pub fn labels(&self) -> Vec<usize> {
        (0..self.n_instances()).map(|i| self.class_of(i)).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for i in 0..self.n_instances() {
            counts[self.class_of(i)] += 1;
        }
        counts
    }

    /// Classes with at least one instance, ascending.
    pub fn present_classes(&self) -> Vec<usize> {
        self.class_counts()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(c, _)| c)
            .collect()
    }

    /// Copy of the dataset restricted to the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            attributes: self.attributes.clone(),
            class_index: self.class_index,
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Fails unless the dataset is valid, non-empty and has at least two
    /// classes with instances.
    pub fn require_measurable(&self) -> Result<()> {
        let violations = validate_dataset(self);
        if let Some(v) = violations.first() {
            return Err(Error::InvalidDataset(format!(
                "{} ({} violation(s) total)",
                v,
                violations.len()
            )));
        }
        if self.rows.is_empty() {
            return Err(Error::data("dataset has no instances"));
        }
        if self.present_classes().len() < 2 {
            return Err(Error::data("at least two classes with instances are required"));
        }
        Ok(())
    }
}

/// One breach of a dataset invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub row: Option<usize>,
    pub attribute: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.row, self.attribute) {
            (Some(r), Some(a)) => write!(f, "row {r}, attribute {a}: {}", self.message),
            (Some(r), None) => write!(f, "row {r}: {}", self.message),
            (None, Some(a)) => write!(f, "attribute {a}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

fn violation(row: Option<usize>, attribute: Option<usize>, message: impl Into<String>) -> Violation {
    Violation {
        row,
        attribute,
        message: message.into(),
    }
}

/// Checks every dataset invariant and reports each breach with its
/// coordinates. An empty list means the dataset is well formed.
pub fn validate_dataset(dataset: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for (a, attr) in dataset.attributes.iter().enumerate() {
        if !names.insert(attr.name.as_str()) {
            out.push(violation(None, Some(a), format!("duplicate attribute name '{}'", attr.name)));
        }
        if let AttributeKind::Nominal(cats) = &attr.kind {
            if cats.is_empty() {
                out.push(violation(None, Some(a), "nominal attribute has no categories"));
            }
            let mut seen = HashSet::new();
            for c in cats {
                if !seen.insert(c.as_str()) {
                    out.push(violation(None, Some(a), format!("duplicate category '{c}'")));
                }
            }
        }
    }
    let class_ok = match dataset.attributes.get(dataset.class_index) {
        None => {
            out.push(violation(None, None, format!("class index {} out of range", dataset.class_index)));
            false
        }
        Some(attr) if !attr.is_nominal() => {
            out.push(violation(None, Some(dataset.class_index), "class attribute must be nominal"));
            false
        }
        Some(_) => true,
    };

    let arity = dataset.attributes.len();
    for (r, row) in dataset.rows.iter().enumerate() {
        if row.len() != arity {
            out.push(violation(Some(r), None, format!("expected {arity} values, got {}", row.len())));
            continue;
        }
        for (a, (value, attr)) in row.iter().zip(&dataset.attributes).enumerate() {
            match (value, &attr.kind) {
                (Value::Missing, _) => {
                    if a == dataset.class_index && class_ok {
                        out.push(violation(Some(r), Some(a), "class label is missing"));
                    }
                }
                (Value::Numeric(v), AttributeKind::Numeric) => {
                    if !v.is_finite() {
                        out.push(violation(Some(r), Some(a), "numeric value is not finite"));
                    }
                }
                (Value::Nominal(i), AttributeKind::Nominal(cats)) => {
                    if *i >= cats.len() {
                        out.push(violation(
                            Some(r),
                            Some(a),
                            format!("category index {i} out of range (attribute has {})", cats.len()),
                        ));
                    }
                }
                (Value::Numeric(_), AttributeKind::Nominal(_)) => {
                    out.push(violation(Some(r), Some(a), "numeric value for nominal attribute"));
                }
                (Value::Nominal(_), AttributeKind::Numeric) => {
                    out.push(violation(Some(r), Some(a), "nominal value for numeric attribute"));
                }
            }
        }
    }
    out
}

/// Identity of one learning algorithm under one hyperparameter setting.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExperimentKey {
    pub toolkit: String,
    pub algorithm: String,
    /// `-1` selects the toolkit defaults.
    pub hyperparameter_seed: i64,
    /// Verbatim command-line form.
    pub hyperparameters: String,
}

impl ExperimentKey {
    pub fn new(
        toolkit: impl Into<String>,
        algorithm: impl Into<String>,
        hyperparameter_seed: i64,
        hyperparameters: impl Into<String>,
    ) -> Self {
        ExperimentKey {
            toolkit: toolkit.into(),
            algorithm: algorithm.into(),
            hyperparameter_seed,
            hyperparameters: hyperparameters.into(),
        }
    }

    /// Canonical `LA_seed` rendering, e.g. `BP_1`.
    pub fn id(&self) -> String {
        format!("{}_{}", self.algorithm, self.hyperparameter_seed)
    }

    pub fn is_default(&self) -> bool {
        self.hyperparameter_seed == -1
    }

    /// Splits an `LA_seed` id into algorithm and seed.
    pub fn parse_id(id: &str) -> Result<(String, i64)> {
        let (alg, seed) = id
            .rsplit_once('_')
            .ok_or_else(|| Error::data(format!("bad experiment id '{id}'")))?;
        let seed = seed
            .parse()
            .map_err(|_| Error::data(format!("bad experiment id '{id}'")))?;
        if alg.is_empty() {
            return Err(Error::data(format!("bad experiment id '{id}'")));
        }
        Ok((alg.to_string(), seed))
    }

    /// Ordering used by every export: algorithm name, then numeric seed.
    pub fn sort_key(&self) -> (String, i64) {
        (self.algorithm.clone(), self.hyperparameter_seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionScheme {
    KFold(usize),
    /// Percentage of the data held out for testing.
    PercentSplit(f64),
    FixedSplit,
}

/// The partition a fold belongs to: who generated it, with which seed and how.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionFamily {
    pub toolkit: String,
    pub seed: i64,
    pub scheme: PartitionScheme,
}

/// Canonical identity of one fold, rendered `toolkit_seed_numFolds_fold`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionKey {
    pub family: PartitionFamily,
    pub fold: usize,
}

fn format_percent(p: f64) -> String {
    let s = format!("{p:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}%")
}

impl fmt::Display for PartitionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scheme {
            PartitionScheme::KFold(k) => write!(f, "{}_{}_{}", self.toolkit, self.seed, k),
            PartitionScheme::PercentSplit(p) => {
                write!(f, "{}_{}_{}", self.toolkit, self.seed, format_percent(p))
            }
            PartitionScheme::FixedSplit => write!(f, "{}_0_0", self.toolkit),
        }
    }
}

impl FromStr for PartitionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::data(format!("bad partition key '{s}'"));
        let (rest, scheme) = s.rsplit_once('_').ok_or_else(bad)?;
        let (toolkit, seed) = rest.rsplit_once('_').ok_or_else(bad)?;
        if toolkit.is_empty() {
            return Err(bad());
        }
        let seed: i64 = seed.parse().map_err(|_| bad())?;
        let scheme = if let Some(p) = scheme.strip_suffix('%') {
            let p: f64 = p.parse().map_err(|_| bad())?;
            if !(p > 0.0 && p < 100.0) {
                return Err(bad());
            }
            PartitionScheme::PercentSplit(p)
        } else {
            let k: usize = scheme.parse().map_err(|_| bad())?;
            match (seed, k) {
                (0, 0) => PartitionScheme::FixedSplit,
                (_, 0) => return Err(bad()),
                _ => PartitionScheme::KFold(k),
            }
        };
        Ok(PartitionFamily {
            toolkit: toolkit.to_string(),
            seed,
            scheme,
        })
    }
}

impl PartitionFamily {
    pub fn num_folds(&self) -> usize {
        match self.scheme {
            PartitionScheme::KFold(k) => k,
            _ => 1,
        }
    }

    pub fn fold(&self, fold: usize) -> PartitionKey {
        PartitionKey {
            family: self.clone(),
            fold,
        }
    }
}

impl fmt::Display for PartitionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family, self.fold)
    }
}

impl FromStr for PartitionKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::data(format!("bad partition key '{s}'"));
        let (family, fold) = s.rsplit_once('_').ok_or_else(bad)?;
        let family: PartitionFamily = family.parse()?;
        let fold: usize = fold.parse().map_err(|_| bad())?;
        if fold == 0 || fold > family.num_folds() {
            return Err(bad());
        }
        Ok(PartitionKey { family, fold })
    }
}

impl PartitionKey {
    /// Ordering used by exports: toolkit, seed, fold count, fold.
    pub fn sort_key(&self) -> (String, i64, String, usize) {
        let scheme = match self.family.scheme {
            PartitionScheme::KFold(k) => format!("k{k:010}"),
            PartitionScheme::PercentSplit(p) => format!("p{p:020.6}"),
            PartitionScheme::FixedSplit => "f".to_string(),
        };
        (self.family.toolkit.clone(), self.family.seed, scheme, self.fold)
    }
}

/// Role of one instance in one fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Role {
    Test,
    /// Training weight in (0, 1].
    Train(f64),
    Filtered,
}

impl Role {
    /// Decodes the fold-table cell encoding: `?` test, `0` filtered,
    /// anything in (0, 1] a training weight.
    pub fn from_cell(cell: &str) -> Result<Role> {
        let cell = cell.trim();
        if cell == "?" {
            return Ok(Role::Test);
        }
        let w: f64 = cell
            .parse()
            .map_err(|_| Error::data(format!("bad role '{cell}'")))?;
        if w == 0.0 {
            Ok(Role::Filtered)
        } else if w > 0.0 && w <= 1.0 {
            Ok(Role::Train(w))
        } else {
            Err(Error::data(format!("training weight {w} outside (0, 1]")))
        }
    }

    /// Numeric form used in documents: `None` for test instances.
    pub fn weight(&self) -> Option<f64> {
        match *self {
            Role::Test => None,
            Role::Train(w) => Some(w),
            Role::Filtered => Some(0.0),
        }
    }

    pub fn from_weight(weight: Option<f64>) -> Result<Role> {
        match weight {
            None => Ok(Role::Test),
            Some(w) if w == 0.0 => Ok(Role::Filtered),
            Some(w) if w > 0.0 && w <= 1.0 => Ok(Role::Train(w)),
            Some(w) => Err(Error::data(format!("training weight {w} outside (0, 1]"))),
        }
    }
}

/// Per-instance roles of one fold of one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldAssignment {
    pub key: PartitionKey,
    pub roles: Vec<Role>,
}

impl FoldAssignment {
    pub fn new(key: PartitionKey, roles: Vec<Role>) -> Result<Self> {
        if key.fold == 0 || key.fold > key.family.num_folds() {
            return Err(Error::data(format!("fold index {} invalid for {}", key.fold, key.family)));
        }
        for r in &roles {
            if let Role::Train(w) = *r {
                if !(w > 0.0 && w <= 1.0) {
                    return Err(Error::data(format!("training weight {w} outside (0, 1]")));
                }
            }
        }
        Ok(FoldAssignment { key, roles })
    }

    pub fn test_instances(&self) -> impl Iterator<Item = usize> + '_ {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, Role::Test))
            .map(|(i, _)| i)
    }

    pub fn train_instances(&self) -> impl Iterator<Item = usize> + '_ {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, Role::Train(_)))
            .map(|(i, _)| i)
    }

    pub fn is_test(&self, instance: usize) -> bool {
        matches!(self.roles.get(instance), Some(Role::Test))
    }
}

/// Checks that the folds of one k-fold partition are complete and that their
/// test sets cover every instance exactly once.
pub fn check_kfold_coverage(folds: &[FoldAssignment], n_instances: usize) -> Result<()> {
    let Some(first) = folds.first() else {
        return Err(Error::data("no folds given"));
    };
    let k = match first.key.family.scheme {
        PartitionScheme::KFold(k) => k,
        _ => return Err(Error::data(format!("{} is not a k-fold partition", first.key.family))),
    };
    let mut seen_folds = vec![false; k];
    let mut covered = vec![0usize; n_instances];
    for f in folds {
        if f.key.family != first.key.family {
            return Err(Error::data("folds belong to different partitions"));
        }
        if f.roles.len() != n_instances {
            return Err(Error::data(format!(
                "fold {} has {} roles for {} instances",
                f.key.fold,
                f.roles.len(),
                n_instances
            )));
        }
        if std::mem::replace(&mut seen_folds[f.key.fold - 1], true) {
            return Err(Error::data(format!("fold {} listed twice", f.key.fold)));
        }
        for i in f.test_instances() {
            covered[i] += 1;
        }
    }
    if let Some(missing) = seen_folds.iter().position(|s| !s) {
        return Err(Error::data(format!("fold {} of {} is missing", missing + 1, k)));
    }
    if let Some(i) = covered.iter().position(|&c| c != 1) {
        return Err(Error::data(format!(
            "instance {} is tested in {} folds (expected exactly 1)",
            i + 1,
            covered[i]
        )));
    }
    Ok(())
}

/// Predictions of one experiment on the test instances of one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub experiment: ExperimentKey,
    pub partition: PartitionKey,
    /// Instance index to predicted class index.
    pub predictions: BTreeMap<usize, usize>,
}

/// Pooled accuracy over every test-instance prediction in `sets`.
///
/// All sets must belong to the same experiment. Each set's partition must be
/// present in `partitions`, and every predicted instance must be a test
/// instance of it.
pub fn aggregate_accuracy(
    sets: &[PredictionSet],
    partitions: &[FoldAssignment],
    dataset: &Dataset,
) -> Result<f64> {
    let Some(first) = sets.first() else {
        return Err(Error::data("no predictions to aggregate"));
    };
    let n_classes = dataset.n_classes();
    let mut correct = 0usize;
    let mut total = 0usize;
    for set in sets {
        if set.experiment.id() != first.experiment.id() || set.experiment.toolkit != first.experiment.toolkit {
            return Err(Error::data("prediction sets belong to different experiments"));
        }
        let partition = partitions
            .iter()
            .find(|p| p.key == set.partition)
            .ok_or_else(|| Error::data("prediction/partition mismatch"))?;
        for (&instance, &predicted) in &set.predictions {
            if !partition.is_test(instance) || instance >= dataset.n_instances() {
                return Err(Error::data("prediction/partition mismatch"));
            }
            if predicted >= n_classes {
                return Err(Error::data(format!("predicted class {predicted} out of range")));
            }
            total += 1;
            if dataset.class_of(instance) == predicted {
                correct += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::data("no predictions to aggregate"));
    }
    Ok(correct as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tiny() -> Dataset {
        Dataset::new(
            "tiny",
            vec![
                AttributeSpec::numeric("x"),
                AttributeSpec::nominal("class", ["a", "b"]),
            ],
            1,
            vec![
                vec![Value::Numeric(0.0), Value::Nominal(0)],
                vec![Value::Numeric(1.0), Value::Nominal(0)],
                vec![Value::Numeric(2.0), Value::Nominal(1)],
                vec![Value::Numeric(3.0), Value::Nominal(1)],
            ],
        )
    }

    #[test]
    fn valid_dataset_has_no_violations() {
        assert!(validate_dataset(&tiny()).is_empty());
    }

    #[test]
    fn missing_class_label_is_reported_with_row() {
        let mut d = tiny();
        d.rows[2][1] = Value::Missing;
        let v = validate_dataset(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].row, Some(2));
        assert_eq!(v[0].attribute, Some(1));
    }

    #[test]
    fn nominal_index_out_of_range_is_reported() {
        let mut d = tiny();
        d.rows[0][1] = Value::Nominal(5);
        let v = validate_dataset(&d);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].row, v[0].attribute), (Some(0), Some(1)));
    }

    #[test]
    fn duplicate_names_and_categories_are_reported() {
        let mut d = tiny();
        d.attributes[0].name = "class".into();
        d.attributes[1] = AttributeSpec::nominal("class", ["a", "a"]);
        let v = validate_dataset(&d);
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn partition_keys_render_canonically() {
        let fam = PartitionFamily {
            toolkit: "weka".into(),
            seed: 1,
            scheme: PartitionScheme::KFold(10),
        };
        assert_eq!(fam.fold(1).to_string(), "weka_1_10_1");
        let fixed = PartitionFamily {
            toolkit: "weka".into(),
            seed: 0,
            scheme: PartitionScheme::FixedSplit,
        };
        assert_eq!(fixed.fold(1).to_string(), "weka_0_0_1");
        let split = PartitionFamily {
            toolkit: "weka".into(),
            seed: 3,
            scheme: PartitionScheme::PercentSplit(33.0),
        };
        assert_eq!(split.fold(1).to_string(), "weka_3_33%_1");
        for s in ["weka_1_10_1", "weka_0_0_1", "weka_3_33%_1", "my_kit_2_5_5"] {
            assert_eq!(s.parse::<PartitionKey>().unwrap().to_string(), s);
        }
        assert!("weka_1_10_11".parse::<PartitionKey>().is_err());
        assert!("weka_1_0_1".parse::<PartitionKey>().is_err());
        assert!("weka_0_0_2".parse::<PartitionKey>().is_err());
    }

    #[test]
    fn experiment_ids() {
        let k = ExperimentKey::new("weka", "C4.5", -1, "");
        assert_eq!(k.id(), "C4.5_-1");
        assert!(k.is_default());
        assert_eq!(ExperimentKey::parse_id("C4.5_-1").unwrap(), ("C4.5".into(), -1));
        assert_eq!(ExperimentKey::parse_id("BP_12").unwrap(), ("BP".into(), 12));
    }

    #[test]
    fn role_cells() {
        assert_eq!(Role::from_cell("?").unwrap(), Role::Test);
        assert_eq!(Role::from_cell("0").unwrap(), Role::Filtered);
        assert_eq!(Role::from_cell("0.74").unwrap(), Role::Train(0.74));
        assert_eq!(Role::from_cell("1").unwrap(), Role::Train(1.0));
        assert!(Role::from_cell("1.5").is_err());
        assert!(Role::from_cell("-0.2").is_err());
    }

    fn kfold(n: usize, k: usize) -> Vec<FoldAssignment> {
        let fam = PartitionFamily {
            toolkit: "t".into(),
            seed: 1,
            scheme: PartitionScheme::KFold(k),
        };
        (1..=k)
            .map(|f| {
                let roles = (0..n)
                    .map(|i| if i % k == f - 1 { Role::Test } else { Role::Train(1.0) })
                    .collect();
                FoldAssignment::new(fam.fold(f), roles).unwrap()
            })
            .collect()
    }

    #[test]
    fn kfold_coverage_counts_every_instance_once() {
        let folds = kfold(23, 10);
        check_kfold_coverage(&folds, 23).unwrap();
        let mut tests = [0; 23];
        for f in &folds {
            for i in f.test_instances() {
                tests[i] += 1;
            }
        }
        assert!(tests.iter().all(|&t| t == 1));
        assert!(check_kfold_coverage(&folds[..9], 23).is_err());
        let mut broken = folds.clone();
        broken[0].roles[0] = Role::Train(1.0);
        assert!(check_kfold_coverage(&broken, 23).is_err());
    }

    fn iris_like_predictions(n: usize, wrong: usize) -> (Dataset, Vec<FoldAssignment>, Vec<PredictionSet>) {
        let rows = (0..n)
            .map(|i| vec![Value::Numeric(i as f64), Value::Nominal(i % 3)])
            .collect();
        let d = Dataset::new(
            "iris",
            vec![AttributeSpec::numeric("x"), AttributeSpec::nominal("class", ["a", "b", "c"])],
            1,
            rows,
        );
        let folds = kfold(n, 10);
        let key = ExperimentKey::new("weka", "BP", 1, "");
        let mut budget = wrong;
        let sets = folds
            .iter()
            .map(|f| {
                let predictions = f
                    .test_instances()
                    .map(|i| {
                        let c = d.class_of(i);
                        if budget > 0 {
                            budget -= 1;
                            (i, (c + 1) % 3)
                        } else {
                            (i, c)
                        }
                    })
                    .collect();
                PredictionSet {
                    experiment: key.clone(),
                    partition: f.key.clone(),
                    predictions,
                }
            })
            .collect();
        (d, folds, sets)
    }

    #[test]
    fn accuracy_all_correct_is_one() {
        let (d, folds, sets) = iris_like_predictions(150, 0);
        assert_eq!(aggregate_accuracy(&sets, &folds, &d).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_pooled_over_folds() {
        let (d, folds, mut sets) = iris_like_predictions(150, 5);
        // 145 of 150 by construction
        let acc = aggregate_accuracy(&sets, &folds, &d).unwrap();
        assert!((acc - 145.0 / 150.0).abs() < 1e-12);
        assert!((acc - 0.9667).abs() < 1e-4);
        sets.reverse();
        assert_eq!(aggregate_accuracy(&sets, &folds, &d).unwrap(), acc);
    }

    #[test]
    fn accuracy_errors() {
        let (d, folds, mut sets) = iris_like_predictions(30, 0);
        let err = aggregate_accuracy(&[], &folds, &d).unwrap_err();
        assert_eq!(err.to_string(), "no predictions to aggregate");
        // instance 1 is a training instance of fold 1
        sets[0].predictions.insert(1, 0);
        let err = aggregate_accuracy(&sets, &folds, &d).unwrap_err();
        assert_eq!(err.to_string(), "prediction/partition mismatch");
    }
}
