//! Typed documents on top of the raw store.
//!
//! Collections:
//! - `<dataset>`: keys `dataset`, `meta features`, `instance meta features`
//!   and one experiment document per fold, keyed `<LA_seed>/<fold key>`.
//! - `training sets/<dataset>`: fold assignments keyed by fold key.
//! - `hyperparameters`: one document per `LA_seed`.
//! - `parameter maps`: cross-toolkit parameter flags per algorithm.
//!
//! Instance numbers and class values are 1-based in documents.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};

use super::{Document, PutOutcome, Store};
use crate::arff::{parse_arff_with_class, write_arff};
use crate::error::{Error, Result};
use crate::metafeatures::DatasetMetaFeatures;
use crate::model::{Dataset, ExperimentKey, FoldAssignment, PartitionKey, PredictionSet, Role};

pub const DATASET_KEY: &str = "dataset";
pub const META_FEATURES_KEY: &str = "meta features";
pub const INSTANCE_META_FEATURES_KEY: &str = "instance meta features";
pub const HYPERPARAMETERS: &str = "hyperparameters";
pub const PARAMETER_MAPS: &str = "parameter maps";
const TRAINING_SETS_PREFIX: &str = "training sets/";

pub fn training_sets_collection(dataset: &str) -> String {
    format!("{TRAINING_SETS_PREFIX}{dataset}")
}

fn check_dataset_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains('/') || name == HYPERPARAMETERS || name == PARAMETER_MAPS {
        return Err(Error::data(format!("'{name}' cannot be used as a dataset name")));
    }
    Ok(())
}

/// Stores a dataset as canonical ARFF in its own collection.
pub fn put_dataset(store: &Store, dataset: &Dataset, force: bool) -> Result<PutOutcome> {
    check_dataset_name(&dataset.name)?;
    dataset.require_measurable()?;
    let body = json!({
        "arff": write_arff(dataset),
        "class": dataset.attributes[dataset.class_index].name,
        "name": dataset.name,
    });
    store.put(&Document::new(&dataset.name, DATASET_KEY, body), force)
}

pub fn load_dataset(store: &Store, name: &str) -> Result<Dataset> {
    let doc = store
        .get(name, DATASET_KEY)?
        .ok_or_else(|| Error::NotFound(format!("dataset '{name}'")))?;
    let arff = doc.body["arff"]
        .as_str()
        .ok_or_else(|| Error::data("dataset document lacks ARFF text"))?;
    let class = doc.body["class"].as_str();
    let mut d = parse_arff_with_class(arff, class)?;
    d.name = name.to_string();
    Ok(d)
}

/// Names of every registered dataset, sorted.
pub fn list_datasets(store: &Store) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for c in store.collections()? {
        if !c.starts_with(TRAINING_SETS_PREFIX) && store.get(&c, DATASET_KEY)?.is_some() {
            out.push(c);
        }
    }
    Ok(out)
}

pub fn fold_assignment_document(dataset: &str, fold: &FoldAssignment) -> Document {
    let roles: Vec<Json> = fold.roles.iter().map(|r| r.weight().map_or(Json::Null, |w| json!(w))).collect();
    Document::new(
        training_sets_collection(dataset),
        fold.key.to_string(),
        json!({ "key": fold.key.to_string(), "roles": roles }),
    )
}

fn fold_from_document(doc: &Document) -> Result<FoldAssignment> {
    let key: PartitionKey = doc.key.parse()?;
    let roles = doc.body["roles"]
        .as_array()
        .ok_or_else(|| Error::data(format!("fold assignment '{}' lacks roles", doc.key)))?
        .iter()
        .map(|v| match v {
            Json::Null => Ok(Role::Test),
            v => Role::from_weight(Some(
                v.as_f64().ok_or_else(|| Error::data("fold role is not a number"))?,
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    FoldAssignment::new(key, roles)
}

pub fn put_fold_assignment(store: &Store, dataset: &str, fold: &FoldAssignment, force: bool) -> Result<PutOutcome> {
    store.put(&fold_assignment_document(dataset, fold), force)
}

pub fn get_fold_assignment(store: &Store, dataset: &str, key: &PartitionKey) -> Result<Option<FoldAssignment>> {
    store
        .get(&training_sets_collection(dataset), &key.to_string())?
        .map(|d| fold_from_document(&d))
        .transpose()
}

/// Every stored fold assignment of a dataset, sorted by partition.
pub fn list_fold_assignments(store: &Store, dataset: &str) -> Result<Vec<FoldAssignment>> {
    let mut folds = store
        .query(&training_sets_collection(dataset), "", None)?
        .iter()
        .map(fold_from_document)
        .collect::<Result<Vec<_>>>()?;
    folds.sort_by_key(|f| f.key.sort_key());
    Ok(folds)
}

pub fn experiment_document_key(experiment: &ExperimentKey, partition: &PartitionKey) -> String {
    format!("{}/{}", experiment.id(), partition)
}

/// Builds the experiment document for one fold after checking the
/// predictions against the fold's roles.
pub fn experiment_document(dataset: &str, fold: &FoldAssignment, predictions: &PredictionSet) -> Result<Document> {
    if predictions.partition != fold.key {
        return Err(Error::data("prediction/partition mismatch"));
    }
    let mut per_instance = Map::new();
    for (&i, &p) in &predictions.predictions {
        if !fold.is_test(i) {
            return Err(Error::data(format!("role conflict at instance {}", i + 1)));
        }
        per_instance.insert((i + 1).to_string(), json!(p + 1));
    }
    let e = &predictions.experiment;
    let body = json!({
        "algorithm": e.algorithm,
        "experiment": e.id(),
        "folds": { fold.key.fold.to_string(): per_instance },
        "hyperparameter_seed": e.hyperparameter_seed,
        "hyperparameters": e.hyperparameters,
        "partition": {
            "collection": training_sets_collection(dataset),
            "key": fold.key.to_string(),
        },
        "partition_seed": fold.key.family.seed,
        "toolkit": e.toolkit,
    });
    Ok(Document::new(dataset, experiment_document_key(e, &fold.key), body))
}

/// Stores the predictions of one fold. The fold assignment must already be
/// stored and match `fold`.
pub fn put_experiment(
    store: &Store,
    dataset: &str,
    fold: &FoldAssignment,
    predictions: &PredictionSet,
    force: bool,
) -> Result<PutOutcome> {
    match get_fold_assignment(store, dataset, &fold.key)? {
        Some(stored) if stored == *fold => {}
        Some(_) => return Err(Error::data(format!("partition '{}' differs from the stored one", fold.key))),
        None => return Err(Error::data(format!("dangling partition reference '{}'", fold.key))),
    }
    let doc = experiment_document(dataset, fold, predictions)?;
    store.put(&doc, force).map_err(|e| match e {
        Error::Conflict(_) => Error::Conflict(format!("conflicting experiment '{}'", doc.key)),
        e => e,
    })
}

fn experiment_from_document(doc: &Document) -> Result<PredictionSet> {
    let b = &doc.body;
    let bad = || Error::data(format!("malformed experiment document '{}'", doc.key));
    let experiment = ExperimentKey::new(
        b["toolkit"].as_str().ok_or_else(bad)?,
        b["algorithm"].as_str().ok_or_else(bad)?,
        b["hyperparameter_seed"].as_i64().ok_or_else(bad)?,
        b["hyperparameters"].as_str().ok_or_else(bad)?,
    );
    let partition: PartitionKey = b["partition"]["key"].as_str().ok_or_else(bad)?.parse()?;
    let folds = b["folds"].as_object().ok_or_else(bad)?;
    let mut predictions = BTreeMap::new();
    for per_instance in folds.values() {
        for (i, p) in per_instance.as_object().ok_or_else(bad)? {
            let i: usize = i.parse().map_err(|_| bad())?;
            let p = p.as_u64().ok_or_else(bad)? as usize;
            if i == 0 || p == 0 {
                return Err(bad());
            }
            predictions.insert(i - 1, p - 1);
        }
    }
    Ok(PredictionSet {
        experiment,
        partition,
        predictions,
    })
}

/// Every stored prediction set of a dataset, grouped by experiment id and
/// sorted by (algorithm, seed) then partition.
pub fn list_experiments(store: &Store, dataset: &str) -> Result<Vec<(ExperimentKey, Vec<PredictionSet>)>> {
    let mut groups: BTreeMap<(String, i64, String), (ExperimentKey, Vec<PredictionSet>)> = BTreeMap::new();
    for doc in store.query(dataset, "", None)? {
        if [DATASET_KEY, META_FEATURES_KEY, INSTANCE_META_FEATURES_KEY].contains(&doc.key.as_str()) {
            continue;
        }
        let set = experiment_from_document(&doc)?;
        let (alg, seed) = set.experiment.sort_key();
        groups
            .entry((alg, seed, set.experiment.toolkit.clone()))
            .or_insert_with(|| (set.experiment.clone(), Vec::new()))
            .1
            .push(set);
    }
    Ok(groups
        .into_values()
        .map(|(k, mut sets)| {
            sets.sort_by_key(|s| s.partition.sort_key());
            (k, sets)
        })
        .collect())
}

/// Flags each toolkit uses for the algorithm's named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterMap {
    pub algorithm: String,
    pub parameters: Vec<String>,
    /// Per toolkit, one flag per parameter; `None` where the toolkit lacks it.
    pub toolkits: BTreeMap<String, Vec<Option<String>>>,
}

impl ParameterMap {
    fn new(algorithm: &str, parameters: &[&str], toolkits: &[(&str, &[Option<&str>])]) -> Self {
        ParameterMap {
            algorithm: algorithm.to_string(),
            parameters: parameters.iter().map(|p| p.to_string()).collect(),
            toolkits: toolkits
                .iter()
                .map(|(t, flags)| (t.to_string(), flags.iter().map(|f| f.map(str::to_string)).collect()))
                .collect(),
        }
    }

    /// Value of every parameter for one toolkit's hyperparameter string:
    /// the token after the flag, `1` for a flag without a value, `None` when
    /// the flag is absent or the toolkit lacks the parameter.
    pub fn normalize(&self, toolkit: &str, hyperparameters: &str) -> Vec<Option<String>> {
        let tokens: Vec<&str> = hyperparameters.split_whitespace().collect();
        let is_flag = |t: &str| t.starts_with('-') && t.parse::<f64>().is_err();
        let flags = self.toolkits.get(toolkit);
        (0..self.parameters.len())
            .map(|p| {
                let flag = flags.and_then(|f| f.get(p).cloned().flatten())?;
                let pos = tokens.iter().position(|t| *t == flag)?;
                Some(match tokens.get(pos + 1) {
                    Some(v) if !is_flag(v) => v.to_string(),
                    _ => "1".to_string(),
                })
            })
            .collect()
    }

    fn to_document(&self) -> Document {
        let toolkits: Map<String, Json> = self
            .toolkits
            .iter()
            .map(|(t, flags)| (t.clone(), json!(flags)))
            .collect();
        Document::new(
            PARAMETER_MAPS,
            &self.algorithm,
            json!({ "algorithm": self.algorithm, "parameters": self.parameters, "toolkits": toolkits }),
        )
    }

    fn from_document(doc: &Document) -> Result<Self> {
        let bad = || Error::data(format!("malformed parameter map '{}'", doc.key));
        let strings = |v: &Json| -> Result<Vec<Option<String>>> {
            v.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| Ok(x.as_str().map(str::to_string)))
                .collect()
        };
        Ok(ParameterMap {
            algorithm: doc.key.clone(),
            parameters: strings(&doc.body["parameters"])?.into_iter().map(|p| p.unwrap_or_default()).collect(),
            toolkits: doc.body["toolkits"]
                .as_object()
                .ok_or_else(bad)?
                .iter()
                .map(|(t, f)| Ok((t.clone(), strings(f)?)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Parameter maps known without any stored document.
pub fn builtin_parameter_maps() -> Vec<ParameterMap> {
    vec![
        ParameterMap::new(
            "BP",
            &["LR", "Mo", "HN", "DC", "WE"],
            &[
                ("weka", &[Some("-L"), Some("-M"), Some("-H"), Some("-D"), None]),
                (
                    "waffles",
                    &[Some("-learningrate"), Some("-momentum"), Some("-addlayer"), None, Some("-windowsepochs")],
                ),
            ],
        ),
        ParameterMap::new(
            "C4.5",
            &["CF", "MinLeaf"],
            &[("weka", &[Some("-C"), Some("-M")]), ("builtin", &[Some("-C"), Some("-M")])],
        ),
        ParameterMap::new("Stump", &[], &[("builtin", &[])]),
        ParameterMap::new("1NN", &[], &[("builtin", &[])]),
        ParameterMap::new("LDA", &[], &[("builtin", &[])]),
    ]
}

pub fn put_parameter_map(store: &Store, map: &ParameterMap, force: bool) -> Result<PutOutcome> {
    store.put(&map.to_document(), force)
}

/// The stored map for `algorithm`, falling back to the built-in one.
pub fn parameter_map(store: &Store, algorithm: &str) -> Result<Option<ParameterMap>> {
    if let Some(doc) = store.get(PARAMETER_MAPS, algorithm)? {
        return ParameterMap::from_document(&doc).map(Some);
    }
    Ok(builtin_parameter_maps().into_iter().find(|m| m.algorithm == algorithm))
}

pub fn algorithm_document(key: &ExperimentKey, map: Option<&ParameterMap>) -> Document {
    let normalized: Map<String, Json> = match map {
        Some(m) => m
            .parameters
            .iter()
            .cloned()
            .zip(m.normalize(&key.toolkit, &key.hyperparameters))
            .map(|(p, v)| (p, v.map_or(Json::Null, Json::String)))
            .collect(),
        None => Map::new(),
    };
    Document::new(
        HYPERPARAMETERS,
        key.id(),
        json!({
            "algorithm": key.algorithm,
            "defaults": key.is_default(),
            "hyperparameter_seed": key.hyperparameter_seed,
            "hyperparameters": key.hyperparameters,
            "key": key.id(),
            "normalized": normalized,
            "toolkit": key.toolkit,
        }),
    )
}

/// Registers an algorithm/hyperparameter setting. Re-registering the same
/// setting is a no-op even if the parameter map changed in between.
pub fn put_algorithm(store: &Store, key: &ExperimentKey, force: bool) -> Result<PutOutcome> {
    if let Some(existing) = get_algorithm(store, &key.id())? {
        if existing == *key {
            return Ok(PutOutcome::Unchanged);
        }
        if !force {
            return Err(Error::Conflict(format!(
                "conflicting hyperparameter setting '{}' ({} vs {})",
                key.id(),
                existing.toolkit,
                key.toolkit
            )));
        }
    }
    let map = parameter_map(store, &key.algorithm)?;
    store.put(&algorithm_document(key, map.as_ref()), true)
}

pub fn get_algorithm(store: &Store, id: &str) -> Result<Option<ExperimentKey>> {
    let Some(doc) = store.get(HYPERPARAMETERS, id)? else {
        return Ok(None);
    };
    algorithm_from_document(&doc).map(Some)
}

fn algorithm_from_document(doc: &Document) -> Result<ExperimentKey> {
    let b = &doc.body;
    let bad = || Error::data(format!("malformed hyperparameter document '{}'", doc.key));
    Ok(ExperimentKey::new(
        b["toolkit"].as_str().ok_or_else(bad)?,
        b["algorithm"].as_str().ok_or_else(bad)?,
        b["hyperparameter_seed"].as_i64().ok_or_else(bad)?,
        b["hyperparameters"].as_str().ok_or_else(bad)?,
    ))
}

/// Every registered setting, sorted by (algorithm, seed).
pub fn list_algorithms(store: &Store) -> Result<Vec<ExperimentKey>> {
    let mut out = store
        .query(HYPERPARAMETERS, "", None)?
        .iter()
        .map(algorithm_from_document)
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|k| k.sort_key());
    Ok(out)
}

fn number_or_null(v: Option<f64>) -> Json {
    v.filter(|x| x.is_finite()).map_or(Json::Null, |x| json!(x))
}

pub fn put_dataset_metafeatures(
    store: &Store,
    dataset: &str,
    features: &DatasetMetaFeatures,
    force: bool,
) -> Result<PutOutcome> {
    let values: Map<String, Json> = features
        .values()
        .into_iter()
        .map(|(k, v)| (k.to_string(), number_or_null(v)))
        .collect();
    put_dataset_metafeature_values(store, dataset, &values.into_iter().collect(), force)
}

/// Stores an arbitrary measure-name → value map as the dataset-level
/// meta-features; `null` marks an undefined value.
pub fn put_dataset_metafeature_values(
    store: &Store,
    dataset: &str,
    values: &BTreeMap<String, Json>,
    force: bool,
) -> Result<PutOutcome> {
    if store.get(dataset, DATASET_KEY)?.is_none() {
        return Err(Error::NotFound(format!("dataset '{dataset}'")));
    }
    let body: Map<String, Json> = values.clone().into_iter().collect();
    store.put(&Document::new(dataset, META_FEATURES_KEY, Json::Object(body)), force)
}

pub fn get_dataset_metafeatures(store: &Store, dataset: &str) -> Result<Option<BTreeMap<String, Option<f64>>>> {
    let Some(doc) = store.get(dataset, META_FEATURES_KEY)? else {
        return Ok(None);
    };
    let obj = doc
        .body
        .as_object()
        .ok_or_else(|| Error::data("meta-feature document is not an object"))?;
    Ok(Some(obj.iter().map(|(k, v)| (k.clone(), v.as_f64())).collect()))
}

/// Instance-level meta-features: measure names plus one value vector per
/// instance (0-based here, 1-based in the document).
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMetaFeatures {
    pub measures: Vec<String>,
    pub instances: BTreeMap<usize, Vec<Option<f64>>>,
}

pub fn put_instance_metafeatures(
    store: &Store,
    dataset: &str,
    features: &InstanceMetaFeatures,
    force: bool,
) -> Result<PutOutcome> {
    let d = load_dataset(store, dataset)?;
    let mut instances = Map::new();
    for (&i, values) in &features.instances {
        if i >= d.n_instances() {
            return Err(Error::data(format!(
                "instance {} beyond dataset size {}",
                i + 1,
                d.n_instances()
            )));
        }
        if values.len() != features.measures.len() {
            return Err(Error::data(format!(
                "instance {} has {} values for {} measures",
                i + 1,
                values.len(),
                features.measures.len()
            )));
        }
        instances.insert(
            (i + 1).to_string(),
            Json::Array(values.iter().map(|&v| number_or_null(v)).collect()),
        );
    }
    let body = json!({ "instances": instances, "measures": features.measures });
    store.put(&Document::new(dataset, INSTANCE_META_FEATURES_KEY, body), force)
}

pub fn get_instance_metafeatures(store: &Store, dataset: &str) -> Result<Option<InstanceMetaFeatures>> {
    let Some(doc) = store.get(dataset, INSTANCE_META_FEATURES_KEY)? else {
        return Ok(None);
    };
    let bad = || Error::data("malformed instance meta-feature document");
    let measures = doc.body["measures"]
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|m| m.as_str().map(str::to_string).ok_or_else(bad))
        .collect::<Result<Vec<_>>>()?;
    let mut instances = BTreeMap::new();
    for (i, values) in doc.body["instances"].as_object().ok_or_else(bad)? {
        let i: usize = i.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        let values = values.as_array().ok_or_else(bad)?.iter().map(Json::as_f64).collect();
        instances.insert(i - 1, values);
    }
    Ok(Some(InstanceMetaFeatures { measures, instances }))
}
