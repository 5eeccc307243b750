//! Meta-data set exports as ARFF tables.

use std::collections::{BTreeMap, BTreeSet};

use crate::arff::{write_meta_table, Cell};
use crate::error::{Error, Result};
use crate::metafeatures::FEATURE_NAMES;
use crate::model::{aggregate_accuracy, ExperimentKey, PredictionSet};
use crate::store::{
    get_dataset_metafeatures, get_instance_metafeatures, list_algorithms, list_datasets, list_experiments,
    list_fold_assignments, load_dataset, parameter_map, Store,
};

/// Decimal places of exported accuracies (percent).
pub const ACCURACY_DECIMALS: usize = 2;

fn table(headers: Vec<String>, rows: Vec<Vec<Cell>>, relation: &str) -> Result<String> {
    Ok(write_meta_table(&headers, &rows, relation)?)
}

fn percent(acc: f64) -> Cell {
    Cell::Fixed {
        value: acc * 100.0,
        decimals: ACCURACY_DECIMALS,
    }
}

fn parameter_cell(value: Option<String>) -> Cell {
    match value {
        None => Cell::Missing,
        Some(v) => v.parse::<f64>().map_or(Cell::Text(v), Cell::Number),
    }
}

/// Every registered algorithm/hyperparameter setting.
pub fn export_algorithm_table(store: &Store) -> Result<String> {
    let rows = list_algorithms(store)?
        .into_iter()
        .map(|k| vec![Cell::Text(k.id()), Cell::Text(k.toolkit), Cell::Text(k.hyperparameters)])
        .collect();
    table(
        vec!["LA_seed".into(), "Toolkit".into(), "Hyperparameters".into()],
        rows,
        "algorithms",
    )
}

/// Command-line flag per toolkit for each of the algorithm's parameters.
pub fn export_hyperparameter_mapping(store: &Store, algorithm: &str) -> Result<String> {
    let map = parameter_map(store, algorithm)?
        .ok_or_else(|| Error::NotFound(format!("parameter map for algorithm '{algorithm}'")))?;
    let mut headers = vec!["toolkit".to_string()];
    headers.extend(map.parameters.iter().cloned());
    let rows = map
        .toolkits
        .iter()
        .map(|(toolkit, flags)| {
            let mut row = vec![Cell::Text(toolkit.clone())];
            row.extend((0..map.parameters.len()).map(|p| {
                flags
                    .get(p)
                    .cloned()
                    .flatten()
                    .map_or(Cell::Missing, Cell::Text)
            }));
            row
        })
        .collect();
    table(headers, rows, &format!("{algorithm}-parameters"))
}

/// Role of every instance in every stored fold of a dataset.
pub fn export_fold_table(store: &Store, dataset: &str) -> Result<String> {
    let d = load_dataset(store, dataset)?;
    let mut headers = vec!["partition".to_string()];
    headers.extend((1..=d.n_instances()).map(|i| i.to_string()));
    let rows = list_fold_assignments(store, dataset)?
        .into_iter()
        .map(|f| {
            let mut row = vec![Cell::Text(f.key.to_string())];
            row.extend(f.roles.iter().map(|r| Cell::from_option(r.weight())));
            row
        })
        .collect();
    table(headers, rows, &format!("{dataset}-folds"))
}

/// Pooled accuracy of every experiment stored for `dataset`, keyed by
/// experiment id.
pub fn experiment_accuracies(store: &Store, dataset: &str) -> Result<BTreeMap<String, (ExperimentKey, f64)>> {
    let d = load_dataset(store, dataset)?;
    let folds = list_fold_assignments(store, dataset)?;
    let mut out = BTreeMap::new();
    for (key, sets) in list_experiments(store, dataset)? {
        let acc = aggregate_accuracy(&sets, &folds, &d)?;
        out.insert(key.id(), (key, acc));
    }
    Ok(out)
}

fn prediction_column(key: &ExperimentKey, set: &PredictionSet) -> (String, i64, i64, String) {
    let (alg, seed) = key.sort_key();
    let seed_p = set.partition.family.seed;
    (alg, seed, seed_p, format!("{}/{}", key.id(), seed_p))
}

/// Instance meta-features, actual class and every experiment's prediction
/// per instance. Prediction columns are named `LA_seed/partitionSeed`.
pub fn export_instance_level(store: &Store, dataset: &str) -> Result<String> {
    let d = load_dataset(store, dataset)?;
    let mf = get_instance_metafeatures(store, dataset)?.ok_or_else(|| Error::data("no meta-features stored"))?;
    // (alg, seed, partition seed, name) -> instance -> predicted class
    let mut columns: BTreeMap<(String, i64, i64, String), BTreeMap<usize, usize>> = BTreeMap::new();
    for (key, sets) in list_experiments(store, dataset)? {
        for set in &sets {
            let col = columns.entry(prediction_column(&key, set)).or_default();
            for (&i, &p) in &set.predictions {
                col.entry(i).or_insert(p);
            }
        }
    }
    let mut headers = vec!["#".to_string()];
    headers.extend(mf.measures.iter().cloned());
    headers.push("act".into());
    headers.extend(columns.keys().map(|c| c.3.clone()));
    let rows = (0..d.n_instances())
        .map(|i| {
            let mut row = vec![Cell::Number((i + 1) as f64)];
            match mf.instances.get(&i) {
                Some(values) => row.extend(values.iter().map(|&v| Cell::from_option(v))),
                None => row.extend(mf.measures.iter().map(|_| Cell::Missing)),
            }
            row.push(Cell::Number((d.class_of(i) + 1) as f64));
            row.extend(
                columns
                    .values()
                    .map(|col| col.get(&i).map_or(Cell::Missing, |&p| Cell::Number((p + 1) as f64))),
            );
            row
        })
        .collect();
    table(headers, rows, &format!("{dataset}-instances"))
}

/// Meta-feature column names across the given documents: the standard
/// names in their fixed order, then any others sorted.
fn feature_columns<'a>(docs: impl Iterator<Item = &'a BTreeMap<String, Option<f64>>>) -> Vec<String> {
    let present: BTreeSet<&String> = docs.flat_map(|d| d.keys()).collect();
    let mut out: Vec<String> = FEATURE_NAMES
        .iter()
        .filter(|n| present.iter().any(|p| p == n))
        .map(|n| n.to_string())
        .collect();
    out.extend(
        present
            .into_iter()
            .filter(|p| !FEATURE_NAMES.contains(&p.as_str()))
            .cloned(),
    );
    out
}

fn feature_cells(columns: &[String], values: Option<&BTreeMap<String, Option<f64>>>) -> Vec<Cell> {
    columns
        .iter()
        .map(|c| Cell::from_option(values.and_then(|v| v.get(c).copied().flatten())))
        .collect()
}

/// One row per dataset with stored meta-features: the meta-features, then
/// the accuracy (percent) of every experiment.
pub fn export_dataset_level(store: &Store) -> Result<String> {
    let mut entries = Vec::new();
    for name in list_datasets(store)? {
        if let Some(mf) = get_dataset_metafeatures(store, &name)? {
            let acc = experiment_accuracies(store, &name)?;
            entries.push((name, mf, acc));
        }
    }
    if entries.is_empty() {
        return Err(Error::data("no meta-features stored"));
    }
    let features = feature_columns(entries.iter().map(|e| &e.1));
    let mut experiments: BTreeMap<(String, i64), String> = BTreeMap::new();
    for (_, _, acc) in &entries {
        for (id, (key, _)) in acc {
            experiments.insert(key.sort_key(), id.clone());
        }
    }
    let mut headers = vec!["dataset".to_string()];
    headers.extend(features.iter().cloned());
    headers.extend(experiments.values().cloned());
    let rows = entries
        .iter()
        .map(|(name, mf, acc)| {
            let mut row = vec![Cell::Text(name.clone())];
            row.extend(feature_cells(&features, Some(mf)));
            row.extend(
                experiments
                    .values()
                    .map(|id| acc.get(id).map_or(Cell::Missing, |(_, a)| percent(*a))),
            );
            row
        })
        .collect();
    table(headers, rows, "datasets")
}

/// One row per (dataset, toolkit, hyperparameter setting) of `algorithm`:
/// dataset meta-features, toolkit, parameter values and accuracy.
pub fn export_per_algorithm(store: &Store, algorithm: &str) -> Result<String> {
    let map = parameter_map(store, algorithm)?;
    let known = map.is_some() || list_algorithms(store)?.iter().any(|k| k.algorithm == algorithm);
    if !known {
        return Err(Error::NotFound(format!("algorithm '{algorithm}'")));
    }
    let parameters = map.as_ref().map_or(Vec::new(), |m| m.parameters.clone());
    let mut entries = Vec::new();
    for name in list_datasets(store)? {
        let mf = get_dataset_metafeatures(store, &name)?;
        let mut runs: Vec<(ExperimentKey, f64)> = experiment_accuracies(store, &name)?
            .into_values()
            .filter(|(k, _)| k.algorithm == algorithm)
            .collect();
        runs.sort_by(|a, b| {
            (&a.0.toolkit, a.0.hyperparameter_seed).cmp(&(&b.0.toolkit, b.0.hyperparameter_seed))
        });
        for (key, acc) in runs {
            entries.push((name.clone(), mf.clone(), key, acc));
        }
    }
    let features = feature_columns(entries.iter().filter_map(|e| e.1.as_ref()));
    let mut headers = vec!["dataset".to_string()];
    headers.extend(features.iter().cloned());
    headers.push("toolkit".into());
    headers.extend(parameters.iter().cloned());
    headers.push("acc".into());
    let rows = entries
        .into_iter()
        .map(|(name, mf, key, acc)| {
            let mut row = vec![Cell::Text(name)];
            row.extend(feature_cells(&features, mf.as_ref()));
            row.push(Cell::Text(key.toolkit.clone()));
            let values = map
                .as_ref()
                .map_or(Vec::new(), |m| m.normalize(&key.toolkit, &key.hyperparameters));
            row.extend(values.into_iter().map(parameter_cell));
            row.push(percent(acc));
            row
        })
        .collect();
    table(headers, rows, algorithm)
}
