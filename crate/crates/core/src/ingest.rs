//! Run files: the text format external toolkits use to hand results over.
//!
//! ```text
//! weka<TAB>BP<TAB>1<TAB>-L 0.3 -M 0.2 -H 12     toolkit, algorithm, seed, hyperparameters
//! weka_1_10                                     partition (toolkit_seed_numFolds)
//! 1,1,1                                         fold, instance, role[, prediction]
//! 1,2,?,Iris-setosa
//! ```
//!
//! Every fold lists every instance once. The role is `?` for a test
//! instance, `0` for a filtered one, otherwise a training weight in (0, 1].
//! Test instances carry the predicted class name. Instances and folds are
//! 1-based. Blank lines and lines starting with `%` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{
    check_kfold_coverage, Dataset, ExperimentKey, FoldAssignment, PartitionFamily, PartitionScheme, PredictionSet,
    Role,
};
use crate::store::{
    algorithm_document, experiment_document, fold_assignment_document, get_algorithm, load_dataset, parameter_map,
    Store,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RunFile {
    pub experiment: ExperimentKey,
    pub family: PartitionFamily,
    /// One assignment per fold, in fold order.
    pub folds: Vec<FoldAssignment>,
    /// Predictions per fold, aligned with `folds`.
    pub predictions: Vec<PredictionSet>,
}

fn parse_header(line: &str) -> Result<ExperimentKey> {
    let bad = |why: &str| Error::data(format!("bad run header: {why}"));
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(bad("expected toolkit, algorithm, seed and hyperparameters separated by tabs"));
    }
    let (toolkit, algorithm) = (fields[0].trim(), fields[1].trim());
    if toolkit.is_empty() || algorithm.is_empty() {
        return Err(bad("empty toolkit or algorithm"));
    }
    let seed: i64 = fields[2]
        .trim()
        .parse()
        .map_err(|_| bad("hyperparameter seed is not an integer"))?;
    Ok(ExperimentKey::new(toolkit, algorithm, seed, fields[3].trim()))
}

impl RunFile {
    /// Parses and fully validates a run file against `dataset`.
    pub fn parse(text: &str, dataset: &Dataset) -> Result<RunFile> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let experiment = parse_header(header.trim_end_matches('\r'))?;
        let family: PartitionFamily = lines
            .next()
            .map(|(_, l)| l.trim())
            .ok_or_else(|| Error::data("run file lacks a partition line"))?
            .parse()?;
        let k = family.num_folds();
        let n = dataset.n_instances();
        let classes = dataset.class_names();

        let mut roles: Vec<Vec<Option<Role>>> = vec![vec![None; n]; k];
        let mut predictions: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); k];
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = line.splitn(4, ',').map(str::trim).collect();
            if fields.len() < 3 {
                return Err(Error::data(format!("line {line_no}: expected fold,instance,role[,prediction]")));
            }
            let fold: usize = fields[0]
                .parse()
                .ok()
                .filter(|f| (1..=k).contains(f))
                .ok_or_else(|| Error::data(format!("line {line_no}: bad fold '{}'", fields[0])))?;
            let instance: usize = fields[1]
                .parse()
                .ok()
                .filter(|i| (1..=n).contains(i))
                .ok_or_else(|| Error::data(format!("line {line_no}: bad instance '{}'", fields[1])))?;
            let role = Role::from_cell(fields[2]).map_err(|e| Error::data(format!("line {line_no}: {e}")))?;
            let prediction = fields.get(3).copied().filter(|p| !p.is_empty());
            let i = instance - 1;
            if roles[fold - 1][i].replace(role).is_some() {
                return Err(Error::data(format!("instance {instance} listed twice in fold {fold}")));
            }
            match (role, prediction) {
                (Role::Test, Some(p)) => {
                    let class = classes
                        .iter()
                        .position(|c| c == p)
                        .ok_or_else(|| Error::data(format!("unknown class label '{p}' at line {line_no}")))?;
                    predictions[fold - 1].insert(i, class);
                }
                (Role::Test, None) => {
                    return Err(Error::data(format!("missing prediction for test instance {instance}")))
                }
                (_, Some(_)) => return Err(Error::data(format!("role conflict at instance {instance}"))),
                (_, None) => {}
            }
        }

        let mut folds = Vec::with_capacity(k);
        for (f, fold_roles) in roles.into_iter().enumerate() {
            let complete = fold_roles
                .iter()
                .enumerate()
                .map(|(i, r)| r.ok_or_else(|| Error::data(format!("fold {} does not list instance {}", f + 1, i + 1))))
                .collect::<Result<Vec<Role>>>()?;
            folds.push(FoldAssignment::new(family.fold(f + 1), complete)?);
        }
        if let PartitionScheme::KFold(_) = family.scheme {
            check_kfold_coverage(&folds, n)?;
        }
        let predictions = predictions
            .into_iter()
            .enumerate()
            .map(|(f, p)| PredictionSet {
                experiment: experiment.clone(),
                partition: family.fold(f + 1),
                predictions: p,
            })
            .collect();
        Ok(RunFile {
            experiment,
            family,
            folds,
            predictions,
        })
    }

    /// Renders the run file; `parse(render(r)) == r`.
    pub fn render(&self, dataset: &Dataset) -> String {
        let e = &self.experiment;
        let mut out = format!(
            "{}\t{}\t{}\t{}\n{}\n",
            e.toolkit, e.algorithm, e.hyperparameter_seed, e.hyperparameters, self.family
        );
        let classes = dataset.class_names();
        for (fold, preds) in self.folds.iter().zip(&self.predictions) {
            for (i, role) in fold.roles.iter().enumerate() {
                let f = fold.key.fold;
                match role.weight() {
                    None => {
                        let p = preds.predictions.get(&i).map_or("", |&c| classes[c].as_str());
                        writeln!(out, "{f},{},?,{p}", i + 1).unwrap();
                    }
                    Some(w) => writeln!(out, "{f},{},{w}", i + 1).unwrap(),
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestSummary {
    pub experiment: String,
    pub folds: usize,
    pub predictions: usize,
    /// Documents created or replaced; 0 when re-ingesting identical data.
    pub written: usize,
}

/// Validates a run file against the registered dataset and stores its
/// algorithm setting, fold assignments and per-fold predictions. Nothing is
/// written unless the whole file is valid and conflict-free.
pub fn ingest_run_file(store: &Store, dataset_name: &str, text: &str, force: bool) -> Result<IngestSummary> {
    let dataset = load_dataset(store, dataset_name)?;
    let run = RunFile::parse(text, &dataset)?;
    let mut docs = Vec::new();
    match get_algorithm(store, &run.experiment.id())? {
        Some(existing) if existing == run.experiment => {}
        Some(existing) if !force => {
            return Err(Error::Conflict(format!(
                "conflicting hyperparameter setting '{}' ({} '{}' is already stored)",
                run.experiment.id(),
                existing.toolkit,
                existing.hyperparameters
            )))
        }
        _ => {
            let map = parameter_map(store, &run.experiment.algorithm)?;
            docs.push(algorithm_document(&run.experiment, map.as_ref()));
        }
    }
    for (fold, preds) in run.folds.iter().zip(&run.predictions) {
        docs.push(fold_assignment_document(dataset_name, fold));
        docs.push(experiment_document(dataset_name, fold, preds)?);
    }
    let outcomes = store.put_batch(&docs, force)?;
    Ok(IngestSummary {
        experiment: run.experiment.id(),
        folds: run.folds.len(),
        predictions: run.predictions.iter().map(|p| p.predictions.len()).sum(),
        written: outcomes
            .iter()
            .filter(|o| **o != crate::store::PutOutcome::Unchanged)
            .count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::put_dataset;

    fn dataset() -> Dataset {
        crate::learners::testutil::one_numeric(&[(0.0, 0), (1.0, 1), (2.0, 0), (3.0, 1)], 2)
    }

    const RUN: &str = "weka\tBP\t1\t-L 0.3 -M 0.2\nweka_1_2\n\
        1,1,?,c0\n1,2,?,c0\n1,3,1\n1,4,0.74\n\
        % second fold\n\
        2,1,1\n2,2,1\n2,3,?,c0\n2,4,?,c1\n";

    #[test]
    fn parse_and_render_round_trip() {
        let d = dataset();
        let run = RunFile::parse(RUN, &d).unwrap();
        assert_eq!(run.folds.len(), 2);
        assert_eq!(run.folds[0].roles[3], Role::Train(0.74));
        assert_eq!(run.predictions[1].predictions, [(2, 0), (3, 1)].into_iter().collect());
        assert_eq!(RunFile::parse(&run.render(&d), &d).unwrap(), run);
    }

    #[test]
    fn documented_errors() {
        let d = dataset();
        let err = |t: &str| RunFile::parse(t, &d).unwrap_err().to_string();
        assert!(err("weka BP 1\nweka_1_2\n").starts_with("bad run header"));
        assert_eq!(err(&RUN.replace("1,3,1", "1,3,1,c0")), "role conflict at instance 3");
        assert!(err(&RUN.replace("2,4,?,c1", "2,4,?,c9")).starts_with("unknown class label 'c9'"));
        assert!(err(&RUN.replace("1,4,0.74\n", "")).contains("does not list instance 4"));
        // instance 1 tested twice, instance 3 never
        assert!(err(&RUN.replace("2,1,1", "2,1,?,c0").replace("2,3,?,c0", "2,3,1")).contains("instance 1"));
    }

    #[test]
    fn ingest_is_atomic_and_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        put_dataset(&store, &dataset(), false).unwrap();
        let broken = RUN.replace("2,4,?,c1\n", "");
        assert!(ingest_run_file(&store, "points", &broken, false).is_err());
        assert_eq!(store.keys("points").unwrap(), ["dataset"]);
        assert!(store.keys("hyperparameters").unwrap().is_empty());

        let s = ingest_run_file(&store, "points", RUN, false).unwrap();
        assert_eq!((s.folds, s.predictions, s.written), (2, 4, 5));
        let again = ingest_run_file(&store, "points", RUN, false).unwrap();
        assert_eq!(again.written, 0);
        assert_eq!(
            store.keys("points").unwrap(),
            ["BP_1/weka_1_2_1", "BP_1/weka_1_2_2", "dataset"]
        );
    }
}
