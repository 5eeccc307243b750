//! Built-in experiments: cross-validate a simple learner and store its
//! predictions exactly as an ingested external run would be.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::{ingest_run_file, IngestSummary, RunFile};
use crate::learners::{
    fit_lda, information_gain, stratified_folds, train_tree, Classifier, NearestNeighbor, Stump,
};
use crate::model::{Dataset, ExperimentKey, FoldAssignment, PartitionFamily, PartitionScheme, PredictionSet, Role};
use crate::store::{load_dataset, Store};

pub const BUILTIN_TOOLKIT: &str = "builtin";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinLearner {
    /// Decision stump on the highest-gain attribute of the training data.
    Stump,
    NearestNeighbor,
    Lda,
    /// Pruned gain-ratio tree.
    Tree,
}

impl BuiltinLearner {
    pub const ALL: [BuiltinLearner; 4] = [
        BuiltinLearner::Stump,
        BuiltinLearner::NearestNeighbor,
        BuiltinLearner::Lda,
        BuiltinLearner::Tree,
    ];

    /// Algorithm name used in experiment ids.
    pub fn algorithm(self) -> &'static str {
        match self {
            BuiltinLearner::Stump => "Stump",
            BuiltinLearner::NearestNeighbor => "1NN",
            BuiltinLearner::Lda => "LDA",
            BuiltinLearner::Tree => "C4.5",
        }
    }

    /// Verbatim hyperparameter string recorded with the experiment.
    pub fn hyperparameters(self) -> &'static str {
        match self {
            BuiltinLearner::Stump => "stump",
            BuiltinLearner::NearestNeighbor => "knn -K 1",
            BuiltinLearner::Lda => "lda -R 1e-6",
            BuiltinLearner::Tree => "tree -C 0.25 -M 2",
        }
    }

    /// Default settings, so the hyperparameter seed is -1.
    pub fn experiment_key(self) -> ExperimentKey {
        ExperimentKey::new(BUILTIN_TOOLKIT, self.algorithm(), -1, self.hyperparameters())
    }

    pub fn fit(self, train: &Dataset) -> Result<Box<dyn Classifier>> {
        Ok(match self {
            BuiltinLearner::Stump => {
                let mut best: Option<(usize, f64)> = None;
                for a in train.feature_indices() {
                    if let Some(g) = information_gain(train, a) {
                        if best.is_none_or(|(_, bg)| g > bg) {
                            best = Some((a, g));
                        }
                    }
                }
                let (attr, _) = best.ok_or_else(|| Error::data("no attribute has observed values"))?;
                Box::new(Stump::fit(train, attr))
            }
            BuiltinLearner::NearestNeighbor => Box::new(NearestNeighbor::fit(train)?),
            BuiltinLearner::Lda => Box::new(fit_lda(train)?),
            BuiltinLearner::Tree => Box::new(train_tree(train, true)),
        })
    }
}

impl fmt::Display for BuiltinLearner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuiltinLearner::Stump => "stump",
            BuiltinLearner::NearestNeighbor => "1nn",
            BuiltinLearner::Lda => "lda",
            BuiltinLearner::Tree => "tree",
        })
    }
}

impl FromStr for BuiltinLearner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinLearner::ALL
            .into_iter()
            .find(|l| l.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::data(format!("unknown learner '{s}' (expected stump, 1nn, lda or tree)")))
    }
}

/// Stratified k-fold run of `learner` with partition seed `seed`.
pub fn cross_validation_run(dataset: &Dataset, learner: BuiltinLearner, seed: u64, folds: usize) -> Result<RunFile> {
    let n = dataset.n_instances();
    if folds < 2 || folds > n {
        return Err(Error::data(format!("fold count must be between 2 and {n}")));
    }
    let family = PartitionFamily {
        toolkit: BUILTIN_TOOLKIT.to_string(),
        seed: i64::try_from(seed).map_err(|_| Error::data("seed out of range"))?,
        scheme: PartitionScheme::KFold(folds),
    };
    let experiment = learner.experiment_key();
    let assignment = stratified_folds(&dataset.labels(), folds, seed);
    let mut assignments = Vec::with_capacity(folds);
    let mut predictions = Vec::with_capacity(folds);
    for f in 0..folds {
        let train: Vec<usize> = (0..n).filter(|&i| assignment[i] != f).collect();
        let model = learner.fit(&dataset.subset(&train))?;
        let roles = (0..n)
            .map(|i| if assignment[i] == f { Role::Test } else { Role::Train(1.0) })
            .collect();
        let key = family.fold(f + 1);
        assignments.push(FoldAssignment::new(key.clone(), roles)?);
        predictions.push(PredictionSet {
            experiment: experiment.clone(),
            partition: key,
            predictions: (0..n)
                .filter(|&i| assignment[i] == f)
                .map(|i| (i, model.predict(&dataset.rows[i])))
                .collect(),
        });
    }
    Ok(RunFile {
        experiment,
        family,
        folds: assignments,
        predictions,
    })
}

/// Runs `learner` on a registered dataset once per seed and ingests each run.
pub fn run_builtin(
    store: &Store,
    dataset_name: &str,
    learner: BuiltinLearner,
    seeds: &[u64],
    folds: usize,
    force: bool,
) -> Result<Vec<IngestSummary>> {
    let dataset = load_dataset(store, dataset_name)?;
    seeds
        .iter()
        .map(|&seed| {
            let run = cross_validation_run(&dataset, learner, seed, folds)?;
            ingest_run_file(store, dataset_name, &run.render(&dataset), force)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::put_dataset;

    #[test]
    fn learner_names_parse() {
        for l in BuiltinLearner::ALL {
            assert_eq!(l.to_string().parse::<BuiltinLearner>().unwrap(), l);
        }
        assert!("svm".parse::<BuiltinLearner>().is_err());
    }

    #[test]
    fn runs_are_stored_like_ingested_files() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let pts: Vec<(f64, usize)> = (0..12).map(|i| (i as f64, usize::from(i >= 6))).collect();
        let d = crate::learners::testutil::one_numeric(&pts, 2);
        put_dataset(&store, &d, false).unwrap();
        let s = run_builtin(&store, "points", BuiltinLearner::Tree, &[1, 2], 3, false).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].predictions, 12);
        let keys = store.keys("points").unwrap();
        assert!(keys.contains(&"C4.5_-1/builtin_2_3_3".to_string()), "{keys:?}");
        let again = run_builtin(&store, "points", BuiltinLearner::Tree, &[1, 2], 3, false).unwrap();
        assert!(again.iter().all(|s| s.written == 0));
    }
}
