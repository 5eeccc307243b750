use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use metarepo::arff::parse_arff_with_class;
use metarepo::export::{
    export_algorithm_table, export_dataset_level, export_fold_table, export_hyperparameter_mapping,
    export_instance_level, export_per_algorithm,
};
use metarepo::hardness::{compute_hardness, to_instance_metafeatures, DEFAULT_K};
use metarepo::ingest::ingest_run_file;
use metarepo::metafeatures::compute_all_with;
use metarepo::runner::{run_builtin, BuiltinLearner};
use metarepo::store::{
    load_dataset, put_dataset, put_dataset_metafeatures, put_instance_metafeatures, PutOutcome, Store,
};
use metarepo::{Error, Result};

#[derive(Parser)]
#[command(name = "metarepo", version, about = "Experiment results repository with meta-feature exports")]
struct Cli {
    /// Store root directory (created if missing).
    #[arg(long, global = true, default_value = "metarepo-store")]
    store: PathBuf,

    /// Replace stored documents that differ instead of failing.
    #[arg(long, global = true)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Register an ARFF dataset.
    Register {
        arff: PathBuf,
        /// Class attribute name (default: last attribute).
        #[arg(long)]
        class: Option<String>,
        /// Dataset name (default: the ARFF relation name).
        #[arg(long)]
        name: Option<String>,
    },
    /// Cross-validate built-in learners and store their predictions.
    RunBuiltin {
        dataset: String,
        /// Learners: stump, 1nn, lda, tree (comma-separated).
        #[arg(long, value_delimiter = ',', required = true)]
        learner: Vec<String>,
        /// Partition seeds, one run per seed (comma-separated).
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 10)]
        folds: usize,
    },
    /// Ingest a run file produced by an external toolkit.
    Ingest {
        runfile: PathBuf,
        #[arg(long)]
        dataset: String,
    },
    /// Compute and store meta-features (both levels unless one is chosen).
    Compute {
        dataset: String,
        /// Instance-level hardness measures only.
        #[arg(long)]
        instance: bool,
        /// Dataset-level meta-features only.
        #[arg(long = "dataset")]
        dataset_level: bool,
        /// Seed for the interpolated test sets of L3 and N4.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Neighbors used by kDN.
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        /// Cross-validation folds for the landmarkers.
        #[arg(long, default_value_t = 10)]
        folds: usize,
    },
    /// Export a meta-data table as ARFF.
    Export {
        table: Table,
        /// Dataset for the folds and instances tables.
        #[arg(long)]
        dataset: Option<String>,
        /// Algorithm for the parameters and algorithm tables.
        #[arg(long)]
        algorithm: Option<String>,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Freeze the current state as a new revision.
    Snapshot,
    /// List document keys of a collection matching a prefix.
    Query {
        collection: String,
        #[arg(default_value = "")]
        prefix: String,
        /// Read from this revision instead of the current state.
        #[arg(long)]
        revision: Option<u64>,
        /// Print whole documents instead of keys.
        #[arg(long)]
        documents: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    /// Algorithm and hyperparameter settings.
    Algorithms,
    /// Cross-toolkit parameter flags of one algorithm.
    Parameters,
    /// Training/test roles of one dataset's folds.
    Folds,
    /// Instance meta-features and predictions of one dataset.
    Instances,
    /// Dataset meta-features and accuracies.
    Datasets,
    /// Meta-features, parameters and accuracy for one algorithm.
    Algorithm,
}

fn required(value: Option<String>, flag: &str) -> Result<String> {
    value.ok_or_else(|| Error::Data(format!("this table needs --{flag}")))
}

fn outcome(o: PutOutcome) -> &'static str {
    match o {
        PutOutcome::Created => "stored",
        PutOutcome::Unchanged => "unchanged",
        PutOutcome::Replaced => "replaced",
    }
}

fn run(cli: Cli) -> Result<()> {
    let force = cli.force;
    match cli.command {
        Command::Register { arff, class, name } => {
            let text = fs::read_to_string(&arff)?;
            let mut d = parse_arff_with_class(&text, class.as_deref())?;
            if let Some(name) = name {
                d.name = name;
            }
            let store = Store::open(&cli.store)?;
            let o = put_dataset(&store, &d, force)?;
            println!(
                "{} dataset '{}': {} instances, {} attributes, {} classes",
                outcome(o),
                d.name,
                d.n_instances(),
                d.n_features(),
                d.n_classes()
            );
        }
        Command::RunBuiltin {
            dataset,
            learner,
            seeds,
            folds,
        } => {
            let learners = learner
                .iter()
                .map(|l| l.parse::<BuiltinLearner>())
                .collect::<Result<Vec<_>>>()?;
            let store = Store::open(&cli.store)?;
            for l in learners {
                for s in run_builtin(&store, &dataset, l, &seeds, folds, force)? {
                    println!(
                        "{}: {} folds, {} predictions, {} documents written",
                        s.experiment, s.folds, s.predictions, s.written
                    );
                }
            }
        }
        Command::Ingest { runfile, dataset } => {
            let text = fs::read_to_string(&runfile)?;
            let store = Store::open(&cli.store)?;
            let s = ingest_run_file(&store, &dataset, &text, force)?;
            println!(
                "{}: {} folds, {} predictions, {} documents written",
                s.experiment, s.folds, s.predictions, s.written
            );
        }
        Command::Compute {
            dataset,
            instance,
            dataset_level,
            seed,
            k,
            folds,
        } => {
            let store = Store::open(&cli.store)?;
            let d = load_dataset(&store, &dataset)?;
            let both = !instance && !dataset_level;
            if dataset_level || both {
                let mf = compute_all_with(&d, seed, folds)?;
                for note in &mf.report {
                    eprintln!("note: {note}");
                }
                let o = put_dataset_metafeatures(&store, &dataset, &mf, force)?;
                println!("{} dataset meta-features for '{dataset}'", outcome(o));
            }
            if instance || both {
                let h = compute_hardness(&d, k)?;
                let o = put_instance_metafeatures(&store, &dataset, &to_instance_metafeatures(&h), force)?;
                println!("{} instance meta-features for '{dataset}'", outcome(o));
            }
        }
        Command::Export {
            table,
            dataset,
            algorithm,
            out,
        } => {
            let store = Store::open(&cli.store)?;
            let text = match table {
                Table::Algorithms => export_algorithm_table(&store)?,
                Table::Parameters => export_hyperparameter_mapping(&store, &required(algorithm, "algorithm")?)?,
                Table::Folds => export_fold_table(&store, &required(dataset, "dataset")?)?,
                Table::Instances => export_instance_level(&store, &required(dataset, "dataset")?)?,
                Table::Datasets => export_dataset_level(&store)?,
                Table::Algorithm => export_per_algorithm(&store, &required(algorithm, "algorithm")?)?,
            };
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Snapshot => {
            let store = Store::open(&cli.store)?;
            println!("{}", store.snapshot()?);
        }
        Command::Query {
            collection,
            prefix,
            revision,
            documents,
        } => {
            let store = Store::open(&cli.store)?;
            for doc in store.query(&collection, &prefix, revision)? {
                if documents {
                    print!("{}", String::from_utf8_lossy(&doc.to_bytes()));
                } else {
                    println!("{}", doc.key);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
