//! Helpers shared by the integration tests: dataset builders, brute-force
//! oracles written independently of the library, and a reference store
//! populated with hand-written run files.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use metarepo::arff::parse_arff;
use metarepo::ingest::ingest_run_file;
use metarepo::model::{AttributeKind, AttributeSpec, Dataset, Value};
use metarepo::store::{
    put_dataset, put_dataset_metafeature_values, put_instance_metafeatures, InstanceMetaFeatures, Store,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

pub const IRIS_ARFF: &str = include_str!("../../data/iris.arff");

pub fn iris() -> Dataset {
    parse_arff(IRIS_ARFF).expect("bundled iris parses")
}

/// Numeric-only dataset from rows of feature values and 0-based classes.
pub fn numeric(points: &[(&[f64], usize)], n_classes: usize) -> Dataset {
    let n_attr = points.first().map_or(0, |p| p.0.len());
    let mut attributes: Vec<AttributeSpec> = (0..n_attr).map(|a| AttributeSpec::numeric(format!("x{a}"))).collect();
    attributes.push(AttributeSpec::nominal("class", (0..n_classes).map(|c| format!("c{c}"))));
    let rows = points
        .iter()
        .map(|(xs, c)| {
            let mut row: Vec<Value> = xs.iter().map(|&x| Value::Numeric(x)).collect();
            row.push(Value::Nominal(*c));
            row
        })
        .collect();
    Dataset::new("fixture", attributes, n_attr, rows)
}

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub min_n: usize,
    pub max_n: usize,
    pub max_numeric: usize,
    pub max_nominal: usize,
    pub max_classes: usize,
    pub missing: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            min_n: 8,
            max_n: 60,
            max_numeric: 4,
            max_nominal: 2,
            max_classes: 4,
            missing: 0.05,
        }
    }
}

/// Seeded random dataset with at least two populated classes. Numeric
/// values are drawn on a coarse grid so that exact ties occur.
pub fn random_dataset(seed: u64, cfg: GenConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(cfg.min_n..=cfg.max_n);
    let n_num = rng.gen_range(1..=cfg.max_numeric.max(1));
    let n_nom = rng.gen_range(0..=cfg.max_nominal);
    let n_classes = rng.gen_range(2..=cfg.max_classes.max(2));
    let mut attributes = Vec::new();
    for a in 0..n_num {
        attributes.push(AttributeSpec::numeric(format!("n{a}")));
    }
    let mut cats = Vec::new();
    for a in 0..n_nom {
        let k = rng.gen_range(2..=4);
        cats.push(k);
        attributes.push(AttributeSpec::nominal(format!("s{a}"), (0..k).map(|c| format!("v{c}"))));
    }
    attributes.push(AttributeSpec::nominal("class", (0..n_classes).map(|c| format!("k{c}"))));
    let shift: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..n_num).map(|_| rng.gen_range(0..4) as f64).collect())
        .collect();
    let rows = (0..n)
        .map(|i| {
            let class = if i < 2 { i } else { rng.gen_range(0..n_classes) };
            let mut row = Vec::new();
            for a in 0..n_num {
                if rng.gen_bool(cfg.missing) {
                    row.push(Value::Missing);
                } else {
                    let v = shift[class][a] + rng.gen_range(0..20) as f64 * 0.25;
                    row.push(Value::Numeric(v));
                }
            }
            for &k in &cats {
                if rng.gen_bool(cfg.missing) {
                    row.push(Value::Missing);
                } else {
                    row.push(Value::Nominal(rng.gen_range(0..k)));
                }
            }
            row.push(Value::Nominal(class));
            row
        })
        .collect();
    Dataset::new(format!("random{seed}"), attributes, n_num + n_nom, rows)
}

/// All-pairs distance matrix computed directly from the attribute rule:
/// numeric |a-b| over the observed range (capped at 1, range 0 counts as
/// differing when values differ), nominal overlap, missing operand 1.
pub fn distance_oracle(d: &Dataset) -> Vec<Vec<f64>> {
    let features: Vec<usize> = (0..d.attributes.len()).filter(|&a| a != d.class_index).collect();
    let ranges: Vec<Option<(f64, f64)>> = features
        .iter()
        .map(|&a| {
            let vals: Vec<f64> = d.rows.iter().filter_map(|r| r[a].as_f64()).collect();
            if vals.is_empty() {
                return None;
            }
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Some((lo, hi))
        })
        .collect();
    let n = d.rows.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut sum = 0.0;
            for (f, &a) in features.iter().enumerate() {
                let t = match (&d.attributes[a].kind, d.rows[i][a], d.rows[j][a]) {
                    (AttributeKind::Numeric, Value::Numeric(x), Value::Numeric(y)) => {
                        let (lo, hi) = ranges[f].unwrap();
                        if x == y {
                            0.0
                        } else if hi > lo {
                            ((x - y).abs() / (hi - lo)).min(1.0)
                        } else {
                            1.0
                        }
                    }
                    (AttributeKind::Nominal(_), Value::Nominal(x), Value::Nominal(y)) => f64::from(u8::from(x != y)),
                    _ => 1.0,
                };
                sum += t * t;
            }
            m[i][j] = sum.sqrt();
        }
    }
    m
}

/// Neighbors of `i` sorted by (distance, index), excluding `i`.
pub fn sorted_neighbors(m: &[Vec<f64>], i: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..m.len()).filter(|&j| j != i).collect();
    others.sort_by(|&a, &b| m[i][a].total_cmp(&m[i][b]).then(a.cmp(&b)));
    others
}

pub fn loo_1nn_error_oracle(d: &Dataset) -> f64 {
    let m = distance_oracle(d);
    let labels = d.labels();
    let wrong = (0..labels.len())
        .filter(|&i| labels[sorted_neighbors(&m, i)[0]] != labels[i])
        .count();
    wrong as f64 / labels.len() as f64
}

pub fn kdn_oracle(d: &Dataset, k: usize) -> Vec<f64> {
    let m = distance_oracle(d);
    let labels = d.labels();
    (0..labels.len())
        .map(|i| {
            let other = sorted_neighbors(&m, i)
                .into_iter()
                .take(k)
                .filter(|&j| labels[j] != labels[i])
                .count();
            other as f64 / k as f64
        })
        .collect()
}

/// Total weight of a minimum spanning tree by Kruskal's algorithm with a
/// union-find forest.
pub fn kruskal_weight(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((m[i][j], i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    let mut total = 0.0;
    for (w, i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            total += w;
        }
    }
    total
}

/// Maximum per-attribute Fisher ratio over numeric attributes, computed
/// with explicit loops over classes and class pairs.
pub fn fisher_oracle(d: &Dataset) -> Option<f64> {
    let mut best: Option<f64> = None;
    for a in 0..d.attributes.len() {
        if a == d.class_index || d.attributes[a].kind != AttributeKind::Numeric {
            continue;
        }
        let mut by_class: Vec<Vec<f64>> = vec![Vec::new(); d.n_classes()];
        for (i, row) in d.rows.iter().enumerate() {
            if let Value::Numeric(v) = row[a] {
                by_class[d.class_of(i)].push(v);
            }
        }
        let groups: Vec<&Vec<f64>> = by_class.iter().filter(|g| !g.is_empty()).collect();
        if groups.len() < 2 {
            continue;
        }
        let mean = |g: &Vec<f64>| g.iter().sum::<f64>() / g.len() as f64;
        let var = |g: &Vec<f64>| {
            let m = mean(g);
            g.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / g.len() as f64
        };
        let total: usize = groups.iter().map(|g| g.len()).sum();
        let (mut num, mut den) = (0.0, 0.0);
        if groups.len() == 2 {
            num = (mean(groups[0]) - mean(groups[1])).powi(2);
            den = var(groups[0]) + var(groups[1]);
        } else {
            for i in 0..groups.len() {
                let pi = groups[i].len() as f64 / total as f64;
                den += pi * var(groups[i]);
                for j in i + 1..groups.len() {
                    let pj = groups[j].len() as f64 / total as f64;
                    num += pi * pj * (mean(groups[i]) - mean(groups[j])).powi(2);
                }
            }
        }
        if den > 0.0 {
            let r = num / den;
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    best
}

/// Run file text for one experiment over one k-fold partition.
///
/// `test_fold(i)` gives the 1-based test fold of 1-based instance `i`;
/// `role(fold, i)` may override the training cell; `predict(fold, i)`
/// returns the predicted class name for a test instance.
pub fn run_file(
    header: (&str, &str, i64, &str),
    family: &str,
    n: usize,
    k: usize,
    test_fold: impl Fn(usize) -> usize,
    role: impl Fn(usize, usize) -> Option<&'static str>,
    predict: impl Fn(usize, usize) -> String,
) -> String {
    let (toolkit, alg, seed, hp) = header;
    let mut out = format!("{toolkit}\t{alg}\t{seed}\t{hp}\n{family}\n");
    for f in 1..=k {
        for i in 1..=n {
            if test_fold(i) == f {
                writeln!(out, "{f},{i},?,{}", predict(f, i)).unwrap();
            } else {
                writeln!(out, "{f},{i},{}", role(f, i).unwrap_or("1")).unwrap();
            }
        }
    }
    out
}

pub const BP_1: &str = "weka.classifiers.functions.MultilayerPerceptron -- -L 0.261703 -M 0.161703 -H 12 -D";
pub const BP_2: &str = "weka.classifiers.functions.MultilayerPerceptron -- -L 0.25807 -M 0.15807 -H 4";
pub const BP_3: &str = "neuralnet -addlayer 8 -learningrate 0.1 -momentum 0 -windowsepochs 50";
pub const C45_1: &str = "weka.classifiers.trees.J48 -- -C 0.443973 -M 1";

const TOY_ARFF: &str = "@relation toy
@attribute x numeric
@attribute colour {red,blue}
@attribute class {a,b}
@data
0.1,red,a
0.4,blue,a
0.2,red,a
0.9,blue,b
0.8,?,b
0.7,red,b
0.3,blue,a
0.95,blue,b
";

fn iris_fold_a(i: usize) -> usize {
    (i + 6) % 10 + 1
}

fn iris_fold_b(i: usize) -> usize {
    (i * 7) % 10 + 1
}

fn iris_fold_c(i: usize) -> usize {
    i % 10 + 1
}

/// Deterministic prediction: the actual class except for a sparse set of
/// instances chosen by `salt`, which are shifted to the next class.
fn noisy(d: &Dataset, salt: usize) -> impl Fn(usize, usize) -> String + '_ {
    move |f, i| {
        let names = d.class_names();
        let actual = d.class_of(i - 1);
        let c = if (i * (salt + 3) + f * 11).is_multiple_of(29) {
            (actual + 1) % names.len()
        } else {
            actual
        };
        names[c].clone()
    }
}

/// Populates `root` with iris and a small toy dataset, four weka/waffles
/// backpropagation and J48 settings, their predictions, and synthetic
/// meta-features. Every value is fixed, so exports from this store are
/// byte-stable.
pub fn build_reference_store(root: &Path) -> Store {
    let store = Store::open(root).unwrap();
    let iris = iris();
    let toy = parse_arff(TOY_ARFF).unwrap();
    put_dataset(&store, &iris, false).unwrap();
    put_dataset(&store, &toy, false).unwrap();

    let special = |f: usize, i: usize| match (f, i) {
        (2, 2) => Some("0"),
        (10, 1) => Some("0.74"),
        _ => None,
    };
    let n = iris.n_instances();
    let with_77 = |salt: usize| {
        let base = noisy(&iris, salt);
        move |f: usize, i: usize| {
            if i == 77 {
                "Iris-virginica".to_string()
            } else {
                base(f, i)
            }
        }
    };
    let runs = [
        run_file(("weka", "BP", 1, BP_1), "weka_1_10", n, 10, iris_fold_a, special, with_77(1)),
        run_file(("weka", "BP", 1, BP_1), "weka_2_10", n, 10, iris_fold_b, |_, _| None, noisy(&iris, 2)),
        run_file(("weka", "BP", 2, BP_2), "weka_1_10", n, 10, iris_fold_a, special, noisy(&iris, 5)),
        run_file(("waffles", "BP", 3, BP_3), "waffles_1_10", n, 10, iris_fold_c, |_, _| None, noisy(&iris, 8)),
        run_file(("weka", "C4.5", 1, C45_1), "weka_1_10", n, 10, iris_fold_a, special, with_77(4)),
    ];
    for r in &runs {
        ingest_run_file(&store, "iris", r, false).unwrap();
    }
    let toy_run = run_file(
        ("weka", "BP", 1, BP_1),
        "weka_1_2",
        toy.n_instances(),
        2,
        |i| i % 2 + 1,
        |_, _| None,
        |_, i| if i == 5 { "a".into() } else { toy.class_names()[toy.class_of(i - 1)].clone() },
    );
    ingest_run_file(&store, "toy", &toy_run, false).unwrap();

    let mut iris_mf: BTreeMap<String, Json> = metarepo::metafeatures::FEATURE_NAMES
        .iter()
        .map(|n| (n.to_string(), Json::Null))
        .collect();
    for (k, v) in [
        ("numInst", json!(150)),
        ("numAttr", json!(4)),
        ("propSymbolic", json!(0)),
        ("propMissing", json!(0)),
        ("classEntropy", json!(1.584963)),
        ("T2", json!(37.5)),
    ] {
        iris_mf.insert(k.into(), v);
    }
    put_dataset_metafeature_values(&store, "iris", &iris_mf, false).unwrap();
    let toy_mf: BTreeMap<String, Json> = [
        ("numInst", json!(8)),
        ("numAttr", json!(2)),
        ("propSymbolic", json!(0.5)),
        ("propMissing", json!(0.0625)),
        ("T2", json!(4)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    put_dataset_metafeature_values(&store, "toy", &toy_mf, false).unwrap();

    let instances = (0..n)
        .map(|i| {
            let v = if i == 76 {
                vec![Some(0.92), Some(0.0)]
            } else {
                vec![Some((i % 26) as f64 / 25.0), Some(if i % 5 == 0 { 0.5 } else { 1.0 })]
            };
            (i, v)
        })
        .collect();
    let inst = InstanceMetaFeatures {
        measures: vec!["kAN".into(), "MV".into()],
        instances,
    };
    put_instance_metafeatures(&store, "iris", &inst, false).unwrap();
    store
}
