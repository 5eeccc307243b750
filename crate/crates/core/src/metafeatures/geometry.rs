//! Nonlinearity on interpolated instances, covering spheres, and density.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::learners::{train_linear, Classifier, DistanceMatrix, LinearConfig, NearestNeighbor};
use crate::model::{AttributeKind, Dataset, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryMeasures {
    pub l3: Option<f64>,
    pub n4: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

/// Radius shrink applied so a sphere stops just short of its nearest enemy.
const SPHERE_MARGIN: f64 = 1e-9;

fn interpolate(dataset: &Dataset, a: &[Value], b: &[Value], t: f64) -> Vec<Value> {
    let mut row = a.to_vec();
    for attr in dataset.feature_indices() {
        row[attr] = match (&dataset.attributes[attr].kind, a[attr], b[attr]) {
            (AttributeKind::Numeric, Value::Numeric(x), Value::Numeric(y)) => Value::Numeric(x + t * (y - x)),
            (AttributeKind::Numeric, Value::Missing, v) | (AttributeKind::Numeric, v, Value::Missing) => v,
            (_, x, y) => {
                if t < 0.5 {
                    x
                } else {
                    y
                }
            }
        };
    }
    row
}

/// N synthetic instances, each interpolated between two distinct random
/// members of one class. Instance j draws from its own class when that
/// class has two or more members, otherwise from the class of a random
/// instance that does.
pub fn interpolated_set(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    let n = dataset.n_instances();
    let mut members = vec![Vec::new(); dataset.n_classes()];
    for i in 0..n {
        members[dataset.class_of(i)].push(i);
    }
    let eligible: Vec<usize> = (0..n).filter(|&i| members[dataset.class_of(i)].len() >= 2).collect();
    if eligible.is_empty() {
        return Err(Error::data("no class has two instances to interpolate between"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        let mut class = dataset.class_of(j);
        if members[class].len() < 2 {
            class = dataset.class_of(eligible[rng.gen_range(0..eligible.len())]);
        }
        let m = &members[class];
        let first = rng.gen_range(0..m.len());
        let mut second = rng.gen_range(0..m.len() - 1);
        if second >= first {
            second += 1;
        }
        let t: f64 = rng.gen();
        rows.push(interpolate(dataset, &dataset.rows[m[first]], &dataset.rows[m[second]], t));
    }
    Ok(Dataset {
        rows,
        ..dataset.subset(&[])
    })
}

/// Error of the training-set linear classifier (one-vs-rest average) and of
/// 1-NN on the interpolated set.
pub fn nonlinearity(dataset: &Dataset, seed: u64, config: &LinearConfig) -> Result<(Result<f64>, Result<f64>)> {
    let synthetic = interpolated_set(dataset, seed)?;
    let present = dataset.present_classes();
    let targets = if present.len() == 2 { &present[..1] } else { &present[..] };
    let linear = targets
        .iter()
        .map(|&c| train_linear(dataset, c, config).map(|m| m.error_rate(&synthetic)))
        .sum::<Result<f64>>()
        .map(|s| s / targets.len() as f64);
    let nn = NearestNeighbor::fit(dataset).map(|nn| {
        let wrong = (0..synthetic.n_instances())
            .filter(|&i| nn.predict(&synthetic.rows[i]) != synthetic.class_of(i))
            .count();
        wrong as f64 / synthetic.n_instances() as f64
    });
    Ok((linear, nn))
}

/// Fraction of instances whose covering sphere is not contained in another.
/// Each sphere grows until just before the nearest instance of another
/// class and always covers its own center. A sphere is dropped when its
/// covered set is a proper subset of another's, or equal to the set of a
/// lower-indexed sphere.
pub fn covering_spheres(matrix: &DistanceMatrix, labels: &[usize]) -> f64 {
    let n = labels.len();
    let words = n.div_ceil(64);
    let covered: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let row = matrix.row(i);
            let enemy = (0..n)
                .filter(|&j| labels[j] != labels[i])
                .map(|j| row[j])
                .fold(f64::INFINITY, f64::min);
            let radius = enemy - SPHERE_MARGIN;
            let mut bits = vec![0u64; words];
            for (j, &d) in row.iter().enumerate() {
                if j == i || d <= radius {
                    bits[j / 64] |= 1 << (j % 64);
                }
            }
            bits
        })
        .collect();
    let contains = |outer: &[u64], inner: &[u64]| outer.iter().zip(inner).all(|(o, i)| o & i == *i);
    let kept = (0..n)
        .filter(|&i| {
            !(0..n).any(|j| {
                j != i
                    && covered[j][i / 64] & (1 << (i % 64)) != 0
                    && contains(&covered[j], &covered[i])
                    && (j < i || covered[j] != covered[i])
            })
        })
        .count();
    kept as f64 / n as f64
}

pub fn compute_geometry(
    dataset: &Dataset,
    matrix: &DistanceMatrix,
    seed: u64,
    config: &LinearConfig,
    report: &mut Vec<String>,
) -> GeometryMeasures {
    let (l3, n4) = match nonlinearity(dataset, seed, config) {
        Ok((l, n)) => (
            l.map_err(|e| report.push(format!("L3: {e}"))).ok(),
            n.map_err(|e| report.push(format!("N4: {e}"))).ok(),
        ),
        Err(e) => {
            report.push(format!("L3, N4: {e}"));
            (None, None)
        }
    };
    let labels = dataset.labels();
    let two_classes = dataset.present_classes().len() >= 2;
    if !two_classes {
        report.push("T1: at least two classes are required".into());
    }
    let features = dataset.n_features();
    if features == 0 {
        report.push("T2: dataset has no attributes".into());
    }
    GeometryMeasures {
        l3,
        n4,
        t1: two_classes.then(|| covering_spheres(matrix, &labels)),
        t2: (features > 0).then(|| dataset.n_instances() as f64 / features as f64),
    }
}
