//! Class separability: linear-classifier error, boundary fraction from a
//! minimum spanning tree, and nearest-neighbor distance ratios.

use crate::error::{Error, Result};
use crate::learners::knn::loo_1nn_error_from;
use crate::learners::{linear_error_distance, train_linear, DistanceMatrix, LinearConfig};
use crate::model::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityMeasures {
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub n1: Option<f64>,
    pub n2: Option<f64>,
    pub n3: Option<f64>,
}

/// Minimum spanning tree edges `(u, v, weight)` with `u < v`, grown by Prim's
/// algorithm from vertex 0. Among equal weights the edge with the
/// lexicographically smaller endpoint pair wins.
pub fn prim_mst(matrix: &DistanceMatrix) -> Vec<(usize, usize, f64)> {
    let n = matrix.len();
    if n == 0 {
        return Vec::new();
    }
    let edge = |u: usize, v: usize| (matrix.get(u, v), u.min(v), u.max(v));
    let mut in_tree = vec![false; n];
    // best connecting edge (weight, lo, hi) for each vertex outside the tree
    let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; n];
    in_tree[0] = true;
    for v in 1..n {
        best[v] = Some(edge(0, v));
    }
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = best[v].expect("every outside vertex has an edge");
            if pick.is_none_or(|p| tuple_lt(cand, best[p].unwrap())) {
                pick = Some(v);
            }
        }
        let v = pick.expect("tree grows until complete");
        let (w, lo, hi) = best[v].unwrap();
        edges.push((lo, hi, w));
        in_tree[v] = true;
        for u in 0..n {
            if !in_tree[u] {
                let cand = edge(v, u);
                if tuple_lt(cand, best[u].unwrap()) {
                    best[u] = Some(cand);
                }
            }
        }
    }
    edges
}

fn tuple_lt(a: (f64, usize, usize), b: (f64, usize, usize)) -> bool {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).is_lt()
}

/// Fraction of vertices incident to an MST edge joining different classes.
pub fn boundary_fraction(matrix: &DistanceMatrix, labels: &[usize]) -> f64 {
    let mut boundary = vec![false; labels.len()];
    for (u, v, _) in prim_mst(matrix) {
        if labels[u] != labels[v] {
            boundary[u] = true;
            boundary[v] = true;
        }
    }
    boundary.iter().filter(|&&b| b).count() as f64 / labels.len() as f64
}

/// Σ intra / Σ inter nearest-neighbor distances. Instances without another
/// member of their class are left out of both sums. `None` when the inter
/// sum is zero.
pub fn intra_inter_ratio(matrix: &DistanceMatrix, labels: &[usize]) -> Option<f64> {
    let (mut intra, mut inter) = (0.0, 0.0);
    for i in 0..labels.len() {
        let (mut same, mut other) = (f64::INFINITY, f64::INFINITY);
        for (j, &d) in matrix.row(i).iter().enumerate() {
            if j == i {
                continue;
            }
            if labels[j] == labels[i] {
                same = same.min(d);
            } else {
                other = other.min(d);
            }
        }
        if same.is_finite() && other.is_finite() {
            intra += same;
            inter += other;
        }
    }
    (inter > 0.0).then(|| intra / inter)
}

/// Training error and mean error distance of the linear classifier,
/// averaged one-vs-rest over present classes (a single model for two
/// classes).
pub fn linear_measures(dataset: &Dataset, config: &LinearConfig) -> Result<(f64, Result<f64>)> {
    let present = dataset.present_classes();
    if present.len() < 2 {
        return Err(Error::data("linear measures need at least two classes"));
    }
    let targets = if present.len() == 2 { &present[..1] } else { &present[..] };
    let mut error = 0.0;
    let mut distance = Ok(0.0);
    for &c in targets {
        let model = train_linear(dataset, c, config)?;
        error += model.error_rate(dataset);
        distance = match (distance, linear_error_distance(&model, dataset)) {
            (Ok(acc), Ok(d)) => Ok(acc + d),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
    }
    let k = targets.len() as f64;
    Ok((error / k, distance.map(|d| d / k)))
}

pub fn compute_separability(
    dataset: &Dataset,
    matrix: &DistanceMatrix,
    config: &LinearConfig,
    report: &mut Vec<String>,
) -> SeparabilityMeasures {
    let labels = dataset.labels();
    let (l1, l2) = match linear_measures(dataset, config) {
        Ok((l2, Ok(l1))) => (Some(l1), Some(l2)),
        Ok((l2, Err(e))) => {
            report.push(format!("L1: {e}"));
            (None, Some(l2))
        }
        Err(e) => {
            report.push(format!("L1, L2: {e}"));
            (None, None)
        }
    };
    let enough = labels.len() >= 2;
    if !enough {
        report.push("N1, N2, N3: at least two instances are required".into());
    }
    let n2 = if enough { intra_inter_ratio(matrix, &labels) } else { None };
    if enough && n2.is_none() {
        report.push("N2: every inter-class nearest distance is zero".into());
    }
    SeparabilityMeasures {
        l1,
        l2,
        n1: enough.then(|| boundary_fraction(matrix, &labels)),
        n2,
        n3: enough.then(|| loo_1nn_error_from(matrix, &labels)),
    }
}
