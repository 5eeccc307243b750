//! Overlap of individual feature values between classes.
//!
//! Only numeric attributes with at least one observed value take part.
//! Multi-class F2 sums over class pairs; F3 and F4 average over class pairs.

use crate::error::{Error, Result};
use crate::model::{AttributeKind, Dataset};

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMeasures {
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub f3: Option<f64>,
    pub f4: Option<f64>,
}

/// Numeric attributes with at least one observed value.
pub fn usable_numeric(dataset: &Dataset) -> Vec<usize> {
    dataset
        .feature_indices()
        .into_iter()
        .filter(|&a| {
            dataset.attributes[a].kind == AttributeKind::Numeric && dataset.rows.iter().any(|r| !r[a].is_missing())
        })
        .collect()
}

struct ClassStats {
    n: usize,
    mean: f64,
    variance: f64,
}

fn class_stats(dataset: &Dataset, attr: usize) -> Vec<ClassStats> {
    let mut values = vec![Vec::new(); dataset.n_classes()];
    for (i, r) in dataset.rows.iter().enumerate() {
        if let Some(v) = r[attr].as_f64() {
            values[dataset.class_of(i)].push(v);
        }
    }
    values
        .iter()
        .filter(|v| !v.is_empty())
        .map(|v| {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            ClassStats {
                n: v.len(),
                mean,
                variance: v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n,
            }
        })
        .collect()
}

/// Fisher's discriminant ratio of one numeric attribute, using population
/// variances over observed values. Two classes use
/// (μ1−μ2)² / (σ1²+σ2²); more classes use the proportion-weighted form
/// Σ_{i<j} p_i p_j (μi−μj)² / Σ p_i σi². `None` when fewer than two classes
/// have observed values or the denominator is zero.
pub fn fisher_ratio(dataset: &Dataset, attr: usize) -> Option<f64> {
    let stats = class_stats(dataset, attr);
    if stats.len() < 2 {
        return None;
    }
    let (num, den) = if stats.len() == 2 {
        let (a, b) = (&stats[0], &stats[1]);
        ((a.mean - b.mean).powi(2), a.variance + b.variance)
    } else {
        let total: usize = stats.iter().map(|s| s.n).sum();
        let p: Vec<f64> = stats.iter().map(|s| s.n as f64 / total as f64).collect();
        let mut num = 0.0;
        for i in 0..stats.len() {
            for j in i + 1..stats.len() {
                num += p[i] * p[j] * (stats[i].mean - stats[j].mean).powi(2);
            }
        }
        let den = stats.iter().zip(&p).map(|(s, p)| p * s.variance).sum();
        (num, den)
    };
    (den > 0.0).then(|| num / den)
}

/// Observed (min, max) of `attr` over `rows`.
fn bounds(dataset: &Dataset, attr: usize, rows: &[usize]) -> Option<(f64, f64)> {
    rows.iter()
        .filter_map(|&i| dataset.rows[i][attr].as_f64())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((f64::min(lo, v), f64::max(hi, v))),
        })
}

fn class_members(dataset: &Dataset) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); dataset.n_classes()];
    for i in 0..dataset.n_instances() {
        members[dataset.class_of(i)].push(i);
    }
    members
}

fn class_pairs(members: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let present: Vec<usize> = (0..members.len()).filter(|&c| !members[c].is_empty()).collect();
    let mut pairs = Vec::new();
    for (x, &a) in present.iter().enumerate() {
        for &b in &present[x + 1..] {
            pairs.push((a, b));
        }
    }
    pairs
}

/// Volume of the overlap of the two classes' bounding boxes relative to the
/// volume of their union box. An attribute with zero joint range counts as
/// full overlap; one a class never observes contributes factor 1.
fn box_overlap(dataset: &Dataset, attrs: &[usize], a: &[usize], b: &[usize]) -> f64 {
    let mut product = 1.0;
    for &attr in attrs {
        let (Some((amin, amax)), Some((bmin, bmax))) = (bounds(dataset, attr, a), bounds(dataset, attr, b)) else {
            continue;
        };
        let overlap = (amax.min(bmax) - amin.max(bmin)).max(0.0);
        let range = amax.max(bmax) - amin.min(bmin);
        product *= if range > 0.0 { overlap / range } else { 1.0 };
    }
    product
}

/// Instances among `rows` lying strictly outside the overlap interval of
/// the two classes on `attr`. Rows missing the attribute never count.
fn outside_overlap(dataset: &Dataset, attr: usize, a: &[usize], b: &[usize]) -> Vec<usize> {
    let (Some((amin, amax)), Some((bmin, bmax))) = (bounds(dataset, attr, a), bounds(dataset, attr, b)) else {
        return Vec::new();
    };
    let (lo, hi) = (amin.max(bmin), amax.min(bmax));
    a.iter()
        .chain(b)
        .copied()
        .filter(|&i| match dataset.rows[i][attr].as_f64() {
            Some(v) => lo > hi || v < lo || v > hi,
            None => false,
        })
        .collect()
}

fn feature_efficiency(dataset: &Dataset, attrs: &[usize], a: &[usize], b: &[usize]) -> f64 {
    let total = a.len() + b.len();
    attrs
        .iter()
        .map(|&attr| outside_overlap(dataset, attr, a, b).len() as f64 / total as f64)
        .fold(0.0, f64::max)
}

/// Repeatedly removes the instances discriminated by the most efficient
/// unused attribute; returns the fraction of the pair removed.
fn collective_efficiency(dataset: &Dataset, attrs: &[usize], a: &[usize], b: &[usize]) -> f64 {
    let total = a.len() + b.len();
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    let mut unused = attrs.to_vec();
    while !a.is_empty() && !b.is_empty() && !unused.is_empty() {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for (pos, &attr) in unused.iter().enumerate() {
            let out = outside_overlap(dataset, attr, &a, &b);
            if best.as_ref().is_none_or(|(_, o)| out.len() > o.len()) {
                best = Some((pos, out));
            }
        }
        let Some((pos, removed)) = best else { break };
        if removed.is_empty() {
            break;
        }
        unused.remove(pos);
        let mut drop = vec![false; dataset.n_instances()];
        for i in removed {
            drop[i] = true;
        }
        a.retain(|&i| !drop[i]);
        b.retain(|&i| !drop[i]);
    }
    let remaining = if a.is_empty() || b.is_empty() { 0 } else { a.len() + b.len() };
    (total - remaining) as f64 / total as f64
}

pub fn compute_overlap(dataset: &Dataset) -> Result<OverlapMeasures> {
    let members = class_members(dataset);
    let pairs = class_pairs(&members);
    if pairs.is_empty() {
        return Err(Error::data("overlap measures need at least two classes"));
    }
    let attrs = usable_numeric(dataset);
    if attrs.is_empty() {
        return Ok(OverlapMeasures {
            f1: None,
            f2: None,
            f3: None,
            f4: None,
        });
    }
    let f1 = attrs
        .iter()
        .filter_map(|&a| fisher_ratio(dataset, a))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |m| m.max(v))));
    let f2 = pairs
        .iter()
        .map(|&(a, b)| box_overlap(dataset, &attrs, &members[a], &members[b]))
        .sum();
    let n_pairs = pairs.len() as f64;
    let f3 = pairs
        .iter()
        .map(|&(a, b)| feature_efficiency(dataset, &attrs, &members[a], &members[b]))
        .sum::<f64>()
        / n_pairs;
    let f4 = pairs
        .iter()
        .map(|&(a, b)| collective_efficiency(dataset, &attrs, &members[a], &members[b]))
        .sum::<f64>()
        / n_pairs;
    Ok(OverlapMeasures {
        f1,
        f2: Some(f2),
        f3: Some(f3),
        f4: Some(f4),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::testutil::one_numeric;

    #[test]
    fn fisher_two_class_fixture() {
        let d = one_numeric(&[(0.0, 0), (1.0, 0), (2.0, 1), (3.0, 1)], 2);
        let m = compute_overlap(&d).unwrap();
        assert!((m.f1.unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(m.f2, Some(0.0));
        assert_eq!(m.f3, Some(1.0));
        assert_eq!(m.f4, Some(1.0));
    }

    #[test]
    fn bounding_box_overlap_fixture() {
        let d = one_numeric(&[(0.0, 0), (2.0, 0), (1.0, 1), (3.0, 1)], 2);
        let m = compute_overlap(&d).unwrap();
        assert!((m.f2.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // 0 and 3 lie outside [1, 2]
        assert!((m.f3.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fisher_is_scale_invariant() {
        let pts = [(0.3, 0), (1.7, 0), (2.2, 1), (2.9, 1), (0.1, 2), (5.0, 2)];
        let d = one_numeric(&pts, 3);
        let scaled: Vec<(f64, usize)> = pts.iter().map(|&(x, c)| (x * 7.5 - 3.0, c)).collect();
        let e = one_numeric(&scaled, 3);
        let (a, b) = (fisher_ratio(&d, 0).unwrap(), fisher_ratio(&e, 0).unwrap());
        assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn single_class_is_an_error() {
        let d = one_numeric(&[(0.0, 0), (1.0, 0)], 2);
        assert!(compute_overlap(&d).is_err());
    }
}
