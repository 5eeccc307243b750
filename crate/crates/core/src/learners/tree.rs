//! C4.5-style decision tree: gain-ratio splits, binary numeric thresholds,
//! multiway nominal splits and optional error-based pruning.
//!
//! Missing values (and categories never seen at a node) follow the child
//! holding the most training instances, so every row reaches exactly one
//! leaf.

use super::{entropy, majority, Classifier};
use crate::model::{AttributeKind, Dataset, Value};

/// Normal quantile at 1 - 0.25, the upper confidence bound used by pruning.
const Z_CF_025: f64 = 0.674_489_750_196_081_7;
const CF: f64 = 0.25;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub min_leaf: usize,
    pub pruned: bool,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            min_leaf: 2,
            pruned: true,
        }
    }
}

/// A disjunct: one leaf and the training instances it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    /// Depth-first index among the tree's leaves.
    pub id: usize,
    pub depth: usize,
    /// Number of training instances routed to this leaf.
    pub count: usize,
    pub class_counts: Vec<usize>,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Test {
    Threshold(f64),
    /// Child index per category; `None` for categories unseen at the node.
    Categories(Vec<Option<usize>>),
}

#[derive(Debug, Clone, PartialEq)]
struct SplitNode {
    attribute: usize,
    test: Test,
    children: Vec<Node>,
    default_child: usize,
    depth: usize,
    class_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(Leaf),
    Split(SplitNode),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    root: Node,
    pub pruned: bool,
}

struct Candidate {
    attribute: usize,
    test: Test,
    gain: f64,
    ratio: f64,
}

struct Builder<'a> {
    data: &'a Dataset,
    labels: Vec<usize>,
    n_classes: usize,
    min_leaf: usize,
}

impl Builder<'_> {
    fn histogram(&self, rows: &[usize]) -> Vec<usize> {
        let mut h = vec![0; self.n_classes];
        for &i in rows {
            h[self.labels[i]] += 1;
        }
        h
    }

    fn leaf(&self, depth: usize, class_counts: Vec<usize>) -> Node {
        Node::Leaf(Leaf {
            id: 0,
            depth,
            count: class_counts.iter().sum(),
            class: majority(&class_counts).unwrap_or(0),
            class_counts,
        })
    }

    fn candidate(&self, rows: &[usize], attr: usize) -> Option<Candidate> {
        let n = rows.len() as f64;
        let known: Vec<usize> = rows
            .iter()
            .copied()
            .filter(|&i| !self.data.rows[i][attr].is_missing())
            .collect();
        let n_missing = rows.len() - known.len();
        if known.len() < 2 * self.min_leaf {
            return None;
        }
        let k = known.len() as f64;
        let h_known = entropy(&self.histogram(&known));
        let (test, gain_known, sizes) = match &self.data.attributes[attr].kind {
            AttributeKind::Numeric => {
                let mut sorted: Vec<(f64, usize)> = known
                    .iter()
                    .map(|&i| (self.data.rows[i][attr].as_f64().unwrap_or(0.0), self.labels[i]))
                    .collect();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut left = vec![0; self.n_classes];
                let mut right = self.histogram(&known);
                let mut best: Option<(f64, f64, usize)> = None;
                for w in 0..sorted.len() - 1 {
                    let (v, c) = sorted[w];
                    left[c] += 1;
                    right[c] -= 1;
                    let next = sorted[w + 1].0;
                    let n_left = w + 1;
                    if next == v || n_left < self.min_leaf || sorted.len() - n_left < self.min_leaf {
                        continue;
                    }
                    let info = (n_left as f64 * entropy(&left) + (k - n_left as f64) * entropy(&right)) / k;
                    let g = h_known - info;
                    if best.is_none_or(|(bg, _, _)| g > bg) {
                        best = Some((g, (v + next) / 2.0, n_left));
                    }
                }
                let (g, t, n_left) = best?;
                (Test::Threshold(t), g, vec![n_left, known.len() - n_left])
            }
            AttributeKind::Nominal(cats) => {
                let mut per_cat = vec![vec![0; self.n_classes]; cats.len()];
                for &i in &known {
                    if let Value::Nominal(c) = self.data.rows[i][attr] {
                        per_cat[c][self.labels[i]] += 1;
                    }
                }
                let sizes: Vec<usize> = per_cat.iter().map(|h| h.iter().sum()).collect();
                let non_empty = sizes.iter().filter(|&&s| s > 0).count();
                if non_empty < 2 || sizes.iter().any(|&s| s > 0 && s < self.min_leaf) {
                    return None;
                }
                let info: f64 = per_cat
                    .iter()
                    .zip(&sizes)
                    .map(|(h, &s)| s as f64 * entropy(h))
                    .sum::<f64>()
                    / k;
                let mut next_child = 0;
                let routes = sizes
                    .iter()
                    .map(|&s| {
                        (s > 0).then(|| {
                            next_child += 1;
                            next_child - 1
                        })
                    })
                    .collect();
                let sizes = sizes.into_iter().filter(|&s| s > 0).collect();
                (Test::Categories(routes), h_known - info, sizes)
            }
        };
        let gain = k / n * gain_known;
        let mut parts = sizes;
        parts.push(n_missing);
        let split_info = entropy(&parts);
        if gain <= EPS || split_info <= EPS {
            return None;
        }
        Some(Candidate {
            attribute: attr,
            test,
            gain,
            ratio: gain / split_info,
        })
    }

    fn build(&self, rows: Vec<usize>, depth: usize) -> Node {
        let counts = self.histogram(&rows);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || rows.len() < 2 * self.min_leaf {
            return self.leaf(depth, counts);
        }
        let candidates: Vec<Candidate> = self
            .data
            .feature_indices()
            .into_iter()
            .filter_map(|a| self.candidate(&rows, a))
            .collect();
        if candidates.is_empty() {
            return self.leaf(depth, counts);
        }
        let avg_gain = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
        let mut chosen: Option<Candidate> = None;
        for c in candidates {
            if c.gain + EPS < avg_gain {
                continue;
            }
            if chosen.as_ref().is_none_or(|b| c.ratio > b.ratio) {
                chosen = Some(c);
            }
        }
        let Some(split) = chosen else {
            return self.leaf(depth, counts);
        };

        let n_children = match &split.test {
            Test::Threshold(_) => 2,
            Test::Categories(routes) => routes.iter().flatten().count(),
        };
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); n_children];
        let mut missing = Vec::new();
        for &i in &rows {
            match route(&split.test, self.data.rows[i][split.attribute]) {
                Some(c) => parts[c].push(i),
                None => missing.push(i),
            }
        }
        let default_child = largest(&parts);
        parts[default_child].extend(missing);
        let children = parts.into_iter().map(|p| self.build(p, depth + 1)).collect();
        Node::Split(SplitNode {
            attribute: split.attribute,
            test: split.test,
            children,
            default_child,
            depth,
            class_counts: counts,
        })
    }
}

fn largest(parts: &[Vec<usize>]) -> usize {
    let mut best = 0;
    for (i, p) in parts.iter().enumerate() {
        if p.len() > parts[best].len() {
            best = i;
        }
    }
    best
}

fn route(test: &Test, value: Value) -> Option<usize> {
    match (test, value) {
        (Test::Threshold(t), Value::Numeric(v)) => Some(usize::from(v > *t)),
        (Test::Categories(routes), Value::Nominal(c)) => routes.get(c).copied().flatten(),
        _ => None,
    }
}

/// Extra errors predicted by the upper confidence limit of the binomial
/// error rate at CF = 0.25 for `e` errors among `n` instances.
pub(crate) fn added_errors(n: f64, e: f64) -> f64 {
    if e < 1.0 {
        let base = n * (1.0 - CF.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let z = Z_CF_025;
    let f = (e + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt()) / (1.0 + z * z / n);
    r * n - e
}

fn estimated_errors(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let e = (n - counts.iter().max().copied().unwrap_or(0)) as f64;
    e + added_errors(n as f64, e)
}

fn subtree_estimate(node: &Node) -> f64 {
    match node {
        Node::Leaf(l) => estimated_errors(&l.class_counts),
        Node::Split(s) => s.children.iter().map(subtree_estimate).sum(),
    }
}

/// Bottom-up subtree replacement.
fn prune(node: Node) -> Node {
    match node {
        Node::Leaf(_) => node,
        Node::Split(mut s) => {
            s.children = s.children.into_iter().map(prune).collect();
            let as_leaf = estimated_errors(&s.class_counts);
            let as_tree: f64 = s.children.iter().map(subtree_estimate).sum();
            if as_leaf <= as_tree + 0.1 {
                let count = s.class_counts.iter().sum();
                Node::Leaf(Leaf {
                    id: 0,
                    depth: s.depth,
                    count,
                    class: majority(&s.class_counts).unwrap_or(0),
                    class_counts: s.class_counts,
                })
            } else {
                Node::Split(s)
            }
        }
    }
}

fn number_leaves(node: &mut Node, next: &mut usize) {
    match node {
        Node::Leaf(l) => {
            l.id = *next;
            *next += 1;
        }
        Node::Split(s) => {
            for c in &mut s.children {
                number_leaves(c, next);
            }
        }
    }
}

/// Induces a tree on `dataset`; `pruned` applies error-based pruning.
pub fn train_tree(dataset: &Dataset, pruned: bool) -> TreeModel {
    train_tree_with(
        dataset,
        &TreeConfig {
            pruned,
            ..TreeConfig::default()
        },
    )
}

pub fn train_tree_with(dataset: &Dataset, config: &TreeConfig) -> TreeModel {
    let builder = Builder {
        data: dataset,
        labels: (0..dataset.n_instances())
            .map(|i| match dataset.rows[i][dataset.class_index] {
                Value::Nominal(c) => c,
                _ => 0,
            })
            .collect(),
        n_classes: dataset.n_classes().max(1),
        min_leaf: config.min_leaf.max(1),
    };
    let mut root = builder.build((0..dataset.n_instances()).collect(), 0);
    if config.pruned {
        root = prune(root);
    }
    number_leaves(&mut root, &mut 0);
    TreeModel {
        root,
        pruned: config.pruned,
    }
}

impl TreeModel {
    /// The leaf that classifies `row`.
    pub fn leaf_for(&self, row: &[Value]) -> &Leaf {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(l) => return l,
                Node::Split(s) => {
                    let c = route(&s.test, row[s.attribute]).unwrap_or(s.default_child);
                    node = &s.children[c];
                }
            }
        }
    }

    pub fn leaves(&self) -> Vec<&Leaf> {
        fn walk<'a>(node: &'a Node, out: &mut Vec<&'a Leaf>) {
            match node {
                Node::Leaf(l) => out.push(l),
                Node::Split(s) => s.children.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn max_depth(&self) -> usize {
        self.leaves().iter().map(|l| l.depth).max().unwrap_or(0)
    }

    /// Attribute tested at the root, if the tree is not a single leaf.
    pub fn root_attribute(&self) -> Option<usize> {
        match &self.root {
            Node::Leaf(_) => None,
            Node::Split(s) => Some(s.attribute),
        }
    }
}

impl Classifier for TreeModel {
    fn predict(&self, row: &[Value]) -> usize {
        self.leaf_for(row).class
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::testutil::one_numeric;
    use crate::model::AttributeSpec;

    #[test]
    fn pure_data_is_a_single_leaf() {
        let d = one_numeric(&[(1.0, 0), (2.0, 0), (3.0, 0)], 2);
        for pruned in [false, true] {
            let t = train_tree(&d, pruned);
            assert_eq!(t.leaves().len(), 1);
            assert_eq!(t.max_depth(), 0);
            assert_eq!(t.leaves()[0].count, 3);
        }
    }

    #[test]
    fn xor_tree_is_shallow_with_large_leaves() {
        let d = Dataset::new(
            "xor",
            vec![
                AttributeSpec::nominal("a", ["0", "1"]),
                AttributeSpec::nominal("b", ["0", "1"]),
                AttributeSpec::nominal("class", ["f", "t"]),
            ],
            2,
            vec![
                vec![Value::Nominal(0), Value::Nominal(0), Value::Nominal(0)],
                vec![Value::Nominal(0), Value::Nominal(1), Value::Nominal(1)],
                vec![Value::Nominal(1), Value::Nominal(0), Value::Nominal(1)],
                vec![Value::Nominal(1), Value::Nominal(1), Value::Nominal(0)],
            ],
        );
        let t = train_tree(&d, false);
        assert!(t.max_depth() <= 2);
        assert!(t.leaves().iter().all(|l| l.count >= 2));
        assert_eq!(t.leaves().iter().map(|l| l.count).sum::<usize>(), 4);
    }

    #[test]
    fn separable_numeric_split() {
        let d = one_numeric(&[(0.0, 0), (1.0, 0), (2.0, 0), (10.0, 1), (11.0, 1), (12.0, 1)], 2);
        let t = train_tree(&d, false);
        assert_eq!(t.root_attribute(), Some(0));
        assert_eq!(t.leaves().len(), 2);
        assert_eq!(t.predict(&[Value::Numeric(5.0), Value::Missing]), 0);
        assert_eq!(t.predict(&[Value::Numeric(7.0), Value::Missing]), 1);
        for (i, row) in d.rows.iter().enumerate() {
            assert_eq!(t.predict(row), d.class_of(i));
            assert_eq!(t.leaf_for(row).depth, 1);
        }
    }

    #[test]
    fn pruning_collapses_noise_splits() {
        // 1 label flip among 20 separable points: the unpruned tree isolates
        // it only if leaves allow, pruning must never deepen any path
        let mut pts: Vec<(f64, usize)> = (0..20).map(|i| (i as f64, usize::from(i >= 10))).collect();
        pts[3].1 = 1;
        pts[4].1 = 1;
        let d = one_numeric(&pts, 2);
        let full = train_tree(&d, false);
        let pruned = train_tree(&d, true);
        for row in &d.rows {
            assert!(pruned.leaf_for(row).depth <= full.leaf_for(row).depth);
        }
        assert!(pruned.leaves().len() <= full.leaves().len());
    }

    #[test]
    fn added_errors_matches_reference_values() {
        // reference values of the C4.5 upper-bound estimate at CF 0.25
        assert!((added_errors(6.0, 0.0) - 6.0 * (1.0 - 0.25f64.powf(1.0 / 6.0))).abs() < 1e-12);
        assert!(added_errors(2.0, 2.0) == 0.0);
        let e = added_errors(16.0, 1.0);
        assert!(e > 0.0 && e < 16.0);
    }
}
