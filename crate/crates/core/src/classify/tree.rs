//! CART decision trees (Gini) over sparse rows, and random forests built
//! from them.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{feature_count, plurality, Category, Sample};
use crate::features::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        label: Category,
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    /// Impurity decrease per feature, normalized to sum 1 (all zero for a
    /// single-leaf tree).
    pub importances: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    /// `ceil(sqrt(n_features))` candidates per split.
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            MaxFeatures::Count(k) => k,
        }
        .max(1)
    }
}

fn label_counts(data: &[Sample<'_>], idx: &[usize]) -> [usize; 5] {
    let mut c = [0; 5];
    for &i in idx {
        c[data[i].y.index()] += 1;
    }
    c
}

/// `n * gini` for a node with the given class counts.
fn weighted_gini(counts: &[usize; 5], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
    n as f64 - sq / n as f64
}

fn midpoint(a: f64, b: f64) -> f64 {
    let t = a + (b - a) / 2.0;
    if t >= b {
        a
    } else {
        t
    }
}

struct Best {
    feature: usize,
    threshold: f64,
    score: f64,
}

struct Builder<'a, 'd> {
    data: &'a [Sample<'d>],
    max_depth: usize,
    max_features: usize,
    rng: Option<ChaCha8Rng>,
    nodes: Vec<Node>,
    importances: Vec<f64>,
    /// Per-feature `(rows present, min, max)` for the current node; only
    /// touched entries are non-default.
    stats: Vec<(usize, f64, f64)>,
    /// Per-feature slot in the candidate list, `usize::MAX` when absent.
    slot: Vec<usize>,
}

impl Builder<'_, '_> {
    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = label_counts(self.data, &idx);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { label: plurality(&counts) });
        if pure || depth >= self.max_depth {
            return id;
        }
        let Some(best) = self.best_split(&idx, &counts) else {
            return id;
        };
        let gain = weighted_gini(&counts, idx.len()) - best.score;
        self.importances[best.feature] += gain.max(0.0);
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.data[i].x.get(best.feature) <= best.threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&mut self, idx: &[usize], counts: &[usize; 5]) -> Option<Best> {
        let n = idx.len();
        let mut touched = Vec::new();
        for &i in idx {
            for &(f, w) in &self.data[i].x.entries {
                let st = &mut self.stats[f];
                if st.0 == 0 {
                    touched.push(f);
                    *st = (1, w, w);
                } else {
                    *st = (st.0 + 1, st.1.min(w), st.2.max(w));
                }
            }
        }
        touched.sort_unstable();
        // a feature is constant here when every row shares one value
        let varying: Vec<usize> = touched
            .iter()
            .copied()
            .filter(|&f| {
                let (count, lo, hi) = self.stats[f];
                count < n || lo != hi
            })
            .collect();
        for &f in &touched {
            self.stats[f] = (0, 0.0, 0.0);
        }
        if varying.is_empty() {
            return None;
        }
        let candidates: Vec<usize> = match &mut self.rng {
            Some(rng) if varying.len() > self.max_features => {
                let mut picked: Vec<usize> = sample_indices(rng, varying.len(), self.max_features)
                    .into_iter()
                    .map(|k| varying[k])
                    .collect();
                picked.sort_unstable();
                picked
            }
            _ => varying,
        };
        for (k, &f) in candidates.iter().enumerate() {
            self.slot[f] = k;
        }
        let mut columns: Vec<Vec<(f64, usize)>> = vec![Vec::new(); candidates.len()];
        for &i in idx {
            let s = &self.data[i];
            for &(f, w) in &s.x.entries {
                let k = self.slot[f];
                if k != usize::MAX {
                    columns[k].push((w, s.y.index()));
                }
            }
        }
        for &f in &candidates {
            self.slot[f] = usize::MAX;
        }
        for col in columns.iter_mut() {
            col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }

        let mut best: Option<Best> = None;
        for (f, col) in candidates.into_iter().zip(&columns) {
            let mut left = *counts;
            for &(_, y) in col {
                left[y] -= 1;
            }
            let mut n_left = n - col.len();
            let mut prev = 0.0;
            let mut k = 0;
            while k < col.len() {
                let value = col[k].0;
                if n_left > 0 {
                    let mut right = [0; 5];
                    for c in 0..5 {
                        right[c] = counts[c] - left[c];
                    }
                    let score = weighted_gini(&left, n_left) + weighted_gini(&right, n - n_left);
                    if best.as_ref().is_none_or(|b| score < b.score) {
                        best = Some(Best {
                            feature: f,
                            threshold: midpoint(prev, value),
                            score,
                        });
                    }
                }
                while k < col.len() && col[k].0 == value {
                    left[col[k].1] += 1;
                    n_left += 1;
                    k += 1;
                }
                prev = value;
            }
        }
        best
    }
}

fn grow(
    data: &[Sample<'_>],
    idx: Vec<usize>,
    max_depth: usize,
    max_features: MaxFeatures,
    n_features: usize,
    rng: Option<ChaCha8Rng>,
) -> Tree {
    let mut b = Builder {
        data,
        max_depth,
        max_features: max_features.resolve(n_features),
        rng,
        nodes: Vec::new(),
        importances: vec![0.0; n_features],
        stats: vec![(0, 0.0, 0.0); n_features],
        slot: vec![usize::MAX; n_features],
    };
    b.build(idx, 0);
    let total: f64 = b.importances.iter().sum();
    if total > 0.0 {
        for v in &mut b.importances {
            *v /= total;
        }
    }
    Tree {
        nodes: b.nodes,
        importances: b.importances,
    }
}

impl Tree {
    /// Single CART tree considering every feature at every split. Among
    /// equally good splits the lowest feature index, then the lowest
    /// threshold, wins.
    pub fn fit(data: &[Sample<'_>], max_depth: usize) -> Tree {
        let n_features = feature_count(data);
        grow(data, (0..data.len()).collect(), max_depth, MaxFeatures::All, n_features, None)
    }

    pub fn predict(&self, x: &SparseVector) -> Category {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { label } => return *label,
                Node::Split { feature, threshold, left, right } => {
                    id = if x.get(*feature) <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn split_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    pub fn feature_importances(&self) -> Vec<f64> {
        self.importances.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub max_features: MaxFeatures,
    /// `false`: every tree sees the full training set.
    pub bootstrap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    /// Tree `t` draws from its own ChaCha stream `t` under `seed`, so the
    /// result does not depend on thread scheduling.
    pub fn fit(data: &[Sample<'_>], config: &ForestConfig, seed: u64) -> Forest {
        let n_features = feature_count(data);
        let trees = (0..config.n_estimators)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let idx: Vec<usize> = if config.bootstrap {
                    let mut idx: Vec<usize> = (0..data.len()).map(|_| rng.gen_range(0..data.len())).collect();
                    idx.sort_unstable();
                    idx
                } else {
                    (0..data.len()).collect()
                };
                grow(data, idx, config.max_depth, config.max_features, n_features, Some(rng))
            })
            .collect();
        Forest { trees }
    }

    /// Majority vote; ties go to the lowest canonical category.
    pub fn predict(&self, x: &SparseVector) -> Category {
        let mut votes = [0; 5];
        for t in &self.trees {
            votes[t.predict(x).index()] += 1;
        }
        plurality(&votes)
    }

    /// Mean of the per-tree normalized importances.
    pub fn feature_importances(&self) -> Vec<f64> {
        let n = self.trees.iter().map(|t| t.importances.len()).max().unwrap_or(0);
        let mut out = vec![0.0; n];
        for t in &self.trees {
            for (o, v) in out.iter_mut().zip(&t.importances) {
                *o += v;
            }
        }
        let k = self.trees.len().max(1) as f64;
        out.iter_mut().for_each(|v| *v /= k);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(values: &[(f64, Category)]) -> Vec<SparseVector> {
        values.iter().map(|&(v, _)| SparseVector::from_pairs([(0, v)])).collect()
    }

    #[test]
    fn one_feature_one_split() {
        let table = [
            (0.1, Category::Functional),
            (0.2, Category::Functional),
            (0.8, Category::BugFix),
            (0.9, Category::BugFix),
        ];
        let xs = rows(&table);
        let data: Vec<Sample> = xs.iter().zip(&table).map(|(x, s)| Sample { x, y: s.1 }).collect();
        let t = Tree::fit(&data, 10);
        assert_eq!(t.split_count(), 1);
        match &t.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert!((threshold - 0.5).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        for s in &data {
            assert_eq!(t.predict(s.x), s.y);
        }
        assert_eq!(t.importances, vec![1.0]);
    }

    #[test]
    fn depth_limit_holds() {
        let xs: Vec<SparseVector> = (1..=16).map(|i| SparseVector::from_pairs([(0, i as f64)])).collect();
        let data: Vec<Sample> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| Sample { x, y: Category::from_index(i % 5) })
            .collect();
        for d in 1..5 {
            assert!(Tree::fit(&data, d).depth() <= d);
        }
    }

    #[test]
    fn constant_features_make_a_leaf() {
        let x = SparseVector::from_pairs([(0, 1.0)]);
        let data = vec![
            Sample { x: &x, y: Category::BugFix },
            Sample { x: &x, y: Category::Functional },
        ];
        let t = Tree::fit(&data, 5);
        assert_eq!(t.nodes, vec![Node::Leaf { label: Category::Functional }]);
    }

    #[test]
    fn forest_is_deterministic() {
        let xs: Vec<SparseVector> = (0..40)
            .map(|i| SparseVector::from_pairs([(i % 7, 1.0 + (i % 3) as f64), (7 + i % 5, 0.5)]))
            .collect();
        let data: Vec<Sample> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| Sample { x, y: Category::from_index(i % 7 % 5) })
            .collect();
        let cfg = ForestConfig {
            n_estimators: 8,
            max_depth: 6,
            max_features: MaxFeatures::Sqrt,
            bootstrap: false,
        };
        let a = Forest::fit(&data, &cfg, 3);
        let b = Forest::fit(&data, &cfg, 3);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
