use proptest::prelude::*;
use refdoc_core::classify::bayes::BayesModel;
use refdoc_core::classify::knn::KnnModel;
use refdoc_core::classify::tree::{Forest, ForestConfig, MaxFeatures, Node, Tree};
use refdoc_core::classify::{
    evaluate_predictions, mcnemar, mcnemar_counts, train, Category, Hyperparams, LabeledCommit, ModelKind, Sample,
};
use refdoc_core::corpus::{CommitRecord, Sha};
use refdoc_core::features::SparseVector;

fn dense(v: &[f64]) -> SparseVector {
    SparseVector::from_pairs(v.iter().copied().enumerate())
}

fn category() -> impl Strategy<Value = Category> {
    (0usize..5).prop_map(Category::from_index)
}

/// Up to 10 points over 3 features with values from a small grid, so ties
/// and repeated values are common.
fn fixture() -> impl Strategy<Value = Vec<(Vec<f64>, Category)>> {
    let row = (prop::collection::vec((0u8..4).prop_map(|v| f64::from(v) * 0.25), 3), category());
    prop::collection::vec(row, 2..=10)
}

fn as_samples(rows: &[(SparseVector, Category)]) -> Vec<Sample<'_>> {
    rows.iter().map(|(x, y)| Sample { x, y: *y }).collect()
}

#[test]
fn bayes_hand_posterior() {
    let a = dense(&[1.0, 0.0]);
    let b = dense(&[0.0, 1.0]);
    let data = [Sample { x: &a, y: Category::Functional }, Sample { x: &b, y: Category::BugFix }];
    let m = BayesModel::fit(&data, 1.0);
    // class Functional: feature sums (1, 0), total 1 + 2 = 3
    let jll = m.joint_log_likelihood(&a);
    assert!((jll[0] - (0.5f64.ln() + (2.0f64 / 3.0).ln())).abs() < 1e-15);
    assert!((jll[1] - (0.5f64.ln() + (1.0f64 / 3.0).ln())).abs() < 1e-15);
    assert_eq!(jll[2], f64::NEG_INFINITY);
    let posterior_f = jll[0].exp() / (jll[0].exp() + jll[1].exp());
    assert!((posterior_f - 2.0 / 3.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn bayes_matches_brute_force(rows in fixture(), query in prop::collection::vec(0.0f64..1.0, 3), alpha in 0.1f64..3.0) {
        let rows: Vec<(SparseVector, Category)> = rows.into_iter().map(|(x, y)| (dense(&x), y)).collect();
        let m = BayesModel::fit(&as_samples(&rows), alpha);
        let n_features = rows.iter().filter_map(|r| r.0.entries.last().map(|e| e.0 + 1)).max().unwrap_or(0);
        let q = dense(&query);
        let jll = m.joint_log_likelihood(&q);
        for c in Category::ALL {
            let members: Vec<&SparseVector> = rows.iter().filter(|r| r.1 == c).map(|r| &r.0).collect();
            if members.is_empty() {
                prop_assert_eq!(jll[c.index()], f64::NEG_INFINITY);
                continue;
            }
            let sums: Vec<f64> = (0..n_features).map(|f| members.iter().map(|x| x.get(f)).sum()).collect();
            let total: f64 = sums.iter().sum::<f64>() + alpha * n_features as f64;
            let mut expected = (members.len() as f64 / rows.len() as f64).ln();
            for f in 0..3 {
                let w = q.get(f);
                if w > 0.0 {
                    let count = sums.get(f).copied().unwrap_or(0.0);
                    expected += w * ((count + alpha) / total).ln();
                }
            }
            prop_assert!((jll[c.index()] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn cart_root_split_is_the_gini_optimum(rows in fixture()) {
        let data: Vec<(SparseVector, Category)> = rows.iter().map(|(x, y)| (dense(x), *y)).collect();
        let tree = Tree::fit(&as_samples(&data), 1);
        let gini = |ys: &[Category]| {
            let n = ys.len() as f64;
            if ys.is_empty() { return 0.0; }
            let sq: f64 = Category::ALL.iter().map(|c| { let k = ys.iter().filter(|y| *y == c).count() as f64; k * k }).sum();
            n - sq / n
        };
        let labels: Vec<Category> = rows.iter().map(|r| r.1).collect();
        let pure = labels.iter().all(|&y| y == labels[0]);
        // exhaustive search: every feature, every midpoint between adjacent distinct values
        let mut best: Option<(f64, usize, f64)> = None;
        for f in 0..3 {
            let mut values: Vec<f64> = rows.iter().map(|r| r.0[f]).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for w in values.windows(2) {
                let t = (w[0] + w[1]) / 2.0;
                let (l, r): (Vec<Category>, Vec<Category>) = rows.iter().map(|r| (r.0[f], r.1)).fold((vec![], vec![]), |(mut l, mut r), (v, y)| {
                    if v <= t { l.push(y) } else { r.push(y) }
                    (l, r)
                });
                let score = gini(&l) + gini(&r);
                if best.is_none_or(|b| score < b.0 - 1e-9) {
                    best = Some((score, f, t));
                }
            }
        }
        match (&tree.nodes[0], best) {
            (Node::Leaf { .. }, None) => {}
            (Node::Leaf { .. }, Some(_)) => prop_assert!(pure),
            (Node::Split { feature, threshold, .. }, Some((_, f, t))) => {
                prop_assert!(!pure);
                prop_assert_eq!(*feature, f);
                prop_assert!((threshold - t).abs() < 1e-12);
            }
            (Node::Split { .. }, None) => prop_assert!(false, "split without candidates"),
        }
    }

    #[test]
    fn knn_neighbors_match_brute_force(rows in fixture(), query in prop::collection::vec(0.0f64..1.0, 3), k in 1usize..=10) {
        let data: Vec<(SparseVector, Category)> = rows.iter().map(|(x, y)| (dense(x), *y)).collect();
        prop_assume!(k <= data.len());
        let m = KnnModel::fit(&as_samples(&data), k).unwrap();
        let mut order: Vec<(f64, usize)> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.0.iter().zip(&query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let got = m.neighbors(&dense(&query));
        // equal-distance neighbours may be computed with a different rounding,
        // so compare the distance multiset and require exact sets when no tie
        // straddles the cut
        let expected: Vec<usize> = order[..k].iter().map(|e| e.1).collect();
        let straddles = k < order.len() && (order[k].0 - order[k - 1].0).abs() < 1e-12;
        if !straddles {
            let mut g = got.clone();
            g.sort_unstable();
            let mut e = expected.clone();
            e.sort_unstable();
            prop_assert_eq!(g, e);
        }
        prop_assert_eq!(got.len(), k);
    }

    #[test]
    fn micro_f1_equals_accuracy(pairs in prop::collection::vec((category(), category()), 1..200)) {
        let (t, p): (Vec<Category>, Vec<Category>) = pairs.into_iter().unzip();
        let r = evaluate_predictions(&t, &p);
        let acc = t.iter().zip(&p).filter(|(a, b)| a == b).count() as f64 / t.len() as f64;
        prop_assert_eq!(r.micro_f1, acc);
        prop_assert_eq!(r.micro_f1, r.accuracy());
    }
}

#[test]
fn knn_exact_neighbor_set() {
    let pts: Vec<SparseVector> = [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 3.0]].iter().map(|p| dense(p)).collect();
    let labels = [Category::Functional, Category::BugFix, Category::BugFix, Category::CodeSmell];
    let data: Vec<Sample> = pts.iter().zip(labels).map(|(x, y)| Sample { x, y }).collect();
    let m = KnnModel::fit(&data, 2).unwrap();
    // distances from (0.9, 0.1): 0.82, 0.02, 4.42, 13.7
    assert_eq!(m.neighbors(&dense(&[0.9, 0.1])), vec![1, 0]);
    assert!(KnnModel::fit(&data, 5).is_err());
}

#[test]
fn cart_hand_split() {
    // feature 0 separates perfectly at 0.5, feature 1 is noise
    let pts: Vec<SparseVector> = [[0.0, 1.0], [0.2, 0.0], [0.8, 1.0], [1.0, 0.0]].iter().map(|p| dense(p)).collect();
    let labels = [Category::BugFix, Category::BugFix, Category::CodeSmell, Category::CodeSmell];
    let data: Vec<Sample> = pts.iter().zip(labels).map(|(x, y)| Sample { x, y }).collect();
    let t = Tree::fit(&data, 5);
    assert_eq!(t.nodes[0], Node::Split { feature: 0, threshold: 0.5, left: 1, right: 2 });
    assert_eq!(t.depth(), 1);
}

fn sha(i: usize) -> Sha {
    Sha::parse(&format!("{:040x}", i)).unwrap()
}

fn labeled(rows: &[(Vec<f64>, Category)]) -> Vec<LabeledCommit> {
    rows.iter()
        .enumerate()
        .map(|(i, (x, y))| LabeledCommit {
            commit: CommitRecord {
                project_id: "p".into(),
                sha: sha(i),
                author_id: String::new(),
                timestamp: 0,
                message: String::new(),
                changed_paths: vec![],
            },
            label: *y,
            vector: dense(x),
        })
        .collect()
}

fn blobs(n: usize) -> Vec<(Vec<f64>, Category)> {
    (0..n)
        .map(|i| {
            let c = i % 5;
            let mut x = vec![0.0; 8];
            x[c] = 1.0 + (i % 3) as f64 * 0.1;
            x[5 + i % 3] = 0.3;
            (x, Category::from_index(c))
        })
        .collect()
}

#[test]
fn single_tree_forest_equals_tree() {
    let rows = blobs(40);
    let owned: Vec<(SparseVector, Category)> = rows.iter().map(|(x, y)| (dense(x), *y)).collect();
    let data = as_samples(&owned);
    let config = ForestConfig { n_estimators: 1, max_depth: 10, max_features: MaxFeatures::All, bootstrap: false };
    let forest = Forest::fit(&data, &config, 9);
    assert_eq!(forest.trees[0], Tree::fit(&data, 10));
}

#[test]
fn training_is_deterministic_and_serializable() {
    let data = labeled(&blobs(60));
    for kind in [ModelKind::RandomForest, ModelKind::DecisionTree, ModelKind::LogisticRegression, ModelKind::MultinomialNb, ModelKind::Knn] {
        let params = match kind {
            ModelKind::RandomForest => Hyperparams::RandomForest {
                max_depth: 8,
                n_estimators: 20,
                criterion: Default::default(),
                bootstrap: true,
            },
            ModelKind::Knn => Hyperparams::Knn { n_neighbors: 5, weights: Default::default() },
            k => Hyperparams::default_for(k),
        };
        let a = train(&params, &data, 42).unwrap();
        let b = train(&params, &data, 42).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "{kind:?}");
        let back = refdoc_core::classify::TrainedModel::from_json(&a.to_json()).unwrap();
        for d in &data {
            assert_eq!(back.predict(&d.vector), a.predict(&d.vector));
            assert_eq!(a.predict(&d.vector), d.label, "{kind:?} misfits separable data");
        }
    }
}

#[test]
fn mnb_invariant_to_query_scaling() {
    let data = labeled(&blobs(30));
    let m = train(&Hyperparams::MultinomialNb { alpha: 1.0 }, &data, 0).unwrap();
    for d in &data {
        for s in [0.5, 2.0, 10.0] {
            assert_eq!(m.predict(&d.vector.scaled(s)), m.predict(&d.vector));
        }
    }
}

#[test]
fn mcnemar_fixed_points() {
    assert!((mcnemar_counts(10, 0).p_value - 0.001953125).abs() < 1e-9);
    let data = labeled(&blobs(30));
    let m = train(&Hyperparams::DecisionTree { criterion: Default::default(), max_depth: 3 }, &data, 0).unwrap();
    assert_eq!(mcnemar(&m, &m, &data).p_value, 1.0);
}
