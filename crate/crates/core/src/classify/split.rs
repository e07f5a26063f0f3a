//! Seeded stratified train/test split and k-fold partition.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Category, ClassifyError, LabeledCommit};

fn members(labels: &[Category]) -> [Vec<usize>; 5] {
    let mut by: [Vec<usize>; 5] = Default::default();
    for (i, l) in labels.iter().enumerate() {
        by[l.index()].push(i);
    }
    by
}

/// Test-set size per category: `round(count * frac)` kept inside
/// `[1, count - 1]`, then nudged one at a time toward `round(N * frac)`.
/// Categories whose rounding lost the most gain first; those that gained
/// the most lose first.
pub fn test_counts(counts: &[usize; 5], test_frac: f64) -> [usize; 5] {
    let total: usize = counts.iter().sum();
    let target = (total as f64 * test_frac).round() as usize;
    let mut t = [0usize; 5];
    for c in 0..5 {
        if counts[c] >= 2 {
            t[c] = ((counts[c] as f64 * test_frac).round() as usize).clamp(1, counts[c] - 1);
        }
    }
    let remainder = |t: &[usize; 5], c: usize| counts[c] as f64 * test_frac - t[c] as f64;
    loop {
        let sum: usize = t.iter().sum();
        if sum < target {
            let pick = (0..5)
                .filter(|&c| counts[c] >= 2 && t[c] + 1 < counts[c])
                .max_by(|&a, &b| remainder(&t, a).total_cmp(&remainder(&t, b)).then(b.cmp(&a)));
            match pick {
                Some(c) => t[c] += 1,
                None => break,
            }
        } else if sum > target {
            let pick = (0..5)
                .filter(|&c| counts[c] >= 2 && t[c] > 1)
                .min_by(|&a, &b| remainder(&t, a).total_cmp(&remainder(&t, b)).then(a.cmp(&b)));
            match pick {
                Some(c) => t[c] -= 1,
                None => break,
            }
        } else {
            break;
        }
    }
    t
}

/// Returns `(train, test)` row indices, each in ascending order.
pub fn stratified_split_indices(
    labels: &[Category],
    test_frac: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), ClassifyError> {
    if !(test_frac > 0.0 && test_frac < 1.0) {
        return Err(ClassifyError::InvalidFraction(test_frac));
    }
    let mut by = members(labels);
    let mut counts = [0; 5];
    for c in 0..5 {
        counts[c] = by[c].len();
        if counts[c] == 1 {
            return Err(ClassifyError::TooFewPerCategory {
                category: Category::from_index(c),
                count: 1,
            });
        }
    }
    let t = test_counts(&counts, test_frac);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test = Vec::new();
    let mut train = Vec::new();
    for c in 0..5 {
        by[c].shuffle(&mut rng);
        test.extend_from_slice(&by[c][..t[c]]);
        train.extend_from_slice(&by[c][t[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn stratified_split(
    data: &[LabeledCommit],
    test_frac: f64,
    seed: u64,
) -> Result<(Vec<LabeledCommit>, Vec<LabeledCommit>), ClassifyError> {
    let labels: Vec<Category> = data.iter().map(|d| d.label).collect();
    let (train, test) = stratified_split_indices(&labels, test_frac, seed)?;
    Ok((
        train.into_iter().map(|i| data[i].clone()).collect(),
        test.into_iter().map(|i| data[i].clone()).collect(),
    ))
}

/// Stratified `k`-fold partition: each category is shuffled and dealt
/// round-robin, continuing the deal across categories so fold sizes differ
/// by at most one. Returns the held-out indices of each fold.
pub fn stratified_kfold(labels: &[Category], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, ClassifyError> {
    let mut by = members(labels);
    for c in 0..5 {
        let count = by[c].len();
        if count > 0 && count < k || k < 2 {
            return Err(ClassifyError::FoldTooSmall {
                k,
                category: Category::from_index(c),
                count,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for group in by.iter_mut() {
        group.shuffle(&mut rng);
        for &i in group.iter() {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}
