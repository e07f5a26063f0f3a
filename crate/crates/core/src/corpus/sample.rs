//! Matched sample of commits that carry no detected refactoring.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CommitRecord, CorpusError, RefactoringCommit};

/// Default sample size: 95% confidence, 5% margin on a large population.
pub const DEFAULT_SAMPLE_SIZE: usize = 384;

/// Allowed relative gap between the sample's mean message length and the
/// refactoring corpus mean.
pub const LENGTH_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchConstraint {
    Project,
    TimeWindow,
    MessageLength,
}

impl fmt::Display for MatchConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchConstraint::Project => "project",
            MatchConstraint::TimeWindow => "time window",
            MatchConstraint::MessageLength => "message length",
        })
    }
}

fn message_len(c: &CommitRecord) -> usize {
    c.message.chars().count()
}

/// Draws `target_size` non-refactoring commits matched to the refactoring
/// corpus: same projects, timestamps inside the refactoring time window,
/// same authors whenever enough such commits exist, and a mean message
/// length within [`LENGTH_TOLERANCE`] of the refactoring mean.
///
/// The draw is a seeded shuffle; the length constraint is then met by
/// swapping sampled commits for unsampled ones, one at a time.
pub fn sample_nonrefactoring(
    commits: &[CommitRecord],
    refcommits: &[RefactoringCommit],
    seed: u64,
    target_size: usize,
) -> Result<Vec<CommitRecord>, CorpusError> {
    if target_size == 0 {
        return Ok(Vec::new());
    }
    let insufficient = |constraint, available| CorpusError::InsufficientCandidates {
        constraint,
        available,
        required: target_size,
    };

    let refactoring: HashSet<(&str, &str)> = refcommits
        .iter()
        .map(|r| (r.commit.project_id.as_str(), r.commit.sha.as_str()))
        .collect();
    let projects: HashSet<&str> = refcommits.iter().map(|r| r.commit.project_id.as_str()).collect();
    let authors: HashSet<&str> = refcommits.iter().map(|r| r.commit.author_id.as_str()).collect();
    let (lo, hi) = refcommits
        .iter()
        .map(|r| r.commit.timestamp)
        .fold((i64::MAX, i64::MIN), |(lo, hi), t| (lo.min(t), hi.max(t)));

    let mut seen = BTreeSet::new();
    let pool: Vec<&CommitRecord> = commits
        .iter()
        .filter(|c| !refactoring.contains(&(c.project_id.as_str(), c.sha.as_str())))
        .filter(|c| seen.insert((c.project_id.as_str(), c.sha.as_str())))
        .filter(|c| projects.contains(c.project_id.as_str()))
        .collect();
    if pool.len() < target_size {
        return Err(insufficient(MatchConstraint::Project, pool.len()));
    }
    let pool: Vec<&CommitRecord> = pool
        .into_iter()
        .filter(|c| (lo..=hi).contains(&c.timestamp))
        .collect();
    if pool.len() < target_size {
        return Err(insufficient(MatchConstraint::TimeWindow, pool.len()));
    }
    let same_authors: Vec<&CommitRecord> = pool
        .iter()
        .copied()
        .filter(|c| authors.contains(c.author_id.as_str()))
        .collect();
    let mut pool = if same_authors.len() >= target_size {
        same_authors
    } else {
        pool
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    let (sampled, rest) = pool.split_at(target_size);
    let mut sampled = sampled.to_vec();
    let mut rest = rest.to_vec();

    let target_mean = refcommits.iter().map(|r| message_len(&r.commit) as f64).sum::<f64>()
        / refcommits.len() as f64;
    rebalance_lengths(&mut sampled, &mut rest, target_mean)
        .ok_or_else(|| insufficient(MatchConstraint::MessageLength, sampled.len()))?;

    Ok(sampled.into_iter().cloned().collect())
}

fn within_tolerance(total: f64, n: usize, target_mean: f64) -> bool {
    (total / n as f64 - target_mean).abs() <= LENGTH_TOLERANCE * target_mean
}

/// Greedy swaps toward `target_mean`. Each swap replaces the sampled commit
/// at the wrong extreme with the unsampled commit whose length best closes
/// the remaining gap. Returns `None` when no swap improves the mean.
fn rebalance_lengths<'a>(
    sampled: &mut [&'a CommitRecord],
    rest: &mut Vec<&'a CommitRecord>,
    target_mean: f64,
) -> Option<()> {
    let n = sampled.len();
    let mut total: f64 = sampled.iter().map(|c| message_len(c) as f64).sum();
    // Stable orderings keep the swaps deterministic for a given draw.
    rest.sort_by_key(|c| message_len(c));
    while !within_tolerance(total, n, target_mean) {
        let gap = target_mean * n as f64 - total;
        let out_idx = if gap > 0.0 {
            (0..n).min_by_key(|&i| (message_len(sampled[i]), i))?
        } else {
            (0..n).max_by_key(|&i| (message_len(sampled[i]), std::cmp::Reverse(i)))?
        };
        let out_len = message_len(sampled[out_idx]) as f64;
        let wanted = out_len + gap;
        let in_idx = (0..rest.len())
            .filter(|&j| {
                let l = message_len(rest[j]) as f64;
                if gap > 0.0 {
                    l > out_len
                } else {
                    l < out_len
                }
            })
            .min_by(|&a, &b| {
                let da = (message_len(rest[a]) as f64 - wanted).abs();
                let db = (message_len(rest[b]) as f64 - wanted).abs();
                da.total_cmp(&db).then(a.cmp(&b))
            })?;
        let new_total = total - out_len + message_len(rest[in_idx]) as f64;
        let old_dist = (total - target_mean * n as f64).abs();
        let new_dist = (new_total - target_mean * n as f64).abs();
        if new_dist >= old_dist {
            return None;
        }
        let incoming = rest.remove(in_idx);
        let outgoing = std::mem::replace(&mut sampled[out_idx], incoming);
        let pos = rest.partition_point(|c| message_len(c) <= message_len(outgoing));
        rest.insert(pos, outgoing);
        total = new_total;
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ElementLevel, RefactoringKind, RefactoringOperation, Sha};

    fn commit(i: u32, project: &str, author: &str, ts: i64, len: usize) -> CommitRecord {
        CommitRecord {
            project_id: project.into(),
            sha: Sha::parse(&format!("{i:040x}")).unwrap(),
            author_id: author.into(),
            timestamp: ts,
            message: "x".repeat(len),
            changed_paths: vec![],
        }
    }

    fn refc(c: &CommitRecord) -> RefactoringCommit {
        RefactoringCommit {
            commit: c.clone(),
            operations: vec![RefactoringOperation {
                kind: RefactoringKind::RenameMethod,
                description: String::new(),
                element_level: ElementLevel::Method,
                involved_paths: vec![],
            }],
        }
    }

    fn fixture() -> (Vec<CommitRecord>, Vec<RefactoringCommit>) {
        let mut commits = vec![
            commit(1, "p", "alice", 100, 100),
            commit(2, "p", "bob", 200, 100),
        ];
        for i in 0..20 {
            commits.push(commit(10 + i, "p", if i % 2 == 0 { "alice" } else { "bob" }, 100 + i as i64 * 5, 90 + (i as usize % 5) * 5));
        }
        // outside the time window
        commits.push(commit(50, "p", "alice", 1_000, 100));
        // foreign project
        commits.push(commit(51, "q", "alice", 150, 100));
        let refs = vec![refc(&commits[0]), refc(&commits[1])];
        (commits, refs)
    }

    #[test]
    fn zero_target_is_empty() {
        let (commits, refs) = fixture();
        assert!(sample_nonrefactoring(&commits, &refs, 1, 0).unwrap().is_empty());
    }

    #[test]
    fn deterministic_for_seed() {
        let (commits, refs) = fixture();
        let a = sample_nonrefactoring(&commits, &refs, 7, 10).unwrap();
        let b = sample_nonrefactoring(&commits, &refs, 7, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn window_and_project_violators_never_sampled() {
        let (commits, refs) = fixture();
        // brute force: every eligible candidate under the stated filters
        let eligible: Vec<&Sha> = commits
            .iter()
            .filter(|c| !refs.iter().any(|r| r.commit.sha == c.sha))
            .filter(|c| c.project_id == "p" && (100..=200).contains(&c.timestamp))
            .map(|c| &c.sha)
            .collect();
        assert_eq!(eligible.len(), 20);
        for seed in 0..50 {
            let s = sample_nonrefactoring(&commits, &refs, seed, 20).unwrap();
            assert_eq!(s.len(), 20);
            assert!(s.iter().all(|c| eligible.contains(&&c.sha)));
        }
        assert!(matches!(
            sample_nonrefactoring(&commits, &refs, 0, 21),
            Err(CorpusError::InsufficientCandidates { constraint: MatchConstraint::TimeWindow, available: 20, .. })
        ));
    }

    #[test]
    fn prefers_refactoring_authors_when_enough() {
        let (mut commits, refs) = fixture();
        for i in 0..30 {
            commits.push(commit(100 + i, "p", "carol", 150, 100));
        }
        for seed in 0..20 {
            let s = sample_nonrefactoring(&commits, &refs, seed, 15).unwrap();
            assert!(s.iter().all(|c| c.author_id != "carol"));
        }
        // 40 needed but only 20 by alice/bob: falls back to all authors
        let s = sample_nonrefactoring(&commits, &refs, 3, 40).unwrap();
        assert!(s.iter().any(|c| c.author_id == "carol"));
    }

    #[test]
    fn rebalances_message_length() {
        let target = commit(1, "p", "a", 0, 100);
        let mut commits = vec![target.clone()];
        // mostly short messages, a few long ones
        for i in 0..40 {
            commits.push(commit(10 + i, "p", "a", 0, if i < 35 { 20 } else { 300 }));
        }
        let refs = vec![refc(&target)];
        let s = sample_nonrefactoring(&commits, &refs, 11, 10).unwrap();
        let mean = s.iter().map(|c| c.message.len() as f64).sum::<f64>() / 10.0;
        assert!((mean - 100.0).abs() <= 10.0, "mean {mean}");
    }

    #[test]
    fn impossible_length_reports_constraint() {
        let target = commit(1, "p", "a", 0, 500);
        let mut commits = vec![target.clone()];
        for i in 0..10 {
            commits.push(commit(10 + i, "p", "a", 0, 10));
        }
        let refs = vec![refc(&target)];
        assert!(matches!(
            sample_nonrefactoring(&commits, &refs, 0, 5),
            Err(CorpusError::InsufficientCandidates { constraint: MatchConstraint::MessageLength, .. })
        ));
    }
}
