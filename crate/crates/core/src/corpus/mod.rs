//! Commit and refactoring ingestion.
//!
//! Commits come from git repositories, refactorings from Refactoring Miner
//! JSON. The two are joined on commit sha into [`RefactoringCommit`]s.

mod git;
mod kinds;
mod refminer;
mod sample;
mod stats;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use git::{ingest_repository, CommitStream, RepoFiles};
pub use kinds::{ElementLevel, KindTable, RefactoringKind};
pub use refminer::{parse_refminer_json, parse_refminer_json_with};
pub use sample::{sample_nonrefactoring, MatchConstraint, DEFAULT_SAMPLE_SIZE, LENGTH_TOLERANCE};
pub use stats::{compute_corpus_stats, CorpusStats};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read repository {origin}: {reason}")]
    UnreadableRepo { origin: String, reason: String },
    #[error("branch {branch} not found in {origin}")]
    UnknownBranch { origin: String, branch: String },
    #[error("malformed refactoring JSON: {0}")]
    MalformedJson(String),
    #[error("unknown refactoring kind: {0:?}")]
    UnknownRefactoringKind(String),
    #[error("malformed kind table at line {line}: {reason}")]
    MalformedKindTable { line: usize, reason: String },
    #[error("invalid commit sha {0:?}")]
    InvalidSha(String),
    #[error("not enough non-refactoring candidates after {constraint} filter: {available} < {required}")]
    InsufficientCandidates {
        constraint: MatchConstraint,
        available: usize,
        required: usize,
    },
}

/// A 40-character lowercase hex commit id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Sha(String);

impl Sha {
    pub fn parse(s: &str) -> Result<Self, CorpusError> {
        if s.len() == 40 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            Ok(Sha(s.to_owned()))
        } else {
            Err(CorpusError::InvalidSha(s.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Sha {
    type Error = CorpusError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Sha::parse(&s)
    }
}

impl From<Sha> for String {
    fn from(sha: Sha) -> String {
        sha.0
    }
}

impl fmt::Display for Sha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectRef {
    pub project_id: String,
    /// Local path or remote URL.
    pub origin: String,
    pub default_branch: String,
}

impl ProjectRef {
    pub fn new(
        project_id: impl Into<String>,
        origin: impl Into<String>,
        default_branch: impl Into<String>,
    ) -> Self {
        ProjectRef {
            project_id: project_id.into(),
            origin: origin.into(),
            default_branch: default_branch.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub project_id: String,
    pub sha: Sha,
    /// Lowercased, trimmed `name <email>`.
    pub author_id: String,
    /// UTC seconds.
    pub timestamp: i64,
    pub message: String,
    pub changed_paths: Vec<String>,
}

/// Builds the author key used to match authors across commits.
pub fn normalize_author(name: &str, email: &str) -> String {
    format!("{} <{}>", name.trim(), email.trim())
        .trim()
        .to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefactoringOperation {
    pub kind: RefactoringKind,
    pub description: String,
    pub element_level: ElementLevel,
    pub involved_paths: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefactoringCommit {
    pub commit: CommitRecord,
    pub operations: Vec<RefactoringOperation>,
}

/// Result of [`join_refactorings`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JoinOutcome {
    pub refactoring_commits: Vec<RefactoringCommit>,
    /// Shas that carry operations but have no matching commit.
    pub orphans: Vec<(Sha, Vec<RefactoringOperation>)>,
}

/// Attaches detected operations to their commits.
///
/// Output follows the order of `commits`; orphans are sorted by sha. A sha
/// that appears in several projects' commit lists attaches to each of them.
pub fn join_refactorings(
    commits: &[CommitRecord],
    ops: &BTreeMap<Sha, Vec<RefactoringOperation>>,
) -> JoinOutcome {
    let mut used = std::collections::BTreeSet::new();
    let mut refactoring_commits = Vec::new();
    for commit in commits {
        if let Some(list) = ops.get(&commit.sha) {
            if list.is_empty() {
                continue;
            }
            used.insert(&commit.sha);
            refactoring_commits.push(RefactoringCommit {
                commit: commit.clone(),
                operations: list.clone(),
            });
        }
    }
    let orphans = ops
        .iter()
        .filter(|(sha, list)| !used.contains(sha) && !list.is_empty())
        .map(|(sha, list)| (sha.clone(), list.clone()))
        .collect();
    JoinOutcome {
        refactoring_commits,
        orphans,
    }
}
