//! Seeded synthetic corpora for end-to-end checks: commit messages drawn
//! from disjoint per-category vocabularies mixed with shared noise words,
//! plus refactoring operations and Java sources for the file-kind report.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::Category;
use crate::corpus::{CommitRecord, ElementLevel, RefactoringCommit, RefactoringKind, RefactoringOperation, Sha};

const FUNCTIONAL: [&str; 20] = [
    "feature", "endpoint", "dashboard", "checkout", "wizard", "plugin", "widget", "upload", "invoice", "calendar",
    "profile", "signup", "notification", "export", "payment", "cart", "avatar", "timeline", "playlist", "onboard",
];
const BUGFIX: [&str; 20] = [
    "crash", "bug", "regression", "overflow", "deadlock", "exception", "typo", "leak", "hang", "glitch", "error",
    "failure", "npe", "corruption", "race", "segfault", "hotfix", "defect", "wrong", "incorrect",
];
const INTERNAL_QA: [&str; 20] = [
    "coupling", "cohesion", "hierarchy", "inheritance", "module", "package", "layer", "dependency", "interface",
    "abstraction", "encapsulation", "decouple", "modular", "structure", "composition", "delegate", "visibility",
    "namespace", "subsystem", "polymorphism",
];
const EXTERNAL_QA: [&str; 20] = [
    "readability", "performance", "testability", "latency", "throughput", "usability", "readable", "faster",
    "memory", "scalability", "portability", "understandable", "maintainability", "responsive", "efficient",
    "legible", "clarity", "speedup", "reliability", "accessibility",
];
const CODE_SMELL: [&str; 20] = [
    "duplicate", "smell", "god", "blob", "spaghetti", "envy", "clone", "bloat", "dead", "magic", "long",
    "switch", "shotgun", "lazy", "primitive", "obsession", "copypaste", "antipattern", "redundant", "verbose",
];
/// Shared by every category.
pub const NOISE: [&str; 20] = [
    "update", "minor", "cleanup", "project", "file", "work", "version", "build", "commit", "merge", "branch",
    "review", "today", "stuff", "quick", "general", "misc", "part", "step", "final",
];

/// Keyword vocabulary of one category; the five lists are pairwise disjoint.
pub fn vocabulary(category: Category) -> &'static [&'static str] {
    match category {
        Category::Functional => &FUNCTIONAL,
        Category::BugFix => &BUGFIX,
        Category::InternalQA => &INTERNAL_QA,
        Category::ExternalQA => &EXTERNAL_QA,
        Category::CodeSmell => &CODE_SMELL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_messages: usize,
    pub words_per_message: usize,
    /// Share of each message's words drawn from [`NOISE`].
    pub noise_fraction: f64,
    pub n_projects: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_messages: 1000,
            words_per_message: 10,
            noise_fraction: 0.3,
            n_projects: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCommit {
    pub commit: CommitRecord,
    pub label: Category,
}

fn random_sha(rng: &mut impl Rng) -> Sha {
    let bytes: [u8; 20] = rng.gen();
    let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    Sha::parse(&hex).expect("40 hex digits")
}

/// Balanced labels (round-robin, then shuffled); each message has exactly
/// `round(words * noise_fraction)` noise words at random positions.
pub fn generate(config: &SyntheticConfig, seed: u64) -> Vec<SyntheticCommit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<Category> = (0..config.n_messages).map(|i| Category::from_index(i % 5)).collect();
    labels.shuffle(&mut rng);
    let n_noise = (config.words_per_message as f64 * config.noise_fraction).round() as usize;
    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let vocab = vocabulary(label);
            let mut words: Vec<&str> = (0..config.words_per_message)
                .map(|w| {
                    if w < n_noise {
                        NOISE[rng.gen_range(0..NOISE.len())]
                    } else {
                        vocab[rng.gen_range(0..vocab.len())]
                    }
                })
                .collect();
            words.shuffle(&mut rng);
            let mut message = words.join(" ");
            if let Some(first) = message.get_mut(0..1) {
                first.make_ascii_uppercase();
            }
            SyntheticCommit {
                commit: CommitRecord {
                    project_id: format!("project-{:02}", i % config.n_projects.max(1)),
                    sha: random_sha(&mut rng),
                    author_id: format!("dev{} <dev{}@example.org>", i % 7, i % 7),
                    timestamp: 1_500_000_000 + 3600 * i as i64,
                    message,
                    changed_paths: Vec::new(),
                },
                label,
            }
        })
        .collect()
}

/// Production path of class `n` of a project.
pub fn production_path(n: usize) -> String {
    format!("src/main/java/org/example/Widget{n}.java")
}

/// JUnit path of class `n` of a project.
pub fn test_path(n: usize) -> String {
    format!("src/test/java/org/example/Widget{n}Test.java")
}

/// Java source for a path produced by [`production_path`] or [`test_path`].
pub fn java_source(path: &str) -> String {
    let class = path.rsplit('/').next().unwrap_or(path).trim_end_matches(".java");
    if class.ends_with("Test") {
        format!("import org.junit.Test;\n\npublic class {class} {{\n    @Test\n    public void behaves() {{\n    }}\n}}\n")
    } else {
        format!("public class {class} {{\n    public int size() {{\n        return 0;\n    }}\n}}\n")
    }
}

/// Attaches one to three refactoring operations to every commit. Roughly a
/// quarter of the operations touch a test file as well as production code.
pub fn attach_refactorings(commits: &[SyntheticCommit], n_classes: usize, seed: u64) -> Vec<RefactoringCommit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    commits
        .iter()
        .map(|c| {
            let n_ops = rng.gen_range(1..=3);
            let operations = (0..n_ops)
                .map(|_| {
                    let kind = RefactoringKind::ALL[rng.gen_range(0..RefactoringKind::ALL.len())];
                    let class = rng.gen_range(0..n_classes.max(1));
                    let mut involved_paths = vec![production_path(class)];
                    if rng.gen_bool(0.25) {
                        involved_paths.push(test_path(class));
                    }
                    RefactoringOperation {
                        kind,
                        description: format!("{} in class org.example.Widget{class}", kind.name()),
                        element_level: ElementLevel::Class,
                        involved_paths,
                    }
                })
                .collect();
            let mut commit = c.commit.clone();
            commit.changed_paths = Vec::new();
            RefactoringCommit { commit, operations }
        })
        .map(|mut r| {
            let mut paths: Vec<String> = r.operations.iter().flat_map(|o| o.involved_paths.clone()).collect();
            paths.sort();
            paths.dedup();
            r.commit.changed_paths = paths;
            r
        })
        .collect()
}
