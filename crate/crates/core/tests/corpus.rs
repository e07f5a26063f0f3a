use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;

use refdoc_core::corpus::{
    compute_corpus_stats, ingest_repository, RepoFiles, join_refactorings, parse_refminer_json, CommitRecord, ElementLevel,
    ProjectRef, RefactoringKind, Sha,
};

fn git(dir: &Path, args: &[&str]) -> String {
    let out = Command::new("git")
        .args(args)
        .current_dir(dir)
        .env("GIT_AUTHOR_NAME", "Dev One")
        .env("GIT_AUTHOR_EMAIL", "Dev@Example.org")
        .env("GIT_COMMITTER_NAME", "Dev One")
        .env("GIT_COMMITTER_EMAIL", "dev@example.org")
        .env("GIT_CONFIG_GLOBAL", "/dev/null")
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .output()
        .expect("git runs");
    assert!(out.status.success(), "git {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn commit_file(dir: &Path, path: &str, body: &str, message: &str, date: i64) {
    let full = dir.join(path);
    std::fs::create_dir_all(full.parent().unwrap()).unwrap();
    std::fs::write(full, body).unwrap();
    git(dir, &["add", "-A"]);
    let d = format!("{date} +0000");
    let out = Command::new("git")
        .args(["commit", "-q", "-m", message])
        .current_dir(dir)
        .env("GIT_AUTHOR_NAME", "Dev One")
        .env("GIT_AUTHOR_EMAIL", "Dev@Example.org")
        .env("GIT_COMMITTER_NAME", "Dev One")
        .env("GIT_COMMITTER_EMAIL", "dev@example.org")
        .env("GIT_AUTHOR_DATE", &d)
        .env("GIT_COMMITTER_DATE", &d)
        .env("GIT_CONFIG_GLOBAL", "/dev/null")
        .output()
        .unwrap();
    assert!(out.status.success());
}

/// main: c1 - c2 ------- merge - c5
///              \       /
/// feature:      c3 - c4
/// side (never merged): c6 off c2
fn fixture_repo(dir: &Path) {
    git(dir, &["init", "-q", "-b", "main"]);
    commit_file(dir, "src/A.java", "class A {}", "Initial import", 1_600_000_000);
    commit_file(dir, "src/B.java", "class B {}", "Add B", 1_600_000_100);
    git(dir, &["checkout", "-q", "-b", "feature"]);
    commit_file(dir, "src/C.java", "class C {}", "Add C", 1_600_000_200);
    commit_file(dir, "src/A.java", "class A { int x; }", "Refactor A", 1_600_000_300);
    git(dir, &["checkout", "-q", "main"]);
    commit_file(dir, "README", "readme", "Docs", 1_600_000_250);
    git(dir, &["merge", "-q", "--no-ff", "-m", "Merge feature", "feature"]);
    commit_file(dir, "src/B.java", "class B { }", "Tidy B\n\nLonger body.", 1_600_000_500);
    git(dir, &["checkout", "-q", "-b", "side", "HEAD~3"]);
    commit_file(dir, "src/D.java", "class D {}", "Side work", 1_600_000_600);
    git(dir, &["checkout", "-q", "main"]);
}

#[test]
fn ingestion_matches_git_rev_list() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fixture_repo(dir);
    let project = ProjectRef::new("demo", dir.to_str().unwrap(), "main");
    let commits: Vec<CommitRecord> = ingest_repository(&project).unwrap().collect::<Result<_, _>>().unwrap();

    let expected: BTreeSet<String> = git(dir, &["rev-list", "main"]).lines().map(String::from).collect();
    let got: BTreeSet<String> = commits.iter().map(|c| c.sha.to_string()).collect();
    assert_eq!(got, expected);
    assert_eq!(commits.len(), 7);

    // parents come first
    let position: BTreeMap<&str, usize> = commits.iter().enumerate().map(|(i, c)| (c.sha.as_str(), i)).collect();
    for c in &commits {
        let parents = git(dir, &["rev-list", "--parents", "-n", "1", c.sha.as_str()]);
        for p in parents.split_whitespace().skip(1) {
            assert!(position[p] < position[c.sha.as_str()]);
        }
    }

    for c in &commits {
        assert_eq!(c.author_id, "dev one <dev@example.org>");
        assert_eq!(c.project_id, "demo");
        let first_parent = format!("{}~1", c.sha);
        let diff = if position[c.sha.as_str()] == 0 {
            git(dir, &["diff-tree", "--root", "--no-commit-id", "--name-only", "-r", c.sha.as_str()])
        } else {
            git(dir, &["diff", "--name-only", &first_parent, c.sha.as_str()])
        };
        let mut paths: Vec<String> = diff.lines().map(String::from).collect();
        paths.sort();
        paths.dedup();
        assert_eq!(c.changed_paths, paths, "{}", c.message);
        let body = git(dir, &["log", "-1", "--format=%B", c.sha.as_str()]);
        assert_eq!(c.message.trim_end(), body.trim_end());
        let ts: i64 = git(dir, &["log", "-1", "--format=%ct", c.sha.as_str()]).trim().parse().unwrap();
        assert_eq!(c.timestamp, ts);
    }
}

#[test]
fn files_at_commit() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fixture_repo(dir);
    let project = ProjectRef::new("demo", dir.to_str().unwrap(), "main");
    let files = RepoFiles::open(&project).unwrap();
    let head = Sha::parse(git(dir, &["rev-parse", "main"]).trim()).unwrap();
    assert_eq!(files.read(&head, "src/B.java").unwrap().unwrap(), b"class B { }");
    assert_eq!(files.read(&head, "src/A.java").unwrap().unwrap(), b"class A { int x; }");
    assert_eq!(files.read(&head, "src/D.java").unwrap(), None);
    let first = Sha::parse(git(dir, &["rev-list", "--max-parents=0", "main"]).trim()).unwrap();
    assert_eq!(files.read(&first, "src/A.java").unwrap().unwrap(), b"class A {}");
}

#[test]
fn unknown_branch_and_missing_repo() {
    let tmp = tempfile::tempdir().unwrap();
    fixture_repo(tmp.path());
    let project = ProjectRef::new("demo", tmp.path().to_str().unwrap(), "trunk");
    assert!(ingest_repository(&project).is_err());
    let missing = ProjectRef::new("x", tmp.path().join("nope").to_str().unwrap(), "main");
    assert!(ingest_repository(&missing).is_err());
}

fn record(sha: &str) -> CommitRecord {
    CommitRecord {
        project_id: "p".into(),
        sha: Sha::parse(sha).unwrap(),
        author_id: "a <a>".into(),
        timestamp: 0,
        message: "m".into(),
        changed_paths: vec![],
    }
}

#[test]
fn refminer_hand_tally() {
    let payload = include_bytes!("fixtures/refminer/three_commits.json");
    let ops = parse_refminer_json(payload).unwrap();
    // the empty commit carries no operations
    assert_eq!(ops.len(), 3);
    let commits = vec![record(&"1".repeat(40)), record(&"2".repeat(40)), record(&"3".repeat(40))];
    let joined = join_refactorings(&commits, &ops);
    assert_eq!(joined.refactoring_commits.len(), 2);
    assert_eq!(joined.orphans.len(), 1);
    assert_eq!(joined.orphans[0].0.as_str(), "4".repeat(40));

    // conservation: every parsed operation is either joined or orphaned
    let parsed: usize = ops.values().map(Vec::len).sum();
    let joined_ops: usize = joined.refactoring_commits.iter().map(|r| r.operations.len()).sum();
    let orphan_ops: usize = joined.orphans.iter().map(|o| o.1.len()).sum();
    assert_eq!((parsed, joined_ops, orphan_ops), (6, 5, 1));

    let stats = compute_corpus_stats(&[], &commits, &joined.refactoring_commits);
    assert_eq!(stats.total_commits, 3);
    assert_eq!(stats.refactoring_commits, 2);
    assert_eq!(stats.refactoring_operations, 5);
    assert_eq!(stats.per_kind_counts[&RefactoringKind::ExtractMethod], 2);
    assert_eq!(stats.per_kind_counts[&RefactoringKind::MoveClass], 1);
    assert_eq!(stats.per_kind_counts[&RefactoringKind::PullUpAttribute], 0);
    assert_eq!(stats.per_element_counts[&ElementLevel::Method], 3);
    assert_eq!(stats.per_element_counts[&ElementLevel::Variable], 1);
    assert_eq!(stats.per_element_counts[&ElementLevel::Class], 1);

    let moved = &joined.refactoring_commits[1].operations[1];
    assert_eq!(moved.involved_paths, vec!["src/main/java/b/Util.java", "src/test/java/b/UtilTest.java"]);
}
