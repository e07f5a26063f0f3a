use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn refdoc(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_refdoc"));
    cmd.args(args).current_dir(dir).env_remove("REFDOC_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("refdoc runs")
}

fn ok(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> String {
    let out = refdoc(dir, args, env);
    assert!(out.status.success(), "refdoc {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn synth_labels(dir: &Path, extra: &[&str], env: &[(&str, &str)]) -> String {
    let mut args = vec!["synth", "--out", "s", "--messages", "20"];
    args.extend_from_slice(extra);
    ok(dir, &args, env);
    fs::read_to_string(dir.join("s/labeled.csv")).unwrap()
}

#[test]
fn seed_precedence_is_flag_config_env_default() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("seven.conf"), "# test config\nseed = 7\n").unwrap();
    let default = synth_labels(d, &[], &[]);
    assert_eq!(default, synth_labels(d, &["--seed", "42"], &[]));
    let seven = synth_labels(d, &["--seed", "7"], &[]);
    assert_ne!(default, seven);
    assert_eq!(seven, synth_labels(d, &[], &[("REFDOC_SEED", "7")]));
    assert_eq!(seven, synth_labels(d, &["--config", "seven.conf"], &[("REFDOC_SEED", "9")]));
    assert_eq!(default, synth_labels(d, &["--config", "seven.conf", "--seed", "42"], &[]));
    assert_eq!(default, synth_labels(d, &["--config=seven.conf", "--seed=42"], &[]));
}

#[test]
fn config_supplies_subcommand_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("run.conf"), "out = from-config\nmessages = 15\nnoise = 0.5\nformat = json\n").unwrap();
    ok(d, &["synth", "--config", "run.conf"], &[]);
    let rows = fs::read_to_string(d.join("from-config/labeled.csv")).unwrap();
    assert_eq!(rows.lines().count(), 16);
    ok(d, &["synth", "--config", "run.conf", "--messages", "5", "--out", "flag"], &[]);
    assert_eq!(fs::read_to_string(d.join("flag/labeled.csv")).unwrap().lines().count(), 6);
    assert!(!d.join("flag").join("categories.json").exists());

    // keys for other subcommands are ignored; `format` applies to report
    ok(d, &["report", "categories", "--labels", "from-config/labeled.csv", "--out", "r", "--config", "run.conf"], &[]);
    assert!(d.join("r/categories.json").exists());
    assert!(!d.join("r/categories.csv").exists());
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.conf"), "just words\n").unwrap();
    let out = refdoc(dir.path(), &["synth", "--out", "x", "--config", "bad.conf"], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("key = value"));
}

#[test]
fn missing_required_flag_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = refdoc(dir.path(), &["train", "--model", "mnb"], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--data"));
}

#[test]
fn stats_subcommands_print_json() {
    let dir = tempfile::tempdir().unwrap();
    let mwu: serde_json::Value =
        serde_json::from_str(&ok(dir.path(), &["stats", "mwu", "--x", "5,6,7", "--y", "1,2,3", "--alternative", "greater"], &[])).unwrap();
    assert_eq!(mwu["p_value"], 0.05);
    assert_eq!(mwu["u_statistic"], 9.0);
    let mc: serde_json::Value = serde_json::from_str(&ok(dir.path(), &["stats", "mcnemar", "--b", "10", "--c", "0"], &[])).unwrap();
    assert_eq!(mc["p_value"], 0.001953125);
}

#[test]
fn train_classify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--out", "s", "--messages", "200"], &[]);
    fs::write(d.join("grid.json"), r#"{"kind": "multinomial_nb", "alpha": [0.1, 1.0]}"#).unwrap();
    ok(
        d,
        &["train", "--data", "s/labeled.csv", "--model", "mnb", "--grid", "grid.json", "--folds", "3", "--out", "m.json", "--report", "eval.json"],
        &[],
    );
    let eval: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("eval.json")).unwrap()).unwrap();
    assert_eq!(eval["test_size"], 50);
    assert!(eval["cv_micro_f1"].as_f64().unwrap() > 0.9);
    let labels = ok(d, &["classify", "--model", "m.json", "--commits", "s/labeled.csv"], &[]);
    let mut lines = labels.lines();
    assert_eq!(lines.next(), Some("sha,project_id,label"));
    assert_eq!(lines.count(), 200);
}

#[test]
fn detect_tests_labels_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("ParserTest.java"), "class ParserTest {\n  @Test\n  public void parses() {}\n}\n").unwrap();
    fs::write(d.join("Parser.java"), "class Parser {\n  public void testMode() {}\n}\n").unwrap();
    let out = ok(d, &["detect-tests", "ParserTest.java", "Parser.java"], &[]);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[1], "ParserTest.java,test,test_annotation:3:parses");
    assert_eq!(rows[2], "Parser.java,production,");
}

fn git(dir: &Path, args: &[&str]) {
    let out = Command::new("git")
        .args(args)
        .current_dir(dir)
        .env("GIT_AUTHOR_NAME", "Dev")
        .env("GIT_AUTHOR_EMAIL", "dev@example.org")
        .env("GIT_COMMITTER_NAME", "Dev")
        .env("GIT_COMMITTER_EMAIL", "dev@example.org")
        .env("GIT_CONFIG_GLOBAL", "/dev/null")
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .env("GIT_AUTHOR_DATE", "2020-01-01T00:00:00Z")
        .env("GIT_COMMITTER_DATE", "2020-01-01T00:00:00Z")
        .output()
        .expect("git runs");
    assert!(out.status.success(), "git {args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn head(dir: &Path) -> String {
    let out = Command::new("git").args(["rev-parse", "HEAD"]).current_dir(dir).output().unwrap();
    String::from_utf8(out.stdout).unwrap().trim().to_owned()
}

#[test]
fn mine_joins_refactorings_and_classifies_files() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("widgets");
    fs::create_dir_all(repo.join("src")).unwrap();
    git(&repo, &["init", "-q", "-b", "main"]);
    fs::write(repo.join("src/Widget.java"), "class Widget {\n  void run() {}\n}\n").unwrap();
    git(&repo, &["add", "."]);
    git(&repo, &["commit", "-q", "-m", "Add widget and its parser"]);
    fs::write(repo.join("src/WidgetTest.java"), "public class WidgetTest {\n  @Test\n  public void runs() {}\n}\n").unwrap();
    fs::write(repo.join("src/Widget.java"), "class Widget {\n  void run() { helper(); }\n  void helper() {}\n}\n").unwrap();
    git(&repo, &["add", "."]);
    git(&repo, &["commit", "-q", "-m", "Refactor run and add tests"]);
    let sha = head(&repo);

    let json = dir.path().join("rm");
    fs::create_dir_all(&json).unwrap();
    fs::write(
        json.join("widgets.json"),
        format!(
            r#"{{"commits": [{{"sha1": "{sha}", "url": "", "refactorings": [
                {{"type": "Extract Method", "description": "Extract Method helper() from run()",
                  "leftSideLocations": [{{"filePath": "src/Widget.java"}}],
                  "rightSideLocations": [{{"filePath": "src/Widget.java"}}, {{"filePath": "src/WidgetTest.java"}}]}}]}}]}}"#
        ),
    )
    .unwrap();
    ok(dir.path(), &["mine", "widgets", "--refminer-json", "rm", "--out", "out", "--sample-size", "1"], &[]);
    let out = dir.path().join("out");
    let commits = csv::Reader::from_path(out.join("commits.csv")).unwrap().records().count();
    assert_eq!(commits, 2);
    let refs: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("refactorings.json")).unwrap()).unwrap();
    assert_eq!(refs.as_array().unwrap().len(), 1);
    assert_eq!(refs[0]["commit"]["sha"], sha);
    let kinds = fs::read_to_string(out.join("file_kinds.csv")).unwrap();
    assert!(kinds.contains("widgets,src/Widget.java,production,"));
    assert!(kinds.contains("widgets,src/WidgetTest.java,test,test_annotation:3:runs"));
    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("corpus_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["total_commits"], 2);
    assert_eq!(stats["refactoring_operations"], 1);
    let sample = fs::read_to_string(out.join("nonrefactoring.csv")).unwrap();
    assert!(sample.contains("Add widget and its parser"));

    // the sampled corpus feeds the significance scan
    fs::write(dir.path().join("cat.tsv"), "generic\tRefactor*\ngeneric\tAdd*\n").unwrap();
    ok(
        dir.path(),
        &["sar-scan", "--catalog", "cat.tsv", "--refactorings", "out/refactorings.json", "--nonrefactoring", "out/nonrefactoring.csv", "--out", "sar"],
        &[],
    );
    let sig = fs::read_to_string(dir.path().join("sar/significance.csv")).unwrap();
    assert_eq!(sig.lines().count(), 3);
    assert!(sig.lines().nth(1).unwrap().starts_with("Refactor*,1,0,"));
}
