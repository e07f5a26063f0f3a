mod config;
mod data;
mod grid;

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use refdoc_core::classify::{stratified_split_indices, Category, ModelKind};
use refdoc_core::corpus::{
    compute_corpus_stats, ingest_repository, join_refactorings, parse_refminer_json, sample_nonrefactoring,
    CommitRecord, ProjectRef, RefactoringCommit, RepoFiles, DEFAULT_SAMPLE_SIZE,
};
use refdoc_core::features::NgramConfig;
use refdoc_core::pipeline::{self, ClassifierBundle, PipelineConfig};
use refdoc_core::report::{self, Attribution, Format, PatternSignificance, Report};
use refdoc_core::sarpatterns::{label_split, occurrence_vectors, significance_filter, PatternCatalog};
use refdoc_core::stats::{mann_whitney_u_with, Alternative, Method};
use refdoc_core::synthetic::{self, SyntheticConfig};
use refdoc_core::testdetect::{classify_file, scan_java_for_tests, FileKind};
use refdoc_core::classify::mcnemar_counts;

use data::{FileKindRow, MessageRow};

const DEFAULT_SEED: u64 = 42;

/// Mine, classify and report on refactoring documentation in commit histories.
#[derive(Debug, Parser)]
#[command(name = "refdoc", version)]
struct Cli {
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "REFDOC_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest repositories and join detected refactorings to their commits.
    Mine(MineArgs),
    /// Fit a vectorizer and classifier on labeled commit messages.
    Train(TrainArgs),
    /// Label commit messages with a trained model.
    Classify(ClassifyArgs),
    /// Scan messages for self-affirmed refactoring phrases.
    SarScan(SarScanArgs),
    /// Significance tests.
    Stats {
        #[command(subcommand)]
        test: StatsCommand,
    },
    /// Tables and figures.
    Report(ReportArgs),
    /// Classify Java files as production or test code.
    DetectTests(DetectArgs),
    /// Write a synthetic labeled corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Local clones or remote URLs; the last path component names the project.
    repos: Vec<String>,
    /// Directory holding one `<project>.json` detector output per repository.
    #[arg(long, value_name = "DIR")]
    refminer_json: Option<PathBuf>,
    /// Branch to walk; the checked-out HEAD by default.
    #[arg(long, default_value = "")]
    branch: String,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Size of the matched non-refactoring sample.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_SIZE)]
    sample_size: usize,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// CSV with `sha,project_id,message,label` columns.
    #[arg(long, value_name = "CSV")]
    data: Option<PathBuf>,
    #[arg(long, value_name = "KIND")]
    model: Option<String>,
    /// JSON grid; the kind's defaults when absent.
    #[arg(long, value_name = "FILE")]
    grid: Option<PathBuf>,
    /// Where to write the trained model.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Where to write the evaluation summary (JSON).
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    test_fraction: f64,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    ngram_min: usize,
    #[arg(long, default_value_t = 2)]
    ngram_max: usize,
    /// 0 keeps every n-gram.
    #[arg(long, default_value_t = 5000)]
    max_features: usize,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// CSV with `sha,project_id,message` columns; a `label` column enables scoring.
    #[arg(long, value_name = "FILE")]
    commits: Option<PathBuf>,
    /// Output CSV; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PatternSet {
    /// Every catalog pattern.
    All,
    /// Only `refactor*`.
    Refactor,
}

#[derive(Debug, Args)]
struct CatalogArgs {
    /// Tab-separated catalog; the shipped one when absent.
    #[arg(long, value_name = "FILE")]
    catalog: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    patterns: PatternSet,
}

impl CatalogArgs {
    fn load(&self) -> Result<PatternCatalog> {
        Ok(match (self.patterns, &self.catalog) {
            (PatternSet::Refactor, _) => PatternCatalog::keyword_only(),
            (PatternSet::All, None) => PatternCatalog::shipped(),
            (PatternSet::All, Some(path)) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                PatternCatalog::parse(&text, &path.display().to_string())?
            }
        })
    }
}

#[derive(Debug, Args)]
struct SarScanArgs {
    #[command(flatten)]
    catalog: CatalogArgs,
    /// Messages to scan; writes `matches.csv`.
    #[arg(long, value_name = "CSV")]
    commits: Option<PathBuf>,
    /// Refactoring commits (JSON from `mine`); with `--nonrefactoring` runs the significance test.
    #[arg(long, value_name = "FILE")]
    refactorings: Option<PathBuf>,
    #[arg(long, value_name = "CSV")]
    nonrefactoring: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AltArg {
    Greater,
    TwoSided,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// McNemar test on discordant counts or on two trained models.
    Mcnemar(McnemarArgs),
    /// Mann-Whitney U test on two samples.
    Mwu(MwuArgs),
}

#[derive(Debug, Args)]
struct McnemarArgs {
    /// Rows only the first model gets right.
    #[arg(long)]
    b: Option<usize>,
    /// Rows only the second model gets right.
    #[arg(long)]
    c: Option<usize>,
    #[arg(long, value_name = "FILE")]
    model_a: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    model_b: Option<PathBuf>,
    /// Labeled CSV the models were trained on; the held-out split is recomputed.
    #[arg(long, value_name = "CSV")]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    test_fraction: f64,
}

#[derive(Debug, Args)]
struct MwuArgs {
    /// Comma-separated sample.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Vec<f64>,
    #[arg(long, value_enum, default_value = "two-sided")]
    alternative: AltArg,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportKind {
    Categories,
    Prodtest,
    Labelsplit,
}

#[derive(Debug, Args)]
struct ReportArgs {
    kind: Option<ReportKind>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Any of csv, json, plot.
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    format: Vec<Format>,
    /// CSV with `sha` and `label` columns.
    #[arg(long, value_name = "CSV")]
    labels: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    refactorings: Option<PathBuf>,
    #[arg(long, value_name = "CSV")]
    file_kinds: Option<PathBuf>,
    /// How an operation touching both kinds of file is attributed: any or majority.
    #[arg(long, default_value = "any")]
    attribution: Attribution,
    #[command(flatten)]
    catalog: CatalogArgs,
}

#[derive(Debug, Args)]
struct DetectArgs {
    paths: Vec<PathBuf>,
    /// Output CSV; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    messages: usize,
    #[arg(long, default_value_t = 10)]
    words: usize,
    #[arg(long, default_value_t = 0.3)]
    noise: f64,
    #[arg(long, default_value_t = 10)]
    projects: usize,
    /// Distinct classes the synthetic refactorings touch.
    #[arg(long, default_value_t = 50)]
    classes: usize,
}

fn need<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| anyhow!("missing required --{flag}"))
}

fn parse_args() -> Result<Cli> {
    let args: Vec<OsString> = std::env::args_os().collect();
    let args = match config::config_path(&args) {
        Some(file) => config::merge(&Cli::command(), args, Path::new(&file))?,
        None => args,
    };
    Ok(Cli::try_parse_from(args).unwrap_or_else(|e| e.exit()))
}

fn main() -> Result<()> {
    let cli = parse_args()?;
    let seed = cli.seed;
    match cli.command {
        Command::Mine(a) => mine(&a, seed),
        Command::Train(a) => train(&a, seed),
        Command::Classify(a) => classify(&a),
        Command::SarScan(a) => sar_scan(&a),
        Command::Stats { test: StatsCommand::Mcnemar(a) } => mcnemar(&a, seed),
        Command::Stats { test: StatsCommand::Mwu(a) } => mwu(&a),
        Command::Report(a) => report(&a),
        Command::DetectTests(a) => detect_tests(&a),
        Command::Synth(a) => synth(&a, seed),
    }
}

fn project_name(origin: &str) -> String {
    let trimmed = origin.trim_end_matches('/').trim_end_matches(".git");
    trimmed.rsplit(['/', '\\']).next().unwrap_or(trimmed).to_owned()
}

/// Kind of every involved path, read at the first commit that touches it.
fn file_kinds_for(project: &ProjectRef, refcommits: &[RefactoringCommit]) -> Result<Vec<FileKindRow>> {
    let files = RepoFiles::open(project)?;
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    for r in refcommits {
        for path in r.operations.iter().flat_map(|op| &op.involved_paths) {
            if !seen.insert(path.clone()) {
                continue;
            }
            let source = if path.ends_with(".java") {
                files.read(&r.commit.sha, path)?.and_then(|b| String::from_utf8(b).ok())
            } else {
                None
            };
            let (kind, evidence) = match source {
                Some(src) => {
                    let kind = classify_file(path, &src);
                    let evidence = if kind == FileKind::Test { evidence_field(&src) } else { String::new() };
                    (kind, evidence)
                }
                None => (FileKind::Unparseable, String::new()),
            };
            rows.push(FileKindRow {
                project_id: project.project_id.clone(),
                path: path.clone(),
                kind,
                evidence,
            });
        }
    }
    Ok(rows)
}

fn evidence_field(source: &str) -> String {
    scan_java_for_tests(source)
        .evidence
        .iter()
        .map(|e| {
            let reason = serde_json::to_value(e.reason).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            format!("{reason}:{}:{}", e.line, e.method)
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn mine(a: &MineArgs, seed: u64) -> Result<()> {
    let out = need(&a.out, "out")?;
    let json_dir = need(&a.refminer_json, "refminer-json")?;
    if a.repos.is_empty() {
        bail!("no repositories given");
    }
    std::fs::create_dir_all(out)?;
    let mut projects = Vec::new();
    let mut commits = Vec::new();
    let mut refcommits = Vec::new();
    let mut orphans = Vec::new();
    let mut kinds = Vec::new();
    for origin in &a.repos {
        let project = ProjectRef::new(project_name(origin), origin.clone(), a.branch.clone());
        let mine: Vec<CommitRecord> = ingest_repository(&project)?.collect::<Result<_, _>>()?;
        let json_path = json_dir.join(format!("{}.json", project.project_id));
        let ops = match std::fs::read(&json_path) {
            Ok(bytes) => parse_refminer_json(&bytes).with_context(|| format!("parsing {}", json_path.display()))?,
            Err(e) => {
                eprintln!("warning: {}: {e}; no refactorings for {}", json_path.display(), project.project_id);
                BTreeMap::new()
            }
        };
        let joined = join_refactorings(&mine, &ops);
        kinds.extend(file_kinds_for(&project, &joined.refactoring_commits)?);
        eprintln!(
            "{}: {} commits, {} refactoring commits, {} orphaned shas",
            project.project_id,
            mine.len(),
            joined.refactoring_commits.len(),
            joined.orphans.len()
        );
        commits.extend(mine);
        refcommits.extend(joined.refactoring_commits);
        orphans.extend(joined.orphans.into_iter().map(|(sha, ops)| (project.project_id.clone(), sha, ops)));
        projects.push(project);
    }
    data::write_commits(&out.join("commits.csv"), &commits)?;
    data::write_json(&out.join("refactorings.json"), &refcommits)?;
    data::write_json(&out.join("orphans.json"), &orphans)?;
    data::write_file_kinds(&out.join("file_kinds.csv"), &kinds)?;
    data::write_json(&out.join("corpus_stats.json"), &compute_corpus_stats(&projects, &commits, &refcommits))?;
    match sample_nonrefactoring(&commits, &refcommits, seed, a.sample_size) {
        Ok(sample) => data::write_commits(&out.join("nonrefactoring.csv"), &sample)?,
        Err(e) => eprintln!("warning: no non-refactoring sample: {e}"),
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct TrainSummary<'a> {
    model: ModelKind,
    params: &'a refdoc_core::classify::Hyperparams,
    cv_micro_f1: Option<f64>,
    test_micro_f1: f64,
    test_macro_f1: f64,
    train_size: usize,
    test_size: usize,
    evaluation: &'a refdoc_core::classify::EvalReport,
}

fn train(a: &TrainArgs, seed: u64) -> Result<()> {
    let data_path = need(&a.data, "data")?;
    let kind: ModelKind = need(&a.model, "model")?.parse()?;
    let out = need(&a.out, "out")?;
    let grid = match &a.grid {
        Some(path) => grid::parse(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
            .with_context(|| format!("grid {}", path.display()))?,
        None => Vec::new(),
    };
    let max_features = (a.max_features > 0).then_some(a.max_features);
    let config = PipelineConfig {
        ngrams: NgramConfig::new(a.ngram_min, a.ngram_max, max_features)?,
        test_fraction: a.test_fraction,
        folds: a.folds,
    };
    let rows = data::read_messages(data_path)?;
    let (commits, labels) = data::labeled_commits(&rows)?;
    let outcome = pipeline::run(&commits, &labels, kind, &grid, &config, seed)?;
    write_file(out, &outcome.bundle.to_json())?;
    let summary = TrainSummary {
        model: kind,
        params: &outcome.params,
        cv_micro_f1: outcome.cv_score,
        test_micro_f1: outcome.test_report.micro_f1,
        test_macro_f1: outcome.test_report.macro_f1(),
        train_size: outcome.train_indices.len(),
        test_size: outcome.test_indices.len(),
        evaluation: &outcome.test_report,
    };
    if let Some(path) = &a.report {
        data::write_json(path, &summary)?;
    }
    println!("{kind}: held-out micro-F1 {:.4} on {} commits", summary.test_micro_f1, summary.test_size);
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn load_bundle(path: &Path) -> Result<ClassifierBundle> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ClassifierBundle::from_json(&text).with_context(|| format!("loading model {}", path.display()))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn classify(a: &ClassifyArgs) -> Result<()> {
    let bundle = load_bundle(need(&a.model, "model")?)?;
    let rows = data::read_messages(need(&a.commits, "commits")?)?;
    let messages: Vec<String> = rows.iter().map(|r| r.message.clone()).collect();
    let predicted = bundle.classify_all(&messages);
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["sha", "project_id", "label"])?;
    for (row, label) in rows.iter().zip(&predicted) {
        w.write_record([row.sha.as_str(), row.project_id.as_str(), label.name()])?;
    }
    w.flush()?;
    let truth: Vec<Option<Category>> = rows.iter().map(data::label_of).collect::<Result<_>>()?;
    if let Some(truth) = truth.into_iter().collect::<Option<Vec<_>>>() {
        if !truth.is_empty() {
            let report = refdoc_core::classify::evaluate_predictions(&truth, &predicted);
            eprintln!("micro-F1 {:.4} on {} labeled commits", report.micro_f1, truth.len());
        }
    }
    Ok(())
}

fn sar_scan(a: &SarScanArgs) -> Result<()> {
    let out = need(&a.out, "out")?;
    let catalog = a.catalog.load()?;
    std::fs::create_dir_all(out)?;
    let mut did = false;
    if let Some(path) = &a.commits {
        let rows = data::read_messages(path)?;
        let matcher = catalog.matcher();
        let mut w = csv::Writer::from_path(out.join("matches.csv"))?;
        w.write_record(["sha", "project_id", "pattern", "template", "scope"])?;
        let mut hits = 0usize;
        for row in &rows {
            for i in matcher.scan(&row.message) {
                let p = &catalog.patterns[i];
                w.write_record([row.sha.as_str(), row.project_id.as_str(), &i.to_string(), &p.text, p.scope.name()])?;
                hits += 1;
            }
        }
        w.flush()?;
        eprintln!("{hits} pattern matches in {} messages", rows.len());
        did = true;
    }
    match (&a.refactorings, &a.nonrefactoring) {
        (Some(r), Some(n)) => {
            let refcommits = data::read_refactorings(r)?;
            let nonref = read_any_commits(n)?;
            let table = occurrence_vectors(&catalog, &refcommits, &nonref);
            let (flagged, results) = significance_filter(&catalog, &table, a.alpha)?;
            let rows: Vec<PatternSignificance> = flagged
                .patterns
                .iter()
                .zip(&table.pairs)
                .zip(&results)
                .map(|((p, (x, y)), test)| PatternSignificance {
                    pattern: p.text.clone(),
                    refactoring_matches: x.per_project.iter().sum(),
                    non_refactoring_matches: y.per_project.iter().sum(),
                    test: *test,
                    significant: p.significant == Some(true),
                })
                .collect();
            let significant = rows.iter().filter(|r| r.significant).count();
            Report::Significance(rows).emit(Format::Csv, out)?;
            let mut tsv = String::from("# patterns significant at the chosen alpha\n");
            for p in flagged.patterns.iter().filter(|p| p.significant == Some(true)) {
                tsv.push_str(&format!("{}\t{}\n", p.scope.name(), p.text));
            }
            write_file(&out.join("significant_catalog.tsv"), &tsv)?;
            eprintln!("{significant} of {} patterns significant at alpha {}", flagged.len(), a.alpha);
            did = true;
        }
        (None, None) => {}
        _ => bail!("--refactorings and --nonrefactoring go together"),
    }
    if !did {
        bail!("nothing to scan: give --commits and/or --refactorings with --nonrefactoring");
    }
    Ok(())
}

/// Accepts both the full commit CSV written by `mine` and a plain message CSV.
fn read_any_commits(path: &Path) -> Result<Vec<CommitRecord>> {
    data::read_commits(path).or_else(|_| data::read_messages(path)?.iter().map(data::to_commit).collect())
}

fn mcnemar(a: &McnemarArgs, seed: u64) -> Result<()> {
    let result = match (a.b, a.c) {
        (Some(b), Some(c)) => mcnemar_counts(b, c),
        (None, None) => {
            let bundle_a = load_bundle(need(&a.model_a, "model-a")?)?;
            let bundle_b = load_bundle(need(&a.model_b, "model-b")?)?;
            let rows = data::read_messages(need(&a.data, "data")?)?;
            let (_, labels) = data::labeled_commits(&rows)?;
            let (_, test) = stratified_split_indices(&labels, a.test_fraction, seed)?;
            let messages: Vec<String> = test.iter().map(|&i| rows[i].message.clone()).collect();
            let pa = bundle_a.classify_all(&messages);
            let pb = bundle_b.classify_all(&messages);
            let (mut b, mut c) = (0, 0);
            for ((&i, x), y) in test.iter().zip(&pa).zip(&pb) {
                match (*x == labels[i], *y == labels[i]) {
                    (true, false) => b += 1,
                    (false, true) => c += 1,
                    _ => {}
                }
            }
            mcnemar_counts(b, c)
        }
        _ => bail!("--b and --c go together"),
    };
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

fn mwu(a: &MwuArgs) -> Result<()> {
    let alternative = match a.alternative {
        AltArg::Greater => Alternative::Greater,
        AltArg::TwoSided => Alternative::TwoSided,
    };
    let method = match a.method {
        MethodArg::Auto => None,
        MethodArg::Exact => Some(Method::Exact),
        MethodArg::Normal => Some(Method::NormalApprox),
    };
    let result = mann_whitney_u_with(&a.x, &a.y, alternative, method)?;
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

/// Prefixes paths with their project so identical paths in different
/// repositories stay apart.
fn qualified(project: &str, path: &str) -> String {
    format!("{project}/{path}")
}

fn report(a: &ReportArgs) -> Result<()> {
    let kind = need(&a.kind, "kind (categories, prodtest or labelsplit)")?;
    let out = need(&a.out, "out")?;
    let report = match kind {
        ReportKind::Categories => {
            let labels: Vec<Category> = data::read_labels(need(&a.labels, "labels")?)?.into_values().collect();
            Report::Categories(report::category_distribution(&labels))
        }
        ReportKind::Prodtest => {
            let labels = data::read_labels(need(&a.labels, "labels")?)?;
            let mut refcommits = data::read_refactorings(need(&a.refactorings, "refactorings")?)?;
            for r in &mut refcommits {
                let project = r.commit.project_id.clone();
                for op in &mut r.operations {
                    for p in &mut op.involved_paths {
                        *p = qualified(&project, p);
                    }
                }
            }
            let kinds: BTreeMap<String, FileKind> = data::read_file_kinds(need(&a.file_kinds, "file-kinds")?)?
                .into_iter()
                .map(|r| (qualified(&r.project_id, &r.path), r.kind))
                .collect();
            let matrix = report::prod_test_matrix(&refcommits, &labels, &kinds, a.attribution)?;
            if matrix.skipped > 0 {
                eprintln!("{} operations touch no classifiable file", matrix.skipped);
            }
            Report::ProdTest(matrix)
        }
        ReportKind::Labelsplit => {
            let refcommits = data::read_refactorings(need(&a.refactorings, "refactorings")?)?;
            Report::LabelSplit(label_split(&refcommits, &a.catalog.load()?))
        }
    };
    for format in &a.format {
        let path = report.emit(*format, out)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn detect_tests(a: &DetectArgs) -> Result<()> {
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["path", "kind", "evidence"])?;
    for path in &a.paths {
        let source = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let name = path.to_string_lossy();
        let (kind, evidence) = match String::from_utf8(source) {
            Ok(src) => {
                let kind = classify_file(&name, &src);
                (kind, if kind == FileKind::Test { evidence_field(&src) } else { String::new() })
            }
            Err(_) => (FileKind::Unparseable, String::new()),
        };
        w.write_record([name.as_ref(), kind.name(), &evidence])?;
    }
    w.flush()?;
    Ok(())
}

fn synth(a: &SynthArgs, seed: u64) -> Result<()> {
    let out = need(&a.out, "out")?;
    std::fs::create_dir_all(out)?;
    let config = SyntheticConfig {
        n_messages: a.messages,
        words_per_message: a.words,
        noise_fraction: a.noise,
        n_projects: a.projects,
    };
    let commits = synthetic::generate(&config, seed);
    let rows: Vec<MessageRow> = commits
        .iter()
        .map(|c| MessageRow {
            sha: c.commit.sha.to_string(),
            project_id: c.commit.project_id.clone(),
            message: c.commit.message.clone(),
            label: Some(c.label.name().to_owned()),
        })
        .collect();
    data::write_messages(&out.join("labeled.csv"), &rows)?;
    let refcommits = synthetic::attach_refactorings(&commits, a.classes, seed);
    data::write_json(&out.join("refactorings.json"), &refcommits)?;
    let mut seen = BTreeSet::new();
    let mut kinds = Vec::new();
    for r in &refcommits {
        for path in &r.commit.changed_paths {
            if seen.insert((r.commit.project_id.clone(), path.clone())) {
                let src = synthetic::java_source(path);
                let kind = classify_file(path, &src);
                kinds.push(FileKindRow {
                    project_id: r.commit.project_id.clone(),
                    path: path.clone(),
                    kind,
                    evidence: if kind == FileKind::Test { evidence_field(&src) } else { String::new() },
                });
            }
        }
    }
    kinds.sort_by(|x, y| (&x.project_id, &x.path).cmp(&(&y.project_id, &y.path)));
    data::write_file_kinds(&out.join("file_kinds.csv"), &kinds)?;
    eprintln!("{} messages, {} refactoring commits in {}", rows.len(), refcommits.len(), out.display());
    Ok(())
}
