//! Command-line pipeline: composable stages with file-based handoffs.
//!
//! Stages communicate exclusively through files in the output directory, so
//! any stage can be re-run or swapped without repeating the others:
//!
//! ```text
//! ingest    -> ingest_log.jsonl
//! slice     -> slices.<method>.jsonl + slice_log.jsonl
//! score     -> scores.<method>.jsonl
//! evaluate  -> report.json + metrics.csv + roc.csv + sfr.csv
//! stats     -> context_stats.json + context_stats.csv
//! run       -> all of the above in order
//! ```
//!
//! Exit codes: 0 success, 2 usage/config error, 3 missing stage input,
//! 4 fatal IO error.  Per-package failures never abort a corpus run; they
//! are recorded in the logs and surface as verdict annotations.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::AssertUnwindSafe;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::catalog::{builtin_catalog, load_catalog, ApiCatalog};
use crate::cpg::{assemble_cpg, build_cfg, build_dfg, parse_file, Cpg};
use crate::evaluation::{
    aggregate, compute_metrics, context_stats, count_tokens, sfr_from_sets, sfr_means,
    ContextItem, ContextStats, MetricsReport, PackageVerdict, SfrMean, SfrRow, TokenMode,
    DEFAULT_TAU,
};
use crate::ingest::{load_corpus, open_package_ref, Label, PackageRef, PackageStatus};
use crate::scoring::{
    build_prompt, RecordedScorer, RemoteScorer, ScoreRecord, Scorer, ScorerConfig, StubScorer,
    BUILTIN_TEMPLATE, SNIPPET_PLACEHOLDER,
};
use crate::slicer::{
    baseline_chunks, static_slice, taint_slice, Slice, SliceBudget, BASELINE_CHUNK_TOKENS,
};

pub const INGEST_LOG: &str = "ingest_log.jsonl";
pub const SLICE_LOG: &str = "slice_log.jsonl";
pub const REPORT_JSON: &str = "report.json";
pub const METRICS_CSV: &str = "metrics.csv";
pub const ROC_CSV: &str = "roc.csv";
pub const SFR_CSV: &str = "sfr.csv";
pub const CONTEXT_STATS_JSON: &str = "context_stats.json";
pub const CONTEXT_STATS_CSV: &str = "context_stats.csv";

pub fn slices_file(method: &str) -> String {
    format!("slices.{method}.jsonl")
}

pub fn scores_file(method: &str) -> String {
    format!("scores.{method}.jsonl")
}

/// Slicing method families selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Static,
    Taint,
    Baseline,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Static, Strategy::Taint, Strategy::Baseline];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Static => "static",
            Strategy::Taint => "taint",
            Strategy::Baseline => "baseline",
        }
    }

    fn parse(s: &str) -> Option<Strategy> {
        match s {
            "static" => Some(Strategy::Static),
            "taint" => Some(Strategy::Taint),
            "baseline" => Some(Strategy::Baseline),
            _ => None,
        }
    }
}

/// Which scorer the score stage uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Stub,
    Remote,
    Recorded,
}

impl ScorerKind {
    fn as_str(&self) -> &'static str {
        match self {
            ScorerKind::Stub => "stub",
            ScorerKind::Remote => "remote",
            ScorerKind::Recorded => "recorded",
        }
    }
}

/// Fully resolved pipeline configuration (flags > config file > defaults).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub strategies: Vec<Strategy>,
    pub budget: SliceBudget,
    pub catalog_path: Option<PathBuf>,
    pub scorer: ScorerKind,
    pub recorded_path: Option<PathBuf>,
    pub template_path: Option<PathBuf>,
    pub scorer_config: ScorerConfig,
    pub tau: f64,
    pub token_mode: TokenMode,
    pub workers: usize,
    pub chunk_tokens: usize,
    /// Keep outputs free of timing values so reruns are byte-identical.
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            manifest: None,
            out_dir: PathBuf::from("out"),
            strategies: Strategy::ALL.to_vec(),
            budget: SliceBudget::fast(),
            catalog_path: None,
            scorer: ScorerKind::Stub,
            recorded_path: None,
            template_path: None,
            scorer_config: ScorerConfig::default(),
            tau: DEFAULT_TAU,
            token_mode: TokenMode::Approx,
            workers: 4,
            chunk_tokens: BASELINE_CHUNK_TOKENS,
            deterministic: true,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    MissingStage { stage: &'static str, path: PathBuf },
    Fatal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::MissingStage { .. } => 3,
            CliError::Fatal(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::MissingStage { stage, path } => write!(
                f,
                "error: missing input from the `{stage}` stage: {} not found; run `{stage}` first",
                path.display()
            ),
            CliError::Fatal(m) => write!(f, "fatal: {m}"),
        }
    }
}

fn fatal_io(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Fatal(format!("{context}: {e}"))
}

// ---------------------------------------------------------------------------
// Argument parsing and config resolution
// ---------------------------------------------------------------------------

/// Optional settings as they appear in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    manifest: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    strategies: Option<Vec<String>>,
    budget: Option<String>,
    budget_seconds: Option<u64>,
    catalog: Option<PathBuf>,
    scorer: Option<String>,
    recorded: Option<PathBuf>,
    template: Option<PathBuf>,
    endpoint_url: Option<String>,
    api_key_env: Option<String>,
    model: Option<String>,
    max_in_flight: Option<usize>,
    retries: Option<u32>,
    request_timeout_ms: Option<u64>,
    tau: Option<f64>,
    token_mode: Option<String>,
    tokenizer_cmd: Option<String>,
    workers: Option<usize>,
    chunk_tokens: Option<usize>,
    deterministic: Option<bool>,
}

#[derive(Debug, Parser)]
#[command(
    name = "npm-slice",
    version,
    about = "Slice npm packages into sensitive code fragments, score them, and aggregate package verdicts"
)]
struct Cli {
    /// TOML or JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus manifest (CSV or JSONL with path,label[,id] rows).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Output directory for all stage files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated subset of: static,taint,baseline.
    #[arg(long, global = true, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    /// Budget preset: fast (3s/package), thorough (180s/package), unlimited.
    #[arg(long, global = true)]
    budget: Option<String>,
    /// Override the per-package wall-clock budget in seconds.
    #[arg(long, global = true)]
    budget_seconds: Option<u64>,
    /// Catalog file (TOML/JSON); defaults to the builtin catalog.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Scorer: stub, remote, or recorded.
    #[arg(long, global = true)]
    scorer: Option<String>,
    /// Recorded-responses file (JSON map) for --scorer recorded.
    #[arg(long, global = true)]
    recorded: Option<PathBuf>,
    /// Prompt template file with a {{SNIPPET}} placeholder.
    #[arg(long, global = true)]
    template: Option<PathBuf>,
    /// Chat-completion endpoint URL for --scorer remote.
    #[arg(long, global = true)]
    endpoint_url: Option<String>,
    /// Environment variable holding the scorer API key.
    #[arg(long, global = true)]
    api_key_env: Option<String>,
    /// Model name sent to the remote scorer.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Concurrent in-flight scoring requests.
    #[arg(long, global = true)]
    max_in_flight: Option<usize>,
    /// Scoring attempts per slice.
    #[arg(long, global = true)]
    retries: Option<u32>,
    /// Per-request timeout in milliseconds.
    #[arg(long, global = true)]
    request_timeout_ms: Option<u64>,
    /// Decision threshold tau in [0,1].
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Token counting: approx or external.
    #[arg(long, global = true)]
    token_mode: Option<String>,
    /// Shell command for --token-mode external (stdin text, stdout count).
    #[arg(long, global = true)]
    tokenizer_cmd: Option<String>,
    /// Package-level parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Baseline chunk size in tokens.
    #[arg(long, global = true)]
    chunk_tokens: Option<usize>,
    /// Keep outputs free of timing values (byte-identical reruns).
    #[arg(long, global = true)]
    deterministic: Option<bool>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Open every package in the manifest and log what was found.
    Ingest,
    /// Build graphs and extract slices for the selected strategies.
    Slice,
    /// Score every slice with the selected scorer.
    Score,
    /// Aggregate verdicts and compute metrics, ROC, and SFR.
    Evaluate,
    /// Context-size statistics per method.
    Stats,
    /// All stages in order.
    Run,
}

fn load_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let ext = path.extension().map(|e| e.to_string_lossy().to_lowercase()).unwrap_or_default();
    if ext == "json" {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("malformed config {}: {e}", path.display())))
    } else {
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("malformed config {}: {e}", path.display())))
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(p) => load_file_config(p)?,
        None => FileConfig::default(),
    };
    let mut cfg = RunConfig::default();

    if let Some(m) = cli.manifest.clone().or(file.manifest) {
        cfg.manifest = Some(m);
    }
    if let Some(o) = cli.out.clone().or(file.out_dir) {
        cfg.out_dir = o;
    }
    if let Some(names) = cli.strategies.clone().or(file.strategies) {
        let mut set = Vec::new();
        for n in &names {
            let s = Strategy::parse(n)
                .ok_or_else(|| CliError::Usage(format!("unknown strategy {n:?}")))?;
            if !set.contains(&s) {
                set.push(s);
            }
        }
        if set.is_empty() {
            return Err(CliError::Usage("at least one strategy is required".to_string()));
        }
        set.sort();
        cfg.strategies = set;
    }
    let preset = cli.budget.clone().or(file.budget);
    if let Some(p) = preset {
        cfg.budget = match p.as_str() {
            "fast" => SliceBudget::fast(),
            "thorough" => SliceBudget::thorough(),
            "unlimited" => SliceBudget::unlimited(),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown budget preset {other:?} (expected fast|thorough|unlimited)"
                )))
            }
        };
    }
    if let Some(secs) = cli.budget_seconds.or(file.budget_seconds) {
        cfg.budget.wall_clock_per_package = Some(std::time::Duration::from_secs(secs));
    }
    if let Some(c) = cli.catalog.clone().or(file.catalog) {
        cfg.catalog_path = Some(c);
    }
    if let Some(s) = cli.scorer.clone().or(file.scorer) {
        cfg.scorer = match s.as_str() {
            "stub" => ScorerKind::Stub,
            "remote" => ScorerKind::Remote,
            "recorded" => ScorerKind::Recorded,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown scorer {other:?} (expected stub|remote|recorded)"
                )))
            }
        };
    }
    if let Some(r) = cli.recorded.clone().or(file.recorded) {
        cfg.recorded_path = Some(r);
    }
    if let Some(t) = cli.template.clone().or(file.template) {
        cfg.template_path = Some(t);
    }
    if let Some(e) = cli.endpoint_url.clone().or(file.endpoint_url) {
        cfg.scorer_config.endpoint_url = Some(e);
    }
    if let Some(k) = cli.api_key_env.clone().or(file.api_key_env) {
        cfg.scorer_config.api_key_env = k;
    }
    if let Some(m) = cli.model.clone().or(file.model) {
        cfg.scorer_config.model = m;
    }
    if let Some(n) = cli.max_in_flight.or(file.max_in_flight) {
        cfg.scorer_config.max_in_flight = n.max(1);
    }
    if let Some(r) = cli.retries.or(file.retries) {
        cfg.scorer_config.retries = r;
    }
    if let Some(ms) = cli.request_timeout_ms.or(file.request_timeout_ms) {
        cfg.scorer_config.request_timeout = std::time::Duration::from_millis(ms);
    }
    if let Some(t) = cli.tau.or(file.tau) {
        if !(0.0..=1.0).contains(&t) {
            return Err(CliError::Usage(format!("tau must be in [0,1], got {t}")));
        }
        cfg.tau = t;
    }
    let token_mode = cli.token_mode.clone().or(file.token_mode);
    let tokenizer_cmd = cli.tokenizer_cmd.clone().or(file.tokenizer_cmd);
    match token_mode.as_deref() {
        None | Some("approx") => {}
        Some("external") => {
            let command = tokenizer_cmd.clone().ok_or_else(|| {
                CliError::Usage("--token-mode external requires --tokenizer-cmd".to_string())
            })?;
            cfg.token_mode = TokenMode::External { command };
        }
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown token mode {other:?} (expected approx|external)"
            )))
        }
    }
    if let Some(w) = cli.workers.or(file.workers) {
        cfg.workers = w.max(1);
    }
    if let Some(c) = cli.chunk_tokens.or(file.chunk_tokens) {
        if c == 0 {
            return Err(CliError::Usage("chunk-tokens must be positive".to_string()));
        }
        cfg.chunk_tokens = c;
    }
    if let Some(d) = cli.deterministic.or(file.deterministic) {
        cfg.deterministic = d;
    }

    if cfg.scorer == ScorerKind::Remote && cfg.scorer_config.endpoint_url.is_none() {
        return Err(CliError::Usage(
            "--scorer remote requires --endpoint-url (or endpoint_url in the config file)"
                .to_string(),
        ));
    }
    if cfg.scorer != ScorerKind::Remote && cfg.scorer_config.endpoint_url.is_some() {
        return Err(CliError::Usage(
            "endpoint_url is only meaningful with --scorer remote".to_string(),
        ));
    }
    if cfg.scorer == ScorerKind::Recorded && cfg.recorded_path.is_none() {
        return Err(CliError::Usage(
            "--scorer recorded requires --recorded <responses.json>".to_string(),
        ));
    }
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

/// Map `f` over `items` with a bounded worker pool.  The result order
/// always equals the input order, whatever the worker count.
pub(crate) fn parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = workers.max(1).min(n);
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let slots: Vec<Mutex<Option<R>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("result slot") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("result slot").expect("worker filled slot"))
        .collect()
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CliError> {
    let mut out = String::new();
    for item in items {
        out.push_str(
            &serde_json::to_string(item)
                .map_err(|e| fatal_io("serializing output", e))?,
        );
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| fatal_io(&format!("writing {}", path.display()), e))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fatal_io(&format!("reading {}", path.display()), e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| {
            fatal_io(&format!("parsing {} line {}", path.display(), i + 1), e)
        })?);
    }
    Ok(out)
}

fn require_stage(path: PathBuf, stage: &'static str) -> Result<PathBuf, CliError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::MissingStage { stage, path })
    }
}

fn ensure_out_dir(config: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| fatal_io(&format!("creating {}", config.out_dir.display()), e))
}

fn load_catalog_from(config: &RunConfig) -> Result<ApiCatalog, CliError> {
    match &config.catalog_path {
        None => Ok(builtin_catalog()),
        Some(p) => load_catalog(p).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn load_template(config: &RunConfig) -> Result<String, CliError> {
    let template = match &config.template_path {
        None => BUILTIN_TEMPLATE.to_string(),
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Usage(format!("cannot read template {}: {e}", p.display())))?,
    };
    match template.matches(SNIPPET_PLACEHOLDER).count() {
        1 => Ok(template),
        0 => Err(CliError::Usage(format!(
            "template has no {SNIPPET_PLACEHOLDER} placeholder"
        ))),
        _ => Err(CliError::Usage(format!(
            "template has more than one {SNIPPET_PLACEHOLDER} placeholder"
        ))),
    }
}

fn build_scorer(config: &RunConfig) -> Result<Box<dyn Scorer>, CliError> {
    match config.scorer {
        ScorerKind::Stub => {
            let catalog = load_catalog_from(config)?;
            Ok(Box::new(StubScorer::new(catalog)))
        }
        ScorerKind::Remote => Ok(Box::new(RemoteScorer::new(config.scorer_config.clone()))),
        ScorerKind::Recorded => {
            let path = config.recorded_path.as_ref().expect("validated in resolve_config");
            let scorer =
                RecordedScorer::load(path).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Box::new(scorer))
        }
    }
}

// ---------------------------------------------------------------------------
// Stage records
// ---------------------------------------------------------------------------

/// One row of `ingest_log.jsonl`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestRecord {
    pub id: String,
    pub origin_path: String,
    pub label: Label,
    pub status: PackageStatus,
    pub n_files: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Per-method slice summary inside a [`SliceLogRecord`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MethodLog {
    pub n_slices: usize,
    pub budget_exhausted: bool,
}

/// One row of `slice_log.jsonl`: everything later stages need about a
/// package without re-opening it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceLogRecord {
    pub package: String,
    pub status: PackageStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub original_loc: usize,
    pub original_tokens: usize,
    /// Catalog-matching (file, line) pairs of the raw package.
    pub feature_lines: Vec<(String, u32)>,
    pub methods: BTreeMap<String, MethodLog>,
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

pub fn cmd_ingest(config: &RunConfig) -> Result<(), CliError> {
    let manifest = config
        .manifest
        .as_ref()
        .ok_or_else(|| CliError::Usage("ingest requires --manifest".to_string()))?;
    let packages =
        load_corpus(manifest).map_err(|e| CliError::Usage(format!("manifest: {e}")))?;
    ensure_out_dir(config)?;

    let records = parallel_map(&packages, config.workers, |pkg| {
        let outcome =
            std::panic::catch_unwind(AssertUnwindSafe(|| open_package_ref(pkg.clone())));
        match outcome {
            Ok(Ok(files)) => IngestRecord {
                id: pkg.id.clone(),
                origin_path: pkg.origin_path.display().to_string(),
                label: pkg.declared_label,
                status: files.status,
                n_files: files.files.len(),
                warnings: files.warnings.clone(),
            },
            Ok(Err(e)) => IngestRecord {
                id: pkg.id.clone(),
                origin_path: pkg.origin_path.display().to_string(),
                label: pkg.declared_label,
                status: PackageStatus::CorruptArchive,
                n_files: 0,
                warnings: vec![format!("open failed: {e}")],
            },
            Err(_) => IngestRecord {
                id: pkg.id.clone(),
                origin_path: pkg.origin_path.display().to_string(),
                label: pkg.declared_label,
                status: PackageStatus::CorruptArchive,
                n_files: 0,
                warnings: vec!["open failed: internal panic".to_string()],
            },
        }
    });
    write_jsonl(&config.out_dir.join(INGEST_LOG), &records)
}

// ---------------------------------------------------------------------------
// slice
// ---------------------------------------------------------------------------

struct PackageSliceOutput {
    log: SliceLogRecord,
    per_method: BTreeMap<&'static str, Vec<Slice>>,
}

fn slice_one_package(
    record: &IngestRecord,
    config: &RunConfig,
    catalog: &ApiCatalog,
) -> PackageSliceOutput {
    let mut log = SliceLogRecord {
        package: record.id.clone(),
        status: record.status,
        error: None,
        original_loc: 0,
        original_tokens: 0,
        feature_lines: Vec::new(),
        methods: BTreeMap::new(),
    };
    let mut per_method: BTreeMap<&'static str, Vec<Slice>> = BTreeMap::new();

    if record.status != PackageStatus::Ok {
        return PackageSliceOutput { log, per_method };
    }
    let pkg = PackageRef {
        id: record.id.clone(),
        origin_path: PathBuf::from(&record.origin_path),
        declared_label: record.label,
    };
    let started = Instant::now();
    let files = match open_package_ref(pkg.clone()) {
        Ok(f) => f,
        Err(e) => {
            log.status = PackageStatus::CorruptArchive;
            log.error = Some(format!("reopen failed: {e}"));
            return PackageSliceOutput { log, per_method };
        }
    };
    log.original_loc = files.files.iter().map(|f| f.line_count as usize).sum();
    log.original_tokens = files
        .files
        .iter()
        .map(|f| count_tokens(&f.text, &config.token_mode).unwrap_or(0))
        .sum();
    log.feature_lines = crate::evaluation::feature_lines(&files, catalog).into_iter().collect();

    if config.strategies.contains(&Strategy::Baseline) {
        let run = baseline_chunks(&files, config.chunk_tokens);
        log.methods.insert(
            "baseline".to_string(),
            MethodLog { n_slices: run.slices.len(), budget_exhausted: run.budget_exhausted },
        );
        per_method.insert("baseline", run.slices);
    }

    let needs_cpg = config.strategies.contains(&Strategy::Static)
        || config.strategies.contains(&Strategy::Taint);
    if !needs_cpg {
        return PackageSliceOutput { log, per_method };
    }

    let built: Result<Cpg, String> = std::panic::catch_unwind(AssertUnwindSafe(|| {
        let mut graphs = Vec::new();
        for f in &files.files {
            let mut fg = parse_file(&f.rel_path, &f.text);
            build_cfg(&mut fg);
            build_dfg(&mut fg);
            graphs.push(fg);
        }
        assemble_cpg(pkg.clone(), graphs)
    }))
    .map_err(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".to_string());
        format!("graph construction panicked: {msg}")
    });
    let cpg = match built {
        Ok(c) => c,
        Err(e) => {
            log.error = Some(e);
            for s in [Strategy::Static, Strategy::Taint] {
                if config.strategies.contains(&s) {
                    log.methods.insert(s.as_str().to_string(), MethodLog::default());
                    per_method.insert(s.as_str(), Vec::new());
                }
            }
            return PackageSliceOutput { log, per_method };
        }
    };

    if config.strategies.contains(&Strategy::Static) {
        let remaining = config.budget.minus(started.elapsed());
        let run = std::panic::catch_unwind(AssertUnwindSafe(|| {
            static_slice(&cpg, catalog, &remaining)
        }));
        match run {
            Ok(run) => {
                log.methods.insert(
                    "static".to_string(),
                    MethodLog { n_slices: run.slices.len(), budget_exhausted: run.budget_exhausted },
                );
                per_method.insert("static", run.slices);
            }
            Err(_) => {
                log.error = Some("static slicing panicked".to_string());
                log.methods.insert("static".to_string(), MethodLog::default());
                per_method.insert("static", Vec::new());
            }
        }
    }
    if config.strategies.contains(&Strategy::Taint) {
        let remaining = config.budget.minus(started.elapsed());
        let run = std::panic::catch_unwind(AssertUnwindSafe(|| {
            taint_slice(&cpg, catalog, &remaining)
        }));
        match run {
            Ok(run) => {
                log.methods.insert(
                    "taint".to_string(),
                    MethodLog { n_slices: run.slices.len(), budget_exhausted: run.budget_exhausted },
                );
                per_method.insert("taint", run.slices);
            }
            Err(_) => {
                log.error = Some("taint slicing panicked".to_string());
                log.methods.insert("taint".to_string(), MethodLog::default());
                per_method.insert("taint", Vec::new());
            }
        }
    }
    PackageSliceOutput { log, per_method }
}

pub fn cmd_slice(config: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(config)?;
    let ingest_path = require_stage(config.out_dir.join(INGEST_LOG), "ingest")?;
    let records: Vec<IngestRecord> = read_jsonl(&ingest_path)?;
    let catalog = load_catalog_from(config)?;

    let outputs = parallel_map(&records, config.workers, |r| {
        slice_one_package(r, config, &catalog)
    });

    let mut logs = Vec::new();
    let mut files: BTreeMap<&'static str, Vec<Slice>> = BTreeMap::new();
    for s in &config.strategies {
        files.insert(
            match s {
                Strategy::Static => "static",
                Strategy::Taint => "taint",
                Strategy::Baseline => "baseline",
            },
            Vec::new(),
        );
    }
    for out in outputs {
        logs.push(out.log);
        for (method, slices) in out.per_method {
            files.entry(method).or_default().extend(slices);
        }
    }
    for (method, slices) in &files {
        write_jsonl(&config.out_dir.join(slices_file(method)), slices)?;
    }
    write_jsonl(&config.out_dir.join(SLICE_LOG), &logs)
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

pub fn cmd_score(config: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(config)?;
    let template = load_template(config)?;
    let scorer = build_scorer(config)?;
    let workers = match config.scorer {
        ScorerKind::Remote => config.workers.min(config.scorer_config.max_in_flight.max(1)),
        _ => config.workers,
    };

    for strategy in &config.strategies {
        let method = strategy.as_str();
        let slices_path = require_stage(config.out_dir.join(slices_file(method)), "slice")?;
        let slices: Vec<Slice> = read_jsonl(&slices_path)?;
        let bundles: Vec<_> = slices
            .iter()
            .map(|s| build_prompt(s, &template).expect("template validated"))
            .collect();
        let mut records: Vec<ScoreRecord> =
            parallel_map(&bundles, workers, |b| scorer.score(b));
        if config.deterministic {
            for r in &mut records {
                r.latency_ms = 0;
            }
        }
        write_jsonl(&config.out_dir.join(scores_file(method)), &records)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

/// Per-method section of the final report.
#[derive(Debug, Serialize, Deserialize)]
pub struct MethodReport {
    pub verdicts: Vec<PackageVerdict>,
    /// Packages that produced zero slices under this method (still counted
    /// as benign in `metrics`, excluded from `metrics_sliced_only`).
    pub no_slice_packages: Vec<String>,
    pub metrics: Option<MetricsReport>,
    pub metrics_sliced_only: Option<MetricsReport>,
}

/// The final evaluation report.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub tau: f64,
    pub scorer: String,
    pub methods: BTreeMap<String, MethodReport>,
    pub sfr_rows: Vec<SfrRow>,
    pub sfr_means: Vec<SfrMean>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unlabeled_packages: Vec<String>,
}

pub fn cmd_evaluate(config: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(config)?;
    let ingest_path = require_stage(config.out_dir.join(INGEST_LOG), "ingest")?;
    let ingest: Vec<IngestRecord> = read_jsonl(&ingest_path)?;
    let slice_log_path = require_stage(config.out_dir.join(SLICE_LOG), "slice")?;
    let slice_log: Vec<SliceLogRecord> = read_jsonl(&slice_log_path)?;
    let log_by_pkg: BTreeMap<String, &SliceLogRecord> =
        slice_log.iter().map(|r| (r.package.clone(), r)).collect();

    let mut package_ids: Vec<String> = ingest.iter().map(|r| r.id.clone()).collect();
    package_ids.sort();
    let labels: BTreeMap<String, Label> =
        ingest.iter().map(|r| (r.id.clone(), r.label)).collect();
    let unlabeled: Vec<String> = ingest
        .iter()
        .filter(|r| r.label == Label::Unlabeled)
        .map(|r| r.id.clone())
        .collect();

    let mut methods = BTreeMap::new();
    let mut sfr_rows: Vec<SfrRow> = Vec::new();
    for strategy in &config.strategies {
        let method = strategy.as_str();
        let slices_path = require_stage(config.out_dir.join(slices_file(method)), "slice")?;
        let slices: Vec<Slice> = read_jsonl(&slices_path)?;
        let scores_path = require_stage(config.out_dir.join(scores_file(method)), "score")?;
        let score_records: Vec<ScoreRecord> = read_jsonl(&scores_path)?;

        let pkg_of_ref: BTreeMap<String, String> =
            slices.iter().map(|i| (i.slice_ref(), i.package.clone())).collect();
        let mut by_pkg: BTreeMap<String, Vec<ScoreRecord>> = BTreeMap::new();
        for r in score_records {
            let Some(pkg) = pkg_of_ref.get(&r.slice_ref) else {
                return Err(CliError::Fatal(format!(
                    "score record {} does not match any slice in {}",
                    r.slice_ref,
                    slices_path.display()
                )));
            };
            by_pkg.entry(pkg.clone()).or_default().push(r);
        }

        let mut verdicts = Vec::new();
        let mut no_slice = Vec::new();
        for pkg in &package_ids {
            let records = by_pkg.get(pkg).map(|v| v.as_slice()).unwrap_or(&[]);
            let mut v = aggregate(pkg, records, config.tau);
            if let Some(log) = log_by_pkg.get(pkg) {
                if log.status != PackageStatus::Ok {
                    v.annotations.push(log.status.as_str().to_string());
                }
                if let Some(e) = &log.error {
                    v.annotations.push(format!("slice_error: {e}"));
                }
                if log.methods.get(method).is_some_and(|m| m.budget_exhausted) {
                    v.annotations.push("budget_exhausted".to_string());
                }
            }
            if records.is_empty() {
                no_slice.push(pkg.clone());
            }
            verdicts.push(v);
        }

        let all_labeled = unlabeled.is_empty();
        let metrics = if all_labeled {
            Some(compute_metrics(&verdicts, &labels).map_err(|e| CliError::Fatal(e.to_string()))?)
        } else {
            None
        };
        let metrics_sliced_only = if all_labeled {
            let subset: Vec<PackageVerdict> = verdicts
                .iter()
                .filter(|v| !no_slice.contains(&v.package))
                .cloned()
                .collect();
            if subset.is_empty() {
                None
            } else {
                Some(
                    compute_metrics(&subset, &labels)
                        .map_err(|e| CliError::Fatal(e.to_string()))?,
                )
            }
        } else {
            None
        };

        // SFR: original feature lines from the slice log, retained lines
        // from the emitted slices.
        let mut lines_by_pkg: BTreeMap<String, BTreeSet<(String, u32)>> = BTreeMap::new();
        for s in &slices {
            let entry = lines_by_pkg.entry(s.package.clone()).or_default();
            for (file, lines) in &s.lines {
                for &l in lines {
                    entry.insert((file.clone(), l));
                }
            }
        }
        for pkg in &package_ids {
            let Some(log) = log_by_pkg.get(pkg) else { continue };
            if log.status != PackageStatus::Ok {
                continue;
            }
            let original: BTreeSet<(String, u32)> =
                log.feature_lines.iter().cloned().collect();
            let sliced = lines_by_pkg.get(pkg).cloned().unwrap_or_default();
            let retained = original.intersection(&sliced).count();
            sfr_rows.push(SfrRow {
                package: pkg.clone(),
                method: method.to_string(),
                n_original: original.len(),
                n_retained: retained,
                sfr_percent: sfr_from_sets(&original, &sliced),
            });
        }

        methods.insert(
            method.to_string(),
            MethodReport { verdicts, no_slice_packages: no_slice, metrics, metrics_sliced_only },
        );
    }

    let report = Report {
        tau: config.tau,
        scorer: config.scorer.as_str().to_string(),
        methods,
        sfr_means: sfr_means(&sfr_rows, &labels),
        sfr_rows,
        unlabeled_packages: unlabeled,
    };

    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| fatal_io("serializing report", e))?;
    std::fs::write(config.out_dir.join(REPORT_JSON), json + "\n")
        .map_err(|e| fatal_io("writing report.json", e))?;
    write_metrics_csv(config, &report)?;
    write_roc_csv(config, &report)?;
    write_sfr_csv(config, &report, &labels)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "null".to_string(),
    }
}

fn write_metrics_csv(config: &RunConfig, report: &Report) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "TP", "TN", "FP", "FN", "accuracy", "precision", "recall", "f1"])
        .map_err(|e| fatal_io("metrics.csv", e))?;
    for (method, m) in &report.methods {
        if let Some(metrics) = &m.metrics {
            w.write_record([
                method.as_str(),
                &metrics.tp.to_string(),
                &metrics.tn.to_string(),
                &metrics.fp.to_string(),
                &metrics.fn_.to_string(),
                &fmt_opt(metrics.accuracy),
                &fmt_opt(metrics.precision),
                &fmt_opt(metrics.recall),
                &fmt_opt(metrics.f1),
            ])
            .map_err(|e| fatal_io("metrics.csv", e))?;
        }
    }
    let data = w.into_inner().map_err(|e| fatal_io("metrics.csv", e))?;
    std::fs::write(config.out_dir.join(METRICS_CSV), data)
        .map_err(|e| fatal_io("writing metrics.csv", e))
}

fn write_roc_csv(config: &RunConfig, report: &Report) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "threshold", "fpr", "tpr"])
        .map_err(|e| fatal_io("roc.csv", e))?;
    for (method, m) in &report.methods {
        if let Some(metrics) = &m.metrics {
            for p in &metrics.roc {
                w.write_record([
                    method.as_str(),
                    &format!("{:.2}", p.threshold),
                    &fmt_opt(p.fpr),
                    &fmt_opt(p.tpr),
                ])
                .map_err(|e| fatal_io("roc.csv", e))?;
            }
        }
    }
    let data = w.into_inner().map_err(|e| fatal_io("roc.csv", e))?;
    std::fs::write(config.out_dir.join(ROC_CSV), data)
        .map_err(|e| fatal_io("writing roc.csv", e))
}

fn write_sfr_csv(
    config: &RunConfig,
    report: &Report,
    labels: &BTreeMap<String, Label>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["package", "label", "method", "n_original", "n_retained", "sfr_percent"])
        .map_err(|e| fatal_io("sfr.csv", e))?;
    for row in &report.sfr_rows {
        let label = labels.get(&row.package).copied().unwrap_or(Label::Unlabeled);
        w.write_record([
            row.package.as_str(),
            label.as_str(),
            row.method.as_str(),
            &row.n_original.to_string(),
            &row.n_retained.to_string(),
            &fmt_opt(row.sfr_percent),
        ])
        .map_err(|e| fatal_io("sfr.csv", e))?;
    }
    let data = w.into_inner().map_err(|e| fatal_io("sfr.csv", e))?;
    std::fs::write(config.out_dir.join(SFR_CSV), data)
        .map_err(|e| fatal_io("writing sfr.csv", e))
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

pub fn cmd_stats(config: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(config)?;
    let slice_log_path = require_stage(config.out_dir.join(SLICE_LOG), "slice")?;
    let slice_log: Vec<SliceLogRecord> = read_jsonl(&slice_log_path)?;

    let mut rows: Vec<ContextStats> = Vec::new();
    for strategy in &config.strategies {
        let method = strategy.as_str();
        let items: Vec<ContextItem> = match strategy {
            // The baseline submits whole packages, so its context size is
            // the raw package size.
            Strategy::Baseline => slice_log
                .iter()
                .filter(|r| r.status == PackageStatus::Ok)
                .map(|r| ContextItem { loc: r.original_loc, tokens: r.original_tokens })
                .collect(),
            _ => {
                let slices_path =
                    require_stage(config.out_dir.join(slices_file(method)), "slice")?;
                let slices: Vec<Slice> = read_jsonl(&slices_path)?;
                slices
                    .iter()
                    .map(|s| {
                        Ok(ContextItem {
                            loc: s.loc(),
                            tokens: count_tokens(&s.snippet, &config.token_mode)
                                .map_err(|e| CliError::Fatal(e.to_string()))?,
                        })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?
            }
        };
        rows.push(context_stats(method, &items));
    }

    let json = serde_json::to_string_pretty(&rows)
        .map_err(|e| fatal_io("serializing context stats", e))?;
    std::fs::write(config.out_dir.join(CONTEXT_STATS_JSON), json + "\n")
        .map_err(|e| fatal_io("writing context_stats.json", e))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "method", "n_items", "loc_mean", "loc_min", "loc_q25", "loc_median", "loc_q75",
        "loc_max", "tok_mean", "tok_min", "tok_q25", "tok_median", "tok_q75", "tok_max",
    ])
    .map_err(|e| fatal_io("context_stats.csv", e))?;
    for r in &rows {
        let cells: Vec<String> = match (&r.loc, &r.tokens) {
            (Some(l), Some(t)) => vec![
                r.method.clone(),
                r.n_items.to_string(),
                format!("{:.2}", l.mean),
                l.min.to_string(),
                l.q25.to_string(),
                l.median.to_string(),
                l.q75.to_string(),
                l.max.to_string(),
                format!("{:.2}", t.mean),
                t.min.to_string(),
                t.q25.to_string(),
                t.median.to_string(),
                t.q75.to_string(),
                t.max.to_string(),
            ],
            _ => {
                let mut v = vec![r.method.clone(), r.n_items.to_string()];
                v.extend(std::iter::repeat("null".to_string()).take(12));
                v
            }
        };
        w.write_record(&cells).map_err(|e| fatal_io("context_stats.csv", e))?;
    }
    let data = w.into_inner().map_err(|e| fatal_io("context_stats.csv", e))?;
    std::fs::write(config.out_dir.join(CONTEXT_STATS_CSV), data)
        .map_err(|e| fatal_io("writing context_stats.csv", e))
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

pub fn cmd_run(config: &RunConfig) -> Result<(), CliError> {
    cmd_ingest(config)?;
    cmd_slice(config)?;
    cmd_score(config)?;
    cmd_evaluate(config)?;
    cmd_stats(config)
}

/// Parse arguments and execute; returns the process exit code.
pub fn run_cli<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let config = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let result = match cli.cmd {
        Cmd::Ingest => cmd_ingest(&config),
        Cmd::Slice => cmd_slice(&config),
        Cmd::Score => cmd_score(&config),
        Cmd::Evaluate => cmd_evaluate(&config),
        Cmd::Stats => cmd_stats(&config),
        Cmd::Run => cmd_run(&config),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<usize> = (0..100).collect();
        let one = parallel_map(&items, 1, |&x| x * 2);
        let eight = parallel_map(&items, 8, |&x| x * 2);
        assert_eq!(one, eight);
        assert_eq!(one[7], 14);
        let empty: Vec<usize> = Vec::new();
        assert!(parallel_map(&empty, 4, |&x: &usize| x).is_empty());
    }

    #[test]
    fn strategy_and_scorer_names_parse() {
        assert_eq!(Strategy::parse("static"), Some(Strategy::Static));
        assert_eq!(Strategy::parse("taint"), Some(Strategy::Taint));
        assert_eq!(Strategy::parse("baseline"), Some(Strategy::Baseline));
        assert_eq!(Strategy::parse("dynamic"), None);
    }

    #[test]
    fn resolve_rejects_bad_values() {
        let parse = |extra: &[&str]| {
            let mut args = vec!["npm-slice"];
            args.extend_from_slice(extra);
            args.push("ingest");
            Cli::try_parse_from(args).map(|cli| resolve_config(&cli))
        };
        assert!(matches!(parse(&["--tau", "1.5"]).unwrap(), Err(CliError::Usage(_))));
        assert!(matches!(
            parse(&["--strategies", "quantum"]).unwrap(),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse(&["--budget", "forever"]).unwrap(),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse(&["--scorer", "remote"]).unwrap(),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse(&["--scorer", "recorded"]).unwrap(),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse(&["--token-mode", "external"]).unwrap(),
            Err(CliError::Usage(_))
        ));
        assert!(parse(&["--tau", "0.8"]).unwrap().is_ok());
    }

    #[test]
    fn config_file_feeds_defaults_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("cfg.toml");
        std::fs::write(&cfg_path, "tau = 0.5\nworkers = 2\nstrategies = [\"static\"]\n")
            .unwrap();
        let cli = Cli::try_parse_from([
            "npm-slice",
            "--config",
            cfg_path.to_str().unwrap(),
            "--tau",
            "0.9",
            "ingest",
        ])
        .unwrap();
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!(cfg.tau, 0.9, "flag overrides config file");
        assert_eq!(cfg.workers, 2, "config file overrides default");
        assert_eq!(cfg.strategies, vec![Strategy::Static]);
    }

    #[test]
    fn missing_stage_error_names_stage_and_exits_3() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig {
            out_dir: dir.path().join("out"),
            ..RunConfig::default()
        };
        match cmd_slice(&config) {
            Err(e @ CliError::MissingStage { stage, .. }) => {
                assert_eq!(stage, "ingest");
                assert_eq!(e.exit_code(), 3);
            }
            other => panic!("expected MissingStage, got {other:?}"),
        }
    }
}
