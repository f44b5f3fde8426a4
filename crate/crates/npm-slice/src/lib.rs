//! Static sensitive-code slicing and LLM-assisted malware triage for npm packages.
//!
//! The pipeline turns a directory of npm packages into per-package malware
//! verdicts in five stages:
//!
//! 1. **[`ingest`]** — open package directories or `.tgz` tarballs, collect
//!    JavaScript sources, and log what was usable.
//! 2. **[`cpg`]** — parse each file into a code property graph: statement-level
//!    nodes carrying AST containment, control-flow, and data-flow edges.
//! 3. **[`catalog`]** + **[`slicer`]** — find calls into sensitive APIs
//!    (sources that gather data, sinks that act on it) and cut small,
//!    self-contained code slices connecting them.  Three strategies are
//!    provided: control-flow backward slicing, data-flow taint slicing with a
//!    lexical fallback, and a fixed-size chunking baseline.
//! 4. **[`scoring`]** — ask a language-model judge (remote HTTP endpoint,
//!    recorded replies, or a deterministic offline stub) to rate each slice.
//! 5. **[`evaluation`]** — aggregate slice scores into package verdicts and
//!    compute classification metrics, ROC sweeps, sensitive-feature retention,
//!    and context-size statistics.
//!
//! The [`cli`] module wires the stages into resumable commands; the `npm-slice`
//! binary is a thin argument parser over it.
//!
//! See the `examples/` directory for one runnable walkthrough per capability:
//!
//! ```text
//! cargo run --example build_cpg         # parse a file, inspect nodes and edges
//! cargo run --example catalog_lookup    # query the sensitive-API catalog
//! cargo run --example static_slicing    # control-flow backward slices
//! cargo run --example taint_slicing     # data-flow slices and the fallback path
//! cargo run --example chunking_baseline # fixed-token chunking baseline
//! cargo run --example score_slices      # prompt assembly and the offline stub
//! cargo run --example evaluate_corpus   # verdicts, metrics, ROC, retention
//! cargo run --example end_to_end        # full pipeline on a synthetic corpus
//! ```

pub mod catalog;
pub mod cli;
pub mod cpg;
pub mod evaluation;
pub mod ingest;
pub mod scoring;
pub mod slicer;

pub use catalog::{builtin_catalog, load_catalog, ApiCatalog, ApiPattern, Group, Role};
pub use cli::{run_cli, RunConfig, Strategy};
pub use cpg::{assemble_cpg, Cpg, CpgEdge, CpgNode, EdgeLayer, NodeKind};
pub use evaluation::{
    aggregate, compute_metrics, context_stats, count_tokens, feature_lines, roc_sweep, sfr,
    sfr_means, ContextItem, ContextStats, MetricsReport, PackageVerdict, RocPoint, SfrMean,
    SfrRow, TokenMode, Verdict, DEFAULT_TAU,
};
pub use ingest::{
    corpus_summary, load_corpus, open_package, Label, PackageRef, PackageStatus, SourceFile,
    SourceFileSet,
};
pub use scoring::{
    build_prompt, parse_score, score_all, score_stub, PromptBundle, RecordedScorer,
    RemoteScorer, ScoreRecord, Scorer, ScorerConfig, Scores, StubScorer,
};
pub use slicer::{
    baseline_chunks, static_slice, taint_slice, Slice, SliceBudget, SliceRun, SliceStrategy,
};
