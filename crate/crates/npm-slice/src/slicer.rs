//! Sensitive code slice extraction.
//!
//! Three strategies produce [`Slice`] values over a package:
//!
//! * [`static_slice`] — for every catalog sink, walk the control-flow graph
//!   backwards and keep everything visited, provided some catalog source was
//!   reached.  Control-flow reachability, no data-flow precision.
//! * [`taint_slice`] — per (source group, sink group) pair, extract explicit
//!   data-flow paths from sources to sinks; when a pair has matching calls
//!   but no provable flow, fall back to a heuristic that walks up the AST
//!   from the sink looking for an enclosing source call and snips the
//!   region between the two.
//! * [`baseline_chunks`] — no analysis at all: split each file into
//!   consecutive runs of at most `max_tokens` lexical tokens.
//!
//! All strategies respect a [`SliceBudget`] (wall clock, node caps, slice
//! caps) and mark work they had to cut short.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{ApiCatalog, Group};
use crate::cpg::{Cpg, CpgNode, NodeKind};
use crate::ingest::SourceFileSet;

/// How a slice was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceStrategy {
    Static,
    TaintFlow,
    TaintFallback,
    BaselineChunk,
}

impl SliceStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            SliceStrategy::Static => "static",
            SliceStrategy::TaintFlow => "taint_flow",
            SliceStrategy::TaintFallback => "taint_fallback",
            SliceStrategy::BaselineChunk => "baseline_chunk",
        }
    }

    /// The family name used for output files and method comparisons:
    /// flow and fallback slices are both part of the `taint` method.
    pub fn method(self) -> &'static str {
        match self {
            SliceStrategy::Static => "static",
            SliceStrategy::TaintFlow | SliceStrategy::TaintFallback => "taint",
            SliceStrategy::BaselineChunk => "baseline",
        }
    }
}

/// A concrete source or sink occurrence a slice is anchored to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub file: String,
    pub line: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub callee: Option<String>,
}

impl Anchor {
    fn of(node: &CpgNode) -> Anchor {
        let callee = node
            .callee_name
            .clone()
            .or_else(|| node.prop_path.as_ref().map(|p| p.rsplit('.').next().unwrap_or(p).to_string()));
        Anchor { file: node.file.clone(), line: node.line, callee }
    }
}

/// One sensitive code slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub package: String,
    pub strategy: SliceStrategy,
    /// Position within (package, strategy); assigned after final ordering.
    pub index: usize,
    /// Graph node ids the slice covers, ascending (empty for baseline chunks).
    pub node_ids: Vec<u32>,
    /// Per-file sorted unique line numbers (1-based).
    pub lines: BTreeMap<String, Vec<u32>>,
    /// Verbatim source lines in (file, line) order.
    pub snippet: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_anchor: Option<Anchor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sink_anchor: Option<Anchor>,
    /// True when a budget cap cut this slice short.
    pub budget_exhausted: bool,
    /// True when the snippet was cut to [`MAX_SNIPPET_BYTES`].
    pub snippet_truncated: bool,
    /// For baseline chunks: half-open token index range within the file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub token_range: Option<(usize, usize)>,
}

impl Slice {
    /// Stable identifier `package/strategy/index` used to join slices with
    /// their scores.
    pub fn slice_ref(&self) -> String {
        format!("{}/{}/{}", self.package, self.strategy.as_str(), self.index)
    }

    /// Total line count across files.
    pub fn loc(&self) -> usize {
        self.lines.values().map(|v| v.len()).sum()
    }
}

/// Resource limits for slicing one package.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceBudget {
    /// Wall-clock ceiling for one package (graph construction included —
    /// callers subtract time already spent via [`SliceBudget::minus`]).
    pub wall_clock_per_package: Option<Duration>,
    /// Cap on graph nodes collected into a single slice.
    pub max_nodes_per_slice: Option<usize>,
    /// Cap on slices emitted per package per strategy.
    pub max_slices_per_package: Option<usize>,
}

impl SliceBudget {
    /// Small budget for interactive runs and tests: 3 s per package.
    pub fn fast() -> SliceBudget {
        SliceBudget {
            wall_clock_per_package: Some(Duration::from_secs(3)),
            max_nodes_per_slice: Some(2_000),
            max_slices_per_package: Some(256),
        }
    }

    /// Generous budget for full corpus evaluation: 180 s per package.
    pub fn thorough() -> SliceBudget {
        SliceBudget {
            wall_clock_per_package: Some(Duration::from_secs(180)),
            max_nodes_per_slice: Some(20_000),
            max_slices_per_package: Some(4_096),
        }
    }

    /// No limits; useful for small fixtures.
    pub fn unlimited() -> SliceBudget {
        SliceBudget {
            wall_clock_per_package: None,
            max_nodes_per_slice: None,
            max_slices_per_package: None,
        }
    }

    /// Budget with `used` wall-clock time already consumed (for charging
    /// graph construction against the package budget).
    pub fn minus(&self, used: Duration) -> SliceBudget {
        SliceBudget {
            wall_clock_per_package: self
                .wall_clock_per_package
                .map(|w| w.saturating_sub(used)),
            ..self.clone()
        }
    }
}

/// Slices for one package plus whether any budget cap fired.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SliceRun {
    pub slices: Vec<Slice>,
    pub budget_exhausted: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum SliceError {
    #[error("unknown file {0:?}")]
    UnknownFile(String),
    #[error("line {line} out of range for {file:?} ({max} lines)")]
    LineOutOfRange { file: String, line: u32, max: u32 },
}

/// Snippets larger than this are cut down, keeping the window centred on
/// the sink (minified bundles put whole programs on one line).
pub const MAX_SNIPPET_BYTES: usize = 8_000;

struct Clock {
    deadline: Option<Instant>,
}

impl Clock {
    fn new(budget: &SliceBudget) -> Clock {
        Clock { deadline: budget.wall_clock_per_package.map(|d| Instant::now() + d) }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Lines covered by a node: its full extent, start through end.
fn extent_lines(node: &CpgNode) -> impl Iterator<Item = u32> {
    node.line..=node.end_line.max(node.line)
}

fn lines_map(cpg: &Cpg, node_ids: &[u32]) -> BTreeMap<String, Vec<u32>> {
    let mut map: BTreeMap<String, BTreeSet<u32>> = BTreeMap::new();
    for &id in node_ids {
        let n = cpg.node(id);
        map.entry(n.file.clone()).or_default().extend(extent_lines(n));
    }
    map.into_iter().map(|(f, set)| (f, set.into_iter().collect())).collect()
}

fn line_set_key(lines: &BTreeMap<String, Vec<u32>>) -> Vec<(String, u32)> {
    lines
        .iter()
        .flat_map(|(f, ls)| ls.iter().map(move |&l| (f.clone(), l)))
        .collect()
}

/// Concatenate the verbatim source text of `lines` in (file, line) order.
/// When the slice spans several files, a `// --- path ---` marker precedes
/// each file's portion.
pub fn reconstruct(cpg: &Cpg, lines: &BTreeMap<String, Vec<u32>>) -> String {
    let multi = lines.keys().filter(|f| !lines[*f].is_empty()).count() > 1;
    let mut out = String::new();
    for (file, ls) in lines {
        if ls.is_empty() {
            continue;
        }
        if multi {
            out.push_str(&format!("// --- {file} ---\n"));
        }
        for &l in ls {
            if let Some(text) = cpg.line_text(file, l) {
                out.push_str(text);
                out.push('\n');
            }
        }
    }
    out
}

/// Verbatim text of the inclusive line range `[a, b]` of one file.  A
/// reversed range is normalized; a line past the end of the file is an
/// error.
pub fn build_snippet(cpg: &Cpg, file: &str, a: u32, b: u32) -> Result<String, SliceError> {
    let text = cpg
        .file_text(file)
        .ok_or_else(|| SliceError::UnknownFile(file.to_string()))?;
    let max = text.lines().count() as u32;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    for line in [lo, hi] {
        if line == 0 || line > max {
            return Err(SliceError::LineOutOfRange { file: file.to_string(), line, max });
        }
    }
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        let n = i as u32 + 1;
        if n >= lo && n <= hi {
            out.push_str(line);
            out.push('\n');
        }
    }
    Ok(out)
}

/// Cut an oversized snippet to [`MAX_SNIPPET_BYTES`], centring the window
/// on the sink column when the oversize comes from one enormous (minified)
/// line.  Returns true when a cut happened.
fn clamp_snippet(snippet: &mut String, sink_col: u32) -> bool {
    if snippet.len() <= MAX_SNIPPET_BYTES {
        return false;
    }
    let mut center = snippet.len() / 2;
    let mut offset = 0usize;
    for line in snippet.split_inclusive('\n') {
        if line.len() > MAX_SNIPPET_BYTES {
            center = offset + (sink_col as usize).min(line.len());
            break;
        }
        offset += line.len();
    }
    let half = MAX_SNIPPET_BYTES / 2;
    let mut start = center.saturating_sub(half);
    let mut end = (start + MAX_SNIPPET_BYTES).min(snippet.len());
    start = end.saturating_sub(MAX_SNIPPET_BYTES);
    while start > 0 && !snippet.is_char_boundary(start) {
        start -= 1;
    }
    while end < snippet.len() && !snippet.is_char_boundary(end) {
        end += 1;
    }
    *snippet = snippet[start..end].to_string();
    true
}

fn finalize_order(slices: &mut [Slice]) {
    slices.sort_by(|a, b| {
        let ka = (
            a.sink_anchor.as_ref().map(|s| (s.file.clone(), s.line)),
            a.source_anchor.as_ref().map(|s| (s.file.clone(), s.line)),
            a.node_ids.clone(),
        );
        let kb = (
            b.sink_anchor.as_ref().map(|s| (s.file.clone(), s.line)),
            b.source_anchor.as_ref().map(|s| (s.file.clone(), s.line)),
            b.node_ids.clone(),
        );
        ka.cmp(&kb)
    });
    for (i, s) in slices.iter_mut().enumerate() {
        s.index = i;
    }
}

// ---------------------------------------------------------------------------
// Static backward slicing
// ---------------------------------------------------------------------------

/// Backward control-flow slicing: for every catalog sink, collect every
/// statement reachable walking control flow backwards from it; keep the
/// slice only if some catalog source statement was reached.
pub fn static_slice(cpg: &Cpg, catalog: &ApiCatalog, budget: &SliceBudget) -> SliceRun {
    let clock = Clock::new(budget);
    let mut run = SliceRun::default();

    // Source statements across all groups, with the smallest source node
    // per statement retained for anchoring.
    let mut source_stmt_node: BTreeMap<u32, u32> = BTreeMap::new();
    for group in Group::ALL {
        for src in catalog.query_sources(cpg, group) {
            let stmt = cpg.stmt_of(src.id);
            let entry = source_stmt_node.entry(stmt).or_insert(src.id);
            *entry = (*entry).min(src.id);
        }
    }

    let mut seen: HashSet<Vec<(String, u32)>> = HashSet::new();
    'outer: for group in Group::ALL {
        for sink in catalog.query_sinks(cpg, group) {
            if clock.expired() {
                run.budget_exhausted = true;
                break 'outer;
            }
            if budget
                .max_slices_per_package
                .is_some_and(|cap| run.slices.len() >= cap)
            {
                run.budget_exhausted = true;
                break 'outer;
            }
            let sink_stmt = cpg.stmt_of(sink.id);

            // Backward breadth-first walk over control-flow edges.
            let mut visited: BTreeSet<u32> = BTreeSet::new();
            let mut queue: VecDeque<u32> = VecDeque::new();
            visited.insert(sink_stmt);
            queue.push_back(sink_stmt);
            let mut truncated = false;
            while let Some(cur) = queue.pop_front() {
                if budget
                    .max_nodes_per_slice
                    .is_some_and(|cap| visited.len() >= cap)
                {
                    truncated = true;
                    break;
                }
                for &p in cpg.cfg_preds(cur) {
                    if visited.insert(p) {
                        queue.push_back(p);
                    }
                }
            }

            let mut reached: Vec<u32> = visited
                .iter()
                .filter(|s| source_stmt_node.contains_key(s))
                .copied()
                .collect();
            if reached.is_empty() {
                continue;
            }
            reached.sort();

            // Keep statement nodes with real text, one per (file, line).
            let mut by_pos: BTreeMap<(String, u32), u32> = BTreeMap::new();
            for &id in &visited {
                let n = cpg.node(id);
                if n.code.trim().is_empty() {
                    continue;
                }
                let key = (n.file.clone(), n.line);
                let e = by_pos.entry(key).or_insert(id);
                *e = (*e).min(id);
            }
            let node_ids: Vec<u32> = by_pos.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
            if node_ids.is_empty() {
                continue;
            }

            let lines = lines_map(cpg, &node_ids);
            let key = line_set_key(&lines);
            if !seen.insert(key) {
                continue;
            }

            let src_node = cpg.node(source_stmt_node[&reached[0]]);
            let mut snippet = reconstruct(cpg, &lines);
            let snippet_truncated = clamp_snippet(&mut snippet, sink.column);
            run.slices.push(Slice {
                package: cpg.package.id.clone(),
                strategy: SliceStrategy::Static,
                index: 0,
                node_ids,
                lines,
                snippet,
                source_anchor: Some(Anchor::of(src_node)),
                sink_anchor: Some(Anchor::of(sink)),
                budget_exhausted: truncated,
                snippet_truncated,
                token_range: None,
            });
            if truncated {
                run.budget_exhausted = true;
            }
        }
    }

    finalize_order(&mut run.slices);
    run
}

// ---------------------------------------------------------------------------
// Taint-based slicing
// ---------------------------------------------------------------------------

/// A source-to-sink path: endpoint node ids plus the statement chain.
struct Flow {
    src: u32,
    snk: u32,
    stmts: Vec<u32>,
}

/// Shortest data-flow statement path from `from` to `to`, if any.
fn dfg_path(cpg: &Cpg, from: u32, to: u32, cap: Option<usize>) -> Option<Vec<u32>> {
    if from == to {
        return Some(vec![from]);
    }
    let mut parent: HashMap<u32, u32> = HashMap::new();
    let mut queue: VecDeque<u32> = VecDeque::new();
    let mut visited: HashSet<u32> = HashSet::new();
    visited.insert(from);
    queue.push_back(from);
    while let Some(cur) = queue.pop_front() {
        if cap.is_some_and(|c| visited.len() > c) {
            return None;
        }
        for &next in cpg.dfg_succs(cur) {
            if visited.insert(next) {
                parent.insert(next, cur);
                if next == to {
                    let mut path = vec![to];
                    let mut at = to;
                    while let Some(&p) = parent.get(&at) {
                        path.push(p);
                        at = p;
                        if at == from {
                            break;
                        }
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(next);
            }
        }
    }
    None
}

/// Data-flow paths from any of `sources` to any of `sinks`.  Within one
/// statement a source expression nested inside the sink call counts
/// directly; across statements the reaching-definition graph is walked.
fn reachable_by_flows(
    cpg: &Cpg,
    sinks: &[&CpgNode],
    sources: &[&CpgNode],
    budget: &SliceBudget,
    clock: &Clock,
    exhausted: &mut bool,
) -> Vec<Flow> {
    const MAX_FLOWS_PER_PAIR: usize = 64;
    let mut flows: Vec<(u32, u32, u32, u32, Flow)> = Vec::new();
    for snk in sinks {
        if clock.expired() {
            *exhausted = true;
            break;
        }
        for src in sources {
            if src.id == snk.id {
                continue;
            }
            let (src_stmt, snk_stmt) = (cpg.stmt_of(src.id), cpg.stmt_of(snk.id));
            let flow = if cpg.ast_contains(snk.id, src.id) {
                // Source expression nested inside the sink call.
                Some(Flow { src: src.id, snk: snk.id, stmts: vec![snk_stmt] })
            } else if src_stmt == snk_stmt {
                None
            } else {
                dfg_path(cpg, src_stmt, snk_stmt, budget.max_nodes_per_slice)
                    .map(|stmts| Flow { src: src.id, snk: snk.id, stmts })
            };
            if let Some(f) = flow {
                flows.push((snk.line, src.line, f.stmts.len() as u32, src.id, f));
            }
        }
    }
    flows.sort_by_key(|(snk_line, src_line, len, src_id, _)| {
        (*snk_line, *src_line, *len, *src_id)
    });
    flows.truncate(MAX_FLOWS_PER_PAIR);
    flows.into_iter().map(|(_, _, _, _, f)| f).collect()
}

/// Walk the AST upwards from `node` (inclusive) and return the first call
/// node that is in `source_ids`.
fn find_enclosing_source<'a>(
    cpg: &'a Cpg,
    node: &CpgNode,
    source_ids: &BTreeSet<u32>,
) -> Option<&'a CpgNode> {
    let mut current = Some(node.id);
    while let Some(id) = current {
        let n = cpg.node(id);
        if n.kind == NodeKind::Call && source_ids.contains(&id) {
            return Some(n);
        }
        current = cpg.ast_parent(id);
    }
    None
}

/// Data-flow taint slicing with a heuristic fallback.
///
/// For each (source group, sink group) pair that has at least one source
/// and one sink occurrence: emit one `taint_flow` slice per discovered
/// data-flow path; when the pair has no provable flow at all, emit one
/// `taint_fallback` slice per sink that sits lexically inside (or at) a
/// source call, covering the region from that call to the sink line.
pub fn taint_slice(cpg: &Cpg, catalog: &ApiCatalog, budget: &SliceBudget) -> SliceRun {
    let clock = Clock::new(budget);
    let mut run = SliceRun::default();
    let mut seen: HashSet<Vec<(String, u32)>> = HashSet::new();
    let mut processed_pairs: BTreeSet<(u32, String, u32)> = BTreeSet::new();

    let push = |run: &mut SliceRun,
                seen: &mut HashSet<Vec<(String, u32)>>,
                slice: Slice|
     -> bool {
        if budget
            .max_slices_per_package
            .is_some_and(|cap| run.slices.len() >= cap)
        {
            run.budget_exhausted = true;
            return false;
        }
        let key = line_set_key(&slice.lines);
        if !seen.insert(key) {
            return true;
        }
        if slice.budget_exhausted {
            run.budget_exhausted = true;
        }
        run.slices.push(slice);
        true
    };

    'groups: for src_group in Group::ALL {
        let sources = catalog.query_sources(cpg, src_group);
        if sources.is_empty() {
            continue;
        }
        let source_ids: BTreeSet<u32> = sources.iter().map(|n| n.id).collect();
        for sink_group in Group::ALL {
            if clock.expired() {
                run.budget_exhausted = true;
                break 'groups;
            }
            let sinks = catalog.query_sinks(cpg, sink_group);
            if sinks.is_empty() {
                continue;
            }

            let mut pair_exhausted = false;
            let flows =
                reachable_by_flows(cpg, &sinks, &sources, budget, &clock, &mut pair_exhausted);
            if pair_exhausted {
                run.budget_exhausted = true;
            }

            if !flows.is_empty() {
                for flow in flows {
                    // Path nodes: source endpoint, statement chain, sink
                    // endpoint, without duplicating junctions.
                    let mut node_ids: Vec<u32> = Vec::new();
                    node_ids.push(flow.src);
                    for &s in &flow.stmts {
                        if node_ids.last() != Some(&s) {
                            node_ids.push(s);
                        }
                    }
                    if node_ids.last() != Some(&flow.snk) {
                        node_ids.push(flow.snk);
                    }

                    // Lines cover the full extent of every statement on the
                    // path (endpoints contribute their statement extents).
                    let mut stmt_ids: BTreeSet<u32> = flow.stmts.iter().copied().collect();
                    for id in [flow.src, flow.snk] {
                        stmt_ids.insert(cpg.stmt_of(id));
                    }
                    let truncated = budget
                        .max_nodes_per_slice
                        .is_some_and(|cap| stmt_ids.len() > cap);
                    let stmt_vec: Vec<u32> = if truncated {
                        stmt_ids
                            .iter()
                            .copied()
                            .take(budget.max_nodes_per_slice.unwrap())
                            .collect()
                    } else {
                        stmt_ids.iter().copied().collect()
                    };
                    let lines = lines_map(cpg, &stmt_vec);
                    let snk_node = cpg.node(flow.snk);
                    let mut snippet = reconstruct(cpg, &lines);
                    let snippet_truncated =
                        clamp_snippet(&mut snippet, snk_node.column);
                    let slice = Slice {
                        package: cpg.package.id.clone(),
                        strategy: SliceStrategy::TaintFlow,
                        index: 0,
                        node_ids,
                        lines,
                        snippet,
                        source_anchor: Some(Anchor::of(cpg.node(flow.src))),
                        sink_anchor: Some(Anchor::of(snk_node)),
                        budget_exhausted: truncated,
                        snippet_truncated,
                        token_range: None,
                    };
                    if !push(&mut run, &mut seen, slice) {
                        break 'groups;
                    }
                }
            } else {
                // Heuristic fallback: a sink nested in (or identical to) a
                // source call, snipped as the lexical region between them.
                for snk in &sinks {
                    if clock.expired() {
                        run.budget_exhausted = true;
                        break 'groups;
                    }
                    let Some(src_call) = find_enclosing_source(cpg, snk, &source_ids) else {
                        continue;
                    };
                    let pair = (src_call.id, snk.file.clone(), snk.line);
                    if !processed_pairs.insert(pair) {
                        continue;
                    }
                    let src_stmt_id = cpg.stmt_of(src_call.id);
                    let src_stmt = cpg.node(src_stmt_id);
                    let start = src_stmt.line;
                    let end = src_stmt.end_line.max(src_stmt.line).max(snk.line);
                    let Ok(mut snippet) = build_snippet(cpg, &snk.file, start, end) else {
                        continue;
                    };

                    let mut stmt_ids: Vec<u32> = cpg
                        .stmts_touching(&snk.file, start, end)
                        .into_iter()
                        .collect();
                    stmt_ids.sort();
                    let truncated = budget
                        .max_nodes_per_slice
                        .is_some_and(|cap| stmt_ids.len() > cap);
                    if truncated {
                        stmt_ids.truncate(budget.max_nodes_per_slice.unwrap());
                    }
                    let lines: BTreeMap<String, Vec<u32>> =
                        [(snk.file.clone(), (start..=end).collect())].into_iter().collect();
                    let snippet_truncated = clamp_snippet(&mut snippet, snk.column);
                    let slice = Slice {
                        package: cpg.package.id.clone(),
                        strategy: SliceStrategy::TaintFallback,
                        index: 0,
                        node_ids: stmt_ids,
                        lines,
                        snippet,
                        source_anchor: Some(Anchor::of(src_call)),
                        sink_anchor: Some(Anchor::of(snk)),
                        budget_exhausted: truncated,
                        snippet_truncated,
                        token_range: None,
                    };
                    if !push(&mut run, &mut seen, slice) {
                        break 'groups;
                    }
                }
            }
        }
    }

    finalize_order(&mut run.slices);
    run
}

// ---------------------------------------------------------------------------
// Baseline chunking
// ---------------------------------------------------------------------------

/// One lexical token for budgeting purposes: identifier/number runs count
/// as one token, any other non-whitespace character counts alone.  Tokens
/// never span lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxToken {
    /// 1-based line.
    pub line: u32,
    /// Byte offset within the line.
    pub start: usize,
    pub len: usize,
}

/// Approximate tokenization used for chunk budgeting and context-size
/// accounting: maximal `[A-Za-z0-9_]` runs, plus one token per other
/// non-whitespace character.
pub fn approx_tokens(text: &str) -> Vec<ApproxToken> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i as u32 + 1;
        let bytes = line.as_bytes();
        let mut j = 0;
        while j < bytes.len() {
            let b = bytes[j];
            if b.is_ascii_whitespace() {
                j += 1;
            } else if b == b'_' || b.is_ascii_alphanumeric() {
                let start = j;
                while j < bytes.len()
                    && (bytes[j] == b'_' || bytes[j].is_ascii_alphanumeric())
                {
                    j += 1;
                }
                out.push(ApproxToken { line: lineno, start, len: j - start });
            } else {
                // One token per non-word byte; multi-byte characters are
                // one token per leading byte (continuation bytes skipped).
                let start = j;
                j += 1;
                while j < bytes.len() && (bytes[j] & 0xC0) == 0x80 {
                    j += 1;
                }
                out.push(ApproxToken { line: lineno, start, len: j - start });
            }
        }
    }
    out
}

/// Default chunk size for the no-analysis baseline.
pub const BASELINE_CHUNK_TOKENS: usize = 500;

/// Split every file into consecutive runs of at most `max_tokens` lexical
/// tokens.  Chunks partition each file's token stream exactly; a line
/// holding a chunk boundary appears in both neighbouring chunks' line
/// sets.
pub fn baseline_chunks(files: &SourceFileSet, max_tokens: usize) -> SliceRun {
    assert!(max_tokens > 0, "chunk size must be positive");
    let mut run = SliceRun::default();
    let mut index = 0;
    for file in &files.files {
        let tokens = approx_tokens(&file.text);
        if tokens.is_empty() {
            continue;
        }
        let file_lines: Vec<&str> = file.text.lines().collect();
        let mut start = 0;
        while start < tokens.len() {
            let end = (start + max_tokens).min(tokens.len());
            let chunk = &tokens[start..end];
            let lines: Vec<u32> = {
                let mut s: BTreeSet<u32> = BTreeSet::new();
                s.extend(chunk.iter().map(|t| t.line));
                s.into_iter().collect()
            };
            let mut snippet = String::new();
            for &l in &lines {
                snippet.push_str(file_lines[(l - 1) as usize]);
                snippet.push('\n');
            }
            let snippet_truncated = clamp_snippet(&mut snippet, 0);
            run.slices.push(Slice {
                package: files.package.id.clone(),
                strategy: SliceStrategy::BaselineChunk,
                index,
                node_ids: Vec::new(),
                lines: [(file.rel_path.clone(), lines)].into_iter().collect(),
                snippet,
                source_anchor: None,
                sink_anchor: None,
                budget_exhausted: false,
                snippet_truncated,
                token_range: Some((start, end)),
            });
            index += 1;
            start = end;
        }
    }
    run
}
