//! Code property graph construction for JavaScript sources.
//!
//! A [`Cpg`] merges three edge layers over one shared node set:
//!
//! * **AST** — containment: statements own the calls, member accesses, and
//!   function literals nested inside them; function bodies own their
//!   statements.  AST edges form a forest (every node has at most one parent).
//! * **CFG** — intraprocedural control flow between statement nodes: straight
//!   sequencing, `if`/`else` fork and join, loop back-edges, `try` body to
//!   handler, plus an edge from every call statement into the body of any
//!   function literal it receives as an argument (callback linkage).
//! * **DFG** — reaching-definition def→use edges between statement nodes,
//!   including closure captures and `require`/`import` bindings across files.
//!
//! Construction is a pipeline per file: [`parse_file`] lexes and parses the
//! source into statement-level nodes with AST edges (anything outside the
//! supported grammar becomes an `other` node spanning the unparsed region),
//! [`build_cfg`] adds control-flow edges, [`build_dfg`] adds data-flow edges,
//! and [`assemble_cpg`] merges the per-file graphs under package-global ids,
//! links cross-file module bindings, and builds lookup indices.
//!
//! Node ids are assigned in (file path, parse order) and are stable across
//! runs for identical input bytes.

mod ast;
mod cfg;
mod dfg;
mod lexer;
mod lower;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ingest::PackageRef;

pub use lexer::{lex, LexedToken, TokKind};

/// What a graph node represents, at statement or expression granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// A call expression (or a statement that consists of exactly one call).
    Call,
    /// An assignment statement (`a = b`, compound assignments included).
    Assignment,
    /// A `var`/`let`/`const` declaration or an import binding.
    Declaration,
    /// A bare identifier expression statement.
    Identifier,
    /// A literal expression statement.
    Literal,
    /// A property-access chain such as `process.env` outside call position.
    MemberAccess,
    /// A function declaration or function/arrow literal.
    FunctionDef,
    /// A control-flow header: `if`, loop, `try`, or `catch` clause.
    Control,
    /// A `return` statement.
    Return,
    /// Anything outside the supported grammar; sequenced in the CFG but
    /// contributing no data-flow edges.
    Other,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeKind::Call => "call",
            NodeKind::Assignment => "assignment",
            NodeKind::Declaration => "declaration",
            NodeKind::Identifier => "identifier",
            NodeKind::Literal => "literal",
            NodeKind::MemberAccess => "member_access",
            NodeKind::FunctionDef => "function_def",
            NodeKind::Control => "control",
            NodeKind::Return => "return",
            NodeKind::Other => "other",
        };
        f.write_str(s)
    }
}

/// Which layer an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeLayer {
    #[serde(rename = "AST")]
    Ast,
    #[serde(rename = "CFG")]
    Cfg,
    #[serde(rename = "DFG")]
    Dfg,
}

/// One graph node.
///
/// `line`/`column` are 1-based and point at the first byte of the node's
/// source extent; `end_line` is the line of its last byte.  `code` is the
/// verbatim source slice of the extent.  `callee_name` is present exactly for
/// `call` nodes (the resolved rightmost name of the callee, `"<computed>"`
/// when dynamic).  `prop_path` carries the dotted property path for calls and
/// member accesses whose chain is statically known (string-literal subscripts
/// are folded in, so `a["b"].c` yields `a.b.c`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CpgNode {
    pub id: u32,
    pub kind: NodeKind,
    pub code: String,
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub callee_name: Option<String>,
    pub end_line: u32,
    pub prop_path: Option<String>,
    /// True for statement-level nodes (the ones that carry CFG/DFG edges).
    pub is_statement: bool,
}

/// One directed edge in a named layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CpgEdge {
    pub from: u32,
    pub to: u32,
    pub layer: EdgeLayer,
}

/// A parse/lex problem tied to a source region.  Diagnostics never abort
/// graph construction; the offending region becomes an `other` node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub line: u32,
    pub message: String,
}

/// The per-file product of [`parse_file`] (+ [`build_cfg`] / [`build_dfg`]).
///
/// Node ids here are file-local; [`assemble_cpg`] rebases them.
#[derive(Debug)]
pub struct FileGraph {
    pub rel_path: String,
    pub text: String,
    pub nodes: Vec<CpgNode>,
    pub ast_edges: Vec<(u32, u32)>,
    pub cfg_edges: Vec<(u32, u32)>,
    pub dfg_edges: Vec<(u32, u32)>,
    pub diagnostics: Vec<Diagnostic>,
    pub(crate) aux: lower::Aux,
}

/// Parse one file into statement-level nodes and AST containment edges.
///
/// The supported grammar is an ES2017 subset: declarations, assignments,
/// calls, member access, function declarations/expressions/arrows, `if`/`else`,
/// `for`/`for-in`/`for-of`/`while`, `try`/`catch`, `return`, template
/// literals, and `require`/static `import`.  Unsupported or malformed regions
/// are recovered to `other` nodes spanning the consumed tokens, with a
/// diagnostic; they participate in CFG sequencing but contribute no DFG edges.
pub fn parse_file(rel_path: &str, text: &str) -> FileGraph {
    let (tokens, lex_diags) = lexer::lex(text);
    let (stmts, parse_diags) = ast::parse(&tokens, text);
    let mut diagnostics: Vec<Diagnostic> = Vec::new();
    for d in lex_diags {
        diagnostics.push(Diagnostic { file: rel_path.to_string(), line: d.line, message: d.message });
    }
    for d in parse_diags {
        diagnostics.push(Diagnostic { file: rel_path.to_string(), line: d.line, message: d.message });
    }
    let mut fg = lower::lower(rel_path, text, &stmts);
    fg.diagnostics = diagnostics;
    fg
}

/// Add intraprocedural control-flow edges over a file's statement nodes.
pub fn build_cfg(fg: &mut FileGraph) {
    cfg::build(fg);
}

/// Add reaching-definition data-flow edges over a file's statement nodes.
/// Requires [`build_cfg`] to have run (definitions propagate along CFG edges).
pub fn build_dfg(fg: &mut FileGraph) {
    dfg::build(fg);
}

/// A package-level code property graph with query indices.
#[derive(Debug)]
pub struct Cpg {
    pub package: PackageRef,
    pub nodes: Vec<CpgNode>,
    pub edges: Vec<CpgEdge>,
    pub diagnostics: Vec<Diagnostic>,
    files: Vec<(String, String)>,
    ast_parent: Vec<Option<u32>>,
    ast_children: Vec<Vec<u32>>,
    cfg_succ: Vec<Vec<u32>>,
    cfg_pred: Vec<Vec<u32>>,
    dfg_succ: Vec<Vec<u32>>,
    dfg_pred: Vec<Vec<u32>>,
    stmt_of: Vec<u32>,
    file_stmts: HashMap<String, Vec<u32>>,
    line_index: HashMap<String, BTreeMap<u32, Vec<u32>>>,
}

/// Merge per-file graphs into one package graph: sort files by path, rebase
/// node ids to package-global values, add cross-file `require`/`import`
/// data-flow edges, and build the lookup indices.
pub fn assemble_cpg(package: PackageRef, mut files: Vec<FileGraph>) -> Cpg {
    files.sort_by(|a, b| a.rel_path.cmp(&b.rel_path));

    let mut nodes: Vec<CpgNode> = Vec::new();
    let mut edges: Vec<CpgEdge> = Vec::new();
    let mut diagnostics: Vec<Diagnostic> = Vec::new();
    let mut stmt_of: Vec<u32> = Vec::new();
    let mut texts: Vec<(String, String)> = Vec::new();

    // Per-file bookkeeping for the cross-file pass, in global ids.
    let mut exports_by_file: HashMap<String, Vec<u32>> = HashMap::new();
    let mut imports: Vec<(String, u32, String)> = Vec::new(); // (importing file, decl stmt, module spec)

    let mut offset: u32 = 0;
    for fg in &files {
        for n in &fg.nodes {
            let mut n = n.clone();
            n.id += offset;
            nodes.push(n);
        }
        for &(a, b) in &fg.ast_edges {
            edges.push(CpgEdge { from: a + offset, to: b + offset, layer: EdgeLayer::Ast });
        }
        for &(a, b) in &fg.cfg_edges {
            edges.push(CpgEdge { from: a + offset, to: b + offset, layer: EdgeLayer::Cfg });
        }
        for &(a, b) in &fg.dfg_edges {
            edges.push(CpgEdge { from: a + offset, to: b + offset, layer: EdgeLayer::Dfg });
        }
        for s in &fg.aux.stmt_of {
            stmt_of.push(s + offset);
        }
        diagnostics.extend(fg.diagnostics.iter().cloned());
        exports_by_file
            .insert(fg.rel_path.clone(), fg.aux.exports.iter().map(|&e| e + offset).collect());
        for imp in &fg.aux.imports {
            imports.push((fg.rel_path.clone(), imp.decl_stmt + offset, imp.module.clone()));
        }
        texts.push((fg.rel_path.clone(), fg.text.clone()));
        offset += fg.nodes.len() as u32;
    }

    // Cross-file data flow: every export statement of the resolved module
    // feeds the importing declaration.  Only relative specifiers resolve;
    // bare package names are external and contribute nothing.
    let known: BTreeSet<&str> = texts.iter().map(|(p, _)| p.as_str()).collect();
    let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (from_file, decl_stmt, spec) in &imports {
        if let Some(target) = resolve_module(from_file, spec, &known) {
            if let Some(exps) = exports_by_file.get(&target) {
                for &e in exps {
                    if seen.insert((e, *decl_stmt)) {
                        edges.push(CpgEdge { from: e, to: *decl_stmt, layer: EdgeLayer::Dfg });
                    }
                }
            }
        }
    }

    let n = nodes.len();
    let mut ast_parent: Vec<Option<u32>> = vec![None; n];
    let mut ast_children: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut cfg_succ: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut cfg_pred: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut dfg_succ: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut dfg_pred: Vec<Vec<u32>> = vec![Vec::new(); n];
    for e in &edges {
        match e.layer {
            EdgeLayer::Ast => {
                ast_parent[e.to as usize] = Some(e.from);
                ast_children[e.from as usize].push(e.to);
            }
            EdgeLayer::Cfg => {
                cfg_succ[e.from as usize].push(e.to);
                cfg_pred[e.to as usize].push(e.from);
            }
            EdgeLayer::Dfg => {
                dfg_succ[e.from as usize].push(e.to);
                dfg_pred[e.to as usize].push(e.from);
            }
        }
    }

    let mut file_stmts: HashMap<String, Vec<u32>> = HashMap::new();
    let mut line_index: HashMap<String, BTreeMap<u32, Vec<u32>>> = HashMap::new();
    for node in &nodes {
        if node.is_statement {
            file_stmts.entry(node.file.clone()).or_default().push(node.id);
            line_index
                .entry(node.file.clone())
                .or_default()
                .entry(node.line)
                .or_default()
                .push(node.id);
        }
    }

    Cpg {
        package,
        nodes,
        edges,
        diagnostics,
        files: texts,
        ast_parent,
        ast_children,
        cfg_succ,
        cfg_pred,
        dfg_succ,
        dfg_pred,
        stmt_of,
        file_stmts,
        line_index,
    }
}

/// Resolve a relative module specifier against the importing file's directory.
/// Tries the exact path, then `.js`/`.mjs`/`.cjs` extensions, then
/// `<spec>/index.js`.
fn resolve_module(from_file: &str, spec: &str, known: &BTreeSet<&str>) -> Option<String> {
    if !(spec.starts_with("./") || spec.starts_with("../")) {
        return None;
    }
    let dir = match from_file.rfind('/') {
        Some(i) => &from_file[..i],
        None => "",
    };
    let mut parts: Vec<&str> = if dir.is_empty() { Vec::new() } else { dir.split('/').collect() };
    for seg in spec.split('/') {
        match seg {
            "." | "" => {}
            ".." => {
                parts.pop();
            }
            s => parts.push(s),
        }
    }
    let base = parts.join("/");
    let candidates = [
        base.clone(),
        format!("{base}.js"),
        format!("{base}.mjs"),
        format!("{base}.cjs"),
        format!("{base}/index.js"),
    ];
    candidates.iter().find(|c| known.contains(c.as_str())).cloned()
}

impl Cpg {
    pub fn node(&self, id: u32) -> &CpgNode {
        &self.nodes[id as usize]
    }

    pub fn ast_parent(&self, id: u32) -> Option<u32> {
        self.ast_parent[id as usize]
    }

    pub fn ast_children(&self, id: u32) -> &[u32] {
        &self.ast_children[id as usize]
    }

    pub fn cfg_succs(&self, id: u32) -> &[u32] {
        &self.cfg_succ[id as usize]
    }

    pub fn cfg_preds(&self, id: u32) -> &[u32] {
        &self.cfg_pred[id as usize]
    }

    pub fn dfg_succs(&self, id: u32) -> &[u32] {
        &self.dfg_succ[id as usize]
    }

    pub fn dfg_preds(&self, id: u32) -> &[u32] {
        &self.dfg_pred[id as usize]
    }

    /// The statement-level node enclosing `id` (itself, for statements).
    pub fn stmt_of(&self, id: u32) -> u32 {
        self.stmt_of[id as usize]
    }

    /// True if `anc` is `id` or an AST ancestor of `id`.
    pub fn ast_contains(&self, anc: u32, id: u32) -> bool {
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = self.ast_parent(c);
        }
        false
    }

    /// Files in this graph as `(relative path, text)`, in id-assignment order.
    pub fn files(&self) -> &[(String, String)] {
        &self.files
    }

    pub fn file_text(&self, rel_path: &str) -> Option<&str> {
        self.files.iter().find(|(p, _)| p == rel_path).map(|(_, t)| t.as_str())
    }

    /// Statement nodes of one file, in id order.
    pub fn stmts_in_file(&self, rel_path: &str) -> &[u32] {
        self.file_stmts.get(rel_path).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Statement nodes of one file that start on `line`.
    pub fn stmts_on_line(&self, rel_path: &str, line: u32) -> &[u32] {
        self.line_index
            .get(rel_path)
            .and_then(|m| m.get(&line))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Statement nodes whose line extent intersects `[from, to]`.
    pub fn stmts_touching(&self, rel_path: &str, from: u32, to: u32) -> Vec<u32> {
        self.stmts_in_file(rel_path)
            .iter()
            .copied()
            .filter(|&id| {
                let n = self.node(id);
                n.line <= to && n.end_line >= from
            })
            .collect()
    }

    /// The verbatim text of one 1-based line, without its terminator.
    pub fn line_text(&self, rel_path: &str, line: u32) -> Option<&str> {
        let text = self.file_text(rel_path)?;
        text.lines().nth(line as usize - 1)
    }

    /// Serialize nodes then edges as JSONL (one object per line).
    pub fn dump_jsonl<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for n in &self.nodes {
            let obj = serde_json::json!({
                "id": n.id,
                "kind": n.kind,
                "code": n.code,
                "file": n.file,
                "line": n.line,
                "column": n.column,
                "callee_name": n.callee_name,
                "end_line": n.end_line,
            });
            writeln!(w, "{obj}")?;
        }
        for e in &self.edges {
            let obj = serde_json::json!({"from": e.from, "to": e.to, "layer": e.layer});
            writeln!(w, "{obj}")?;
        }
        Ok(())
    }

    /// Render one file's CFG as Graphviz DOT.
    pub fn dump_dot_cfg<W: std::io::Write>(&self, rel_path: &str, mut w: W) -> std::io::Result<()> {
        writeln!(w, "digraph cfg {{")?;
        writeln!(w, "  node [shape=box, fontname=\"monospace\"];")?;
        for &id in self.stmts_in_file(rel_path) {
            let n = self.node(id);
            let label = n.code.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n");
            let label = if label.chars().count() > 60 {
                let cut: String = label.chars().take(60).collect();
                format!("{cut}…")
            } else {
                label
            };
            writeln!(w, "  n{} [label=\"{}: {}\"];", id, n.line, label)?;
        }
        for &id in self.stmts_in_file(rel_path) {
            for &s in self.cfg_succs(id) {
                writeln!(w, "  n{id} -> n{s};")?;
            }
        }
        writeln!(w, "}}")
    }
}
