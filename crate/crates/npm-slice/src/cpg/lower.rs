//! Lowering: typed AST → graph nodes + AST containment edges + per-statement
//! def/use facts, control shapes for the CFG pass, and scope/function tables
//! for the DFG pass.
//!
//! Granularity: every statement becomes one node (control headers span only
//! their head, so an `if` node never drags its branches into a slice).  Below
//! statement level, three expression forms get nodes of their own because the
//! sensitive-API catalog needs to see them: calls, path-like property chains
//! (`process.env.PATH`, including string subscripts like `a["exec"]`), and
//! function literals (the AST anchor for their body statements).

use std::collections::{BTreeSet, HashMap};

use super::ast::{self, CatchClause, Expr, FuncLit, MemberProp, Span, Stmt};
use super::{CpgNode, FileGraph, NodeKind};

/// Control shape of one statement, for the CFG pass.
#[derive(Debug)]
pub(crate) enum Shape {
    Plain(u32),
    /// `return`/`throw`: sequenced, but nothing falls through.
    NoFall(u32),
    If { head: u32, cons: Vec<Shape>, alt: Option<Vec<Shape>> },
    Loop { head: u32, body: Vec<Shape> },
    Try {
        head: u32,
        body: Vec<Shape>,
        catch: Option<(u32, Vec<Shape>)>,
        finally: Option<Vec<Shape>>,
    },
}

/// One function body (declaration, expression, or arrow).
#[derive(Debug)]
pub(crate) struct FuncBody {
    pub body: Vec<Shape>,
    pub params: Vec<String>,
    /// Statement containing the function literal (the declaration itself for
    /// `function f() {}`).
    pub site_stmt: u32,
    /// Call statements that receive this function directly as an argument
    /// (callback linkage); literal-argument position fills the first entry,
    /// by-name passing adds more during CFG construction.
    pub spawned_by: Vec<u32>,
    /// Declared name, for by-name callback resolution.
    pub name: Option<String>,
}

#[derive(Debug, Default, Clone)]
pub(crate) struct StmtInfo {
    pub strong_defs: Vec<String>,
    pub weak_defs: Vec<String>,
    pub uses: Vec<String>,
}

#[derive(Debug)]
pub(crate) struct ScopeInfo {
    pub declared: BTreeSet<String>,
}

#[derive(Debug)]
pub(crate) struct ImportBinding {
    pub decl_stmt: u32,
    pub module: String,
}

#[derive(Debug, Default)]
pub(crate) struct Aux {
    pub shapes: Vec<Shape>,
    pub funcs: Vec<FuncBody>,
    pub stmt_info: Vec<StmtInfo>,
    pub stmt_of: Vec<u32>,
    pub scope_of: Vec<u32>,
    pub scopes: Vec<ScopeInfo>,
    pub imports: Vec<ImportBinding>,
    pub exports: Vec<u32>,
    /// `(call statement, identifier argument)` pairs awaiting by-name
    /// callback resolution against declared functions.
    pub name_callback_refs: Vec<(u32, String)>,
    /// Declared function name → index into `funcs` (last declaration wins).
    pub named_funcs: HashMap<String, usize>,
}

impl Default for ScopeInfo {
    fn default() -> Self {
        ScopeInfo { declared: BTreeSet::new() }
    }
}

pub(crate) fn lower(rel_path: &str, text: &str, stmts: &[Stmt]) -> FileGraph {
    let mut lw = Lowerer {
        rel: rel_path,
        src: text,
        nodes: Vec::new(),
        ast_edges: Vec::new(),
        aux: Aux::default(),
        scope_stack: vec![0],
    };
    lw.aux.scopes.push(ScopeInfo::default()); // scope 0: module scope
    let shapes = lw.lower_stmts(stmts, None);
    lw.aux.shapes = shapes;
    FileGraph {
        rel_path: rel_path.to_string(),
        text: text.to_string(),
        nodes: lw.nodes,
        ast_edges: lw.ast_edges,
        cfg_edges: Vec::new(),
        dfg_edges: Vec::new(),
        diagnostics: Vec::new(),
        aux: lw.aux,
    }
}

struct Lowerer<'a> {
    rel: &'a str,
    src: &'a str,
    nodes: Vec<CpgNode>,
    ast_edges: Vec<(u32, u32)>,
    aux: Aux,
    scope_stack: Vec<u32>,
}

/// Expression-walk context: which statement collects defs/uses (or none, for
/// `other` statements that contribute no data flow).
#[derive(Clone, Copy)]
struct Ctx {
    stmt: u32,
    collect: bool,
}

impl<'a> Lowerer<'a> {
    fn cur_scope(&self) -> u32 {
        *self.scope_stack.last().unwrap()
    }

    fn new_node(
        &mut self,
        kind: NodeKind,
        span: Span,
        parent: Option<u32>,
        stmt: Option<u32>,
    ) -> u32 {
        let id = self.nodes.len() as u32;
        let code = self.src[span.start..span.end].to_string();
        self.nodes.push(CpgNode {
            id,
            kind,
            code,
            file: self.rel.to_string(),
            line: span.line,
            column: span.col,
            callee_name: None,
            end_line: span.end_line,
            prop_path: None,
            is_statement: stmt.is_none(),
        });
        if let Some(p) = parent {
            self.ast_edges.push((p, id));
        }
        self.aux.stmt_of.push(stmt.unwrap_or(id));
        self.aux.scope_of.push(self.cur_scope());
        self.aux.stmt_info.push(StmtInfo::default());
        id
    }

    fn declare(&mut self, name: &str) {
        let s = self.cur_scope();
        self.aux.scopes[s as usize].declared.insert(name.to_string());
    }

    fn info(&mut self, stmt: u32) -> &mut StmtInfo {
        &mut self.aux.stmt_info[stmt as usize]
    }

    fn add_use(&mut self, ctx: Ctx, name: &str) {
        if ctx.collect && name != "this" && name != "super" {
            self.info(ctx.stmt).uses.push(name.to_string());
        }
    }

    fn add_strong_def(&mut self, ctx: Ctx, name: &str) {
        if ctx.collect {
            self.info(ctx.stmt).strong_defs.push(name.to_string());
        }
    }

    fn add_weak_def(&mut self, ctx: Ctx, name: &str) {
        if ctx.collect {
            self.info(ctx.stmt).weak_defs.push(name.to_string());
        }
    }

    // ---- statements ----

    fn lower_stmts(&mut self, stmts: &[Stmt], parent: Option<u32>) -> Vec<Shape> {
        let mut shapes = Vec::new();
        for s in stmts {
            if let Some(sh) = self.lower_stmt(s, parent) {
                shapes.push(sh);
            }
        }
        shapes
    }

    fn lower_stmt(&mut self, s: &Stmt, parent: Option<u32>) -> Option<Shape> {
        match s {
            Stmt::VarDecl { decls, span, .. } => {
                let node = self.new_node(NodeKind::Declaration, *span, parent, None);
                let ctx = Ctx { stmt: node, collect: true };
                for (pat, init) in decls {
                    let mut names = Vec::new();
                    pat.bound_names(&mut names);
                    for n in &names {
                        self.add_strong_def(ctx, n);
                        self.declare(n);
                    }
                    let mut embedded = Vec::new();
                    pat.embedded_exprs(&mut embedded);
                    for e in &embedded {
                        self.walk_expr(e, node, ctx, None);
                    }
                    if let Some(init) = init {
                        self.walk_expr(init, node, ctx, None);
                        if let Some(module) = require_target(init, self.src) {
                            self.aux.imports.push(ImportBinding { decl_stmt: node, module });
                        }
                    }
                }
                Some(Shape::Plain(node))
            }
            Stmt::Expr { expr, span } => Some(self.lower_expr_stmt(expr, *span, parent)),
            Stmt::FuncDecl { func, span } => {
                // Header-only extent: the body belongs to its own statements.
                let head = Span {
                    start: span.start,
                    end: func.head_span.end,
                    line: span.line,
                    col: span.col,
                    end_line: func.head_span.end_line,
                };
                let node = self.new_node(NodeKind::FunctionDef, head, parent, None);
                if let Some(name) = &func.name {
                    let ctx = Ctx { stmt: node, collect: true };
                    self.add_strong_def(ctx, name);
                    self.declare(name);
                }
                let idx = self.lower_func_body(func, node, node, None);
                if let Some(name) = &func.name {
                    self.aux.named_funcs.insert(name.clone(), idx);
                    self.aux.funcs[idx].name = Some(name.clone());
                }
                Some(Shape::Plain(node))
            }
            Stmt::Return { arg, span } => {
                let node = self.new_node(NodeKind::Return, *span, parent, None);
                let ctx = Ctx { stmt: node, collect: true };
                if let Some(a) = arg {
                    self.walk_expr(a, node, ctx, None);
                }
                Some(Shape::NoFall(node))
            }
            Stmt::Throw { arg, span } => {
                // Outside the subset: an `other` node (no data flow), but its
                // nested calls still surface for catalog queries.
                let node = self.new_node(NodeKind::Other, *span, parent, None);
                let ctx = Ctx { stmt: node, collect: false };
                self.walk_expr(arg, node, ctx, None);
                Some(Shape::NoFall(node))
            }
            Stmt::If { cond, cons, alt, head_span, .. } => {
                let head = self.new_node(NodeKind::Control, *head_span, parent, None);
                let ctx = Ctx { stmt: head, collect: true };
                self.walk_expr(cond, head, ctx, None);
                let cons = self.lower_stmts(cons, Some(head));
                let alt = alt.as_ref().map(|a| self.lower_stmts(a, Some(head)));
                Some(Shape::If { head, cons, alt })
            }
            Stmt::While { cond, body, head_span, .. }
            | Stmt::DoWhile { cond, body, head_span, .. } => {
                let head = self.new_node(NodeKind::Control, *head_span, parent, None);
                let ctx = Ctx { stmt: head, collect: true };
                self.walk_expr(cond, head, ctx, None);
                let body = self.lower_stmts(body, Some(head));
                Some(Shape::Loop { head, body })
            }
            Stmt::For { init, cond, update, body, head_span, .. } => {
                let head = self.new_node(NodeKind::Control, *head_span, parent, None);
                let ctx = Ctx { stmt: head, collect: true };
                if let Some(init) = init {
                    self.fold_into_head(init, head, ctx);
                }
                if let Some(c) = cond {
                    self.walk_expr(c, head, ctx, None);
                }
                if let Some(u) = update {
                    self.walk_update_expr(u, head, ctx);
                }
                let body = self.lower_stmts(body, Some(head));
                Some(Shape::Loop { head, body })
            }
            Stmt::ForIn { decl_kind, pat, right, body, head_span, .. } => {
                let head = self.new_node(NodeKind::Control, *head_span, parent, None);
                let ctx = Ctx { stmt: head, collect: true };
                let mut names = Vec::new();
                pat.bound_names(&mut names);
                for n in &names {
                    self.add_strong_def(ctx, n);
                    if decl_kind.is_some() {
                        self.declare(n);
                    }
                }
                self.walk_expr(right, head, ctx, None);
                let body = self.lower_stmts(body, Some(head));
                Some(Shape::Loop { head, body })
            }
            Stmt::Try { body, catch, finally, head_span, .. } => {
                let head = self.new_node(NodeKind::Control, *head_span, parent, None);
                let body = self.lower_stmts(body, Some(head));
                let catch = catch.as_ref().map(|CatchClause { param, body, head_span }| {
                    let ch = self.new_node(NodeKind::Control, *head_span, Some(head), None);
                    let ctx = Ctx { stmt: ch, collect: true };
                    if let Some(p) = param {
                        let mut names = Vec::new();
                        p.bound_names(&mut names);
                        for n in &names {
                            self.add_strong_def(ctx, n);
                            self.declare(n);
                        }
                    }
                    let cbody = self.lower_stmts(body, Some(ch));
                    (ch, cbody)
                });
                let finally = finally.as_ref().map(|f| self.lower_stmts(f, Some(head)));
                Some(Shape::Try { head, body, catch, finally })
            }
            Stmt::Import { names, module, span } => {
                let node = self.new_node(NodeKind::Declaration, *span, parent, None);
                let ctx = Ctx { stmt: node, collect: true };
                for n in names {
                    self.add_strong_def(ctx, n);
                    self.declare(n);
                }
                if let (Some(m), false) = (module, names.is_empty()) {
                    self.aux.imports.push(ImportBinding { decl_stmt: node, module: m.clone() });
                }
                Some(Shape::Plain(node))
            }
            Stmt::Other { span } => {
                let node = self.new_node(NodeKind::Other, *span, parent, None);
                Some(Shape::Plain(node))
            }
        }
    }

    /// Classic-`for` init folded into the head node (it has no node of its own).
    fn fold_into_head(&mut self, init: &Stmt, head: u32, ctx: Ctx) {
        match init {
            Stmt::VarDecl { decls, .. } => {
                for (pat, init) in decls {
                    let mut names = Vec::new();
                    pat.bound_names(&mut names);
                    for n in &names {
                        self.add_strong_def(ctx, n);
                        self.declare(n);
                    }
                    if let Some(e) = init {
                        self.walk_expr(e, head, ctx, None);
                    }
                }
            }
            Stmt::Expr { expr, .. } => self.walk_update_expr(expr, head, ctx),
            _ => {}
        }
    }

    /// Assignment-like expressions in for-head position (`i++`, `i = 0`,
    /// comma sequences of either).
    fn walk_update_expr(&mut self, e: &Expr, head: u32, ctx: Ctx) {
        match e {
            Expr::Sequence { exprs, .. } => {
                for x in exprs {
                    self.walk_update_expr(x, head, ctx);
                }
            }
            _ => self.walk_expr(e, head, ctx, None),
        }
    }

    fn lower_expr_stmt(&mut self, expr: &Expr, span: Span, parent: Option<u32>) -> Shape {
        match expr {
            Expr::Call { callee, args, .. } => {
                // The statement node doubles as the call node.
                let node = self.new_node(NodeKind::Call, span, parent, None);
                let (name, path) = callee_info(callee, self.src);
                self.nodes[node as usize].callee_name = Some(name);
                self.nodes[node as usize].prop_path = path;
                let ctx = Ctx { stmt: node, collect: true };
                self.walk_call_parts(callee, args, node, node, ctx);
                Shape::Plain(node)
            }
            Expr::Assign { .. } => {
                let node = self.new_node(NodeKind::Assignment, span, parent, None);
                let ctx = Ctx { stmt: node, collect: true };
                self.walk_expr(expr, node, ctx, None);
                Shape::Plain(node)
            }
            Expr::Update { .. } => {
                let node = self.new_node(NodeKind::Assignment, span, parent, None);
                let ctx = Ctx { stmt: node, collect: true };
                self.walk_expr(expr, node, ctx, None);
                Shape::Plain(node)
            }
            Expr::Ident { name, .. } => {
                let node = self.new_node(NodeKind::Identifier, span, parent, None);
                let ctx = Ctx { stmt: node, collect: true };
                self.add_use(ctx, name);
                Shape::Plain(node)
            }
            Expr::Literal { .. } | Expr::Template { .. } => {
                let node = self.new_node(NodeKind::Literal, span, parent, None);
                let ctx = Ctx { stmt: node, collect: true };
                if let Expr::Template { parts, .. } = expr {
                    for p in parts {
                        self.walk_expr(p, node, ctx, None);
                    }
                }
                Shape::Plain(node)
            }
            Expr::Member { .. } => {
                let node = self.new_node(NodeKind::MemberAccess, span, parent, None);
                if let Some((root, path)) = member_path(expr, self.src) {
                    self.nodes[node as usize].prop_path = Some(path);
                    let ctx = Ctx { stmt: node, collect: true };
                    self.add_use(ctx, &root);
                } else {
                    let ctx = Ctx { stmt: node, collect: true };
                    self.walk_member_parts(expr, node, ctx);
                }
                Shape::Plain(node)
            }
            Expr::Function(f) => {
                let node = self.new_node(NodeKind::FunctionDef, span, parent, None);
                self.lower_func_body(f, node, node, None);
                Shape::Plain(node)
            }
            _ => {
                // Sequences, guards (`x && f()`), and other unsupported
                // statement expressions: one `other` node, no data flow, but
                // nested calls still get nodes for catalog queries.
                let node = self.new_node(NodeKind::Other, span, parent, None);
                let ctx = Ctx { stmt: node, collect: false };
                self.walk_expr(expr, node, ctx, None);
                Shape::Plain(node)
            }
        }
    }

    /// Lower a function literal's parameters and body; returns the `funcs`
    /// table index.
    fn lower_func_body(
        &mut self,
        f: &FuncLit,
        func_node: u32,
        site_stmt: u32,
        spawning_call_stmt: Option<u32>,
    ) -> usize {
        let scope_id = self.aux.scopes.len() as u32;
        self.aux.scopes.push(ScopeInfo { declared: BTreeSet::new() });
        self.scope_stack.push(scope_id);
        let mut params = Vec::new();
        for p in &f.params {
            p.bound_names(&mut params);
        }
        for p in &params {
            self.declare(p);
        }
        if let Some(name) = &f.name {
            self.declare(name); // named function expressions see themselves
        }
        let body = self.lower_stmts(&f.body, Some(func_node));
        self.scope_stack.pop();
        let idx = self.aux.funcs.len();
        self.aux.funcs.push(FuncBody {
            body,
            params,
            site_stmt,
            spawned_by: spawning_call_stmt.into_iter().collect(),
            name: None,
        });
        idx
    }

    // ---- expressions ----

    /// Walk an expression, emitting nested call/member/function nodes under
    /// `parent` and collecting defs/uses into `ctx.stmt`.  `arg_of_call` is
    /// set when `e` sits in direct-argument (or IIFE callee) position of the
    /// call statement it names — the callback-linkage cue.
    fn walk_expr(&mut self, e: &Expr, parent: u32, ctx: Ctx, arg_of_call: Option<u32>) {
        match e {
            Expr::Ident { name, .. } => self.add_use(ctx, name),
            Expr::Literal { .. } | Expr::Opaque { .. } => {}
            Expr::Template { parts, .. } => {
                for p in parts {
                    self.walk_expr(p, parent, ctx, None);
                }
            }
            Expr::Array { elems, .. } => {
                for x in elems {
                    self.walk_expr(x, parent, ctx, None);
                }
            }
            Expr::Object { parts, .. } => {
                for x in parts {
                    self.walk_expr(x, parent, ctx, None);
                }
            }
            Expr::Spread { arg, .. } => self.walk_expr(arg, parent, ctx, None),
            Expr::Sequence { exprs, .. } => {
                for x in exprs {
                    self.walk_expr(x, parent, ctx, None);
                }
            }
            Expr::Member { .. } => {
                if let Some((root, path)) = member_path(e, self.src) {
                    let span = e.span();
                    let node =
                        self.new_node(NodeKind::MemberAccess, span, Some(parent), Some(ctx.stmt));
                    self.nodes[node as usize].prop_path = Some(path);
                    self.add_use(ctx, &root);
                } else {
                    self.walk_member_parts(e, parent, ctx);
                }
            }
            Expr::Call { callee, args, .. } => {
                let span = e.span();
                let node = self.new_node(NodeKind::Call, span, Some(parent), Some(ctx.stmt));
                let (name, path) = callee_info(callee, self.src);
                self.nodes[node as usize].callee_name = Some(name);
                self.nodes[node as usize].prop_path = path;
                self.walk_call_parts(callee, args, node, ctx.stmt, ctx);
            }
            Expr::Assign { op, target, value, .. } => {
                self.walk_assign_target(target, parent, ctx, op != "=");
                self.walk_expr(value, parent, ctx, None);
                if let Some((_, path)) = assign_target_path(target, self.src) {
                    if path == "module.exports"
                        || path.starts_with("module.exports.")
                        || path.starts_with("exports.")
                    {
                        if !self.aux.exports.contains(&ctx.stmt) {
                            self.aux.exports.push(ctx.stmt);
                        }
                    }
                }
            }
            Expr::Update { arg, .. } => match &**arg {
                Expr::Ident { name, .. } => {
                    self.add_use(ctx, name);
                    self.add_strong_def(ctx, name);
                }
                other => {
                    if let Some((root, _)) = member_path(other, self.src) {
                        self.add_use(ctx, &root);
                        self.add_weak_def(ctx, &root);
                    }
                    self.walk_expr(other, parent, ctx, None);
                }
            },
            Expr::Unary { arg, .. } => self.walk_expr(arg, parent, ctx, None),
            Expr::Binary { left, right, .. } => {
                self.walk_expr(left, parent, ctx, None);
                self.walk_expr(right, parent, ctx, None);
            }
            Expr::Conditional { cond, cons, alt, .. } => {
                self.walk_expr(cond, parent, ctx, None);
                self.walk_expr(cons, parent, ctx, None);
                self.walk_expr(alt, parent, ctx, None);
            }
            Expr::Function(f) => {
                let span = f.span;
                let node = self.new_node(NodeKind::FunctionDef, span, Some(parent), Some(ctx.stmt));
                self.lower_func_body(f, node, ctx.stmt, arg_of_call);
            }
        }
    }

    /// Callee and arguments of a call whose node is already created.
    fn walk_call_parts(
        &mut self,
        callee: &Expr,
        args: &[Expr],
        call_node: u32,
        call_stmt: u32,
        ctx: Ctx,
    ) {
        match callee {
            Expr::Ident { name, .. } => self.add_use(ctx, name),
            Expr::Member { .. } => {
                if let Some((root, _)) = member_path(callee, self.src) {
                    // Path-like callee is folded into the call node itself.
                    self.add_use(ctx, &root);
                } else {
                    self.walk_member_parts(callee, call_node, ctx);
                }
            }
            Expr::Function(_) => {
                // IIFE: the literal executes as part of this statement.
                self.walk_expr(callee, call_node, ctx, Some(call_stmt));
            }
            other => self.walk_expr(other, call_node, ctx, None),
        }
        for a in args {
            match a {
                Expr::Function(_) => {
                    self.walk_expr(a, call_node, ctx, Some(call_stmt));
                }
                Expr::Ident { name, .. } => {
                    if ctx.collect {
                        self.aux.name_callback_refs.push((call_stmt, name.clone()));
                    }
                    self.add_use(ctx, name);
                }
                other => self.walk_expr(other, call_node, ctx, None),
            }
        }
    }

    /// Non-path member expression: descend into its object and any computed
    /// subscripts.
    fn walk_member_parts(&mut self, e: &Expr, parent: u32, ctx: Ctx) {
        if let Expr::Member { object, prop, .. } = e {
            self.walk_expr(object, parent, ctx, None);
            if let MemberProp::Computed(idx) = prop {
                self.walk_expr(idx, parent, ctx, None);
            }
        }
    }

    /// Assignment target: identifiers are strong defs (plus a use for
    /// compound operators); property writes weakly define their root object;
    /// destructuring targets recurse.
    fn walk_assign_target(&mut self, target: &Expr, parent: u32, ctx: Ctx, compound: bool) {
        match target {
            Expr::Ident { name, .. } => {
                if compound {
                    self.add_use(ctx, name);
                }
                self.add_strong_def(ctx, name);
            }
            Expr::Member { .. } => {
                if let Some((root, path)) = member_path(target, self.src) {
                    let span = target.span();
                    let node =
                        self.new_node(NodeKind::MemberAccess, span, Some(parent), Some(ctx.stmt));
                    self.nodes[node as usize].prop_path = Some(path);
                    self.add_use(ctx, &root);
                    self.add_weak_def(ctx, &root);
                } else {
                    self.walk_member_parts(target, parent, ctx);
                }
            }
            Expr::Array { elems, .. } => {
                for x in elems {
                    self.walk_assign_target(x, parent, ctx, false);
                }
            }
            Expr::Object { parts, .. } => {
                for x in parts {
                    self.walk_assign_target(x, parent, ctx, false);
                }
            }
            Expr::Spread { arg, .. } => self.walk_assign_target(arg, parent, ctx, false),
            Expr::Assign { target: t, value, .. } => {
                // Destructuring default: `[a = 1] = xs`.
                self.walk_assign_target(t, parent, ctx, false);
                self.walk_expr(value, parent, ctx, None);
            }
            other => self.walk_expr(other, parent, ctx, None),
        }
    }
}

/// `require('<spec>')`, possibly behind property access (`require('m').x`),
/// as a declarator initializer.
fn require_target(init: &Expr, src: &str) -> Option<String> {
    match init {
        Expr::Call { callee, args, is_new: false, .. } => {
            if let Expr::Ident { name, .. } = &**callee {
                if name == "require" && args.len() == 1 {
                    if let Expr::Literal { span } = &args[0] {
                        let raw = src.get(span.start..span.end)?;
                        if raw.starts_with('\'') || raw.starts_with('"') {
                            return Some(ast::string_value(raw));
                        }
                    }
                }
            }
            None
        }
        Expr::Member { object, .. } => require_target(object, src),
        _ => None,
    }
}

/// Dotted path of a member chain when every step is static or a
/// string-literal subscript; returns `(root identifier, joined path)`.
fn member_path(e: &Expr, src: &str) -> Option<(String, String)> {
    let mut segs: Vec<String> = Vec::new();
    let mut cur = e;
    loop {
        match cur {
            Expr::Ident { name, .. } => {
                if name == "this" || name == "super" {
                    return None;
                }
                segs.push(name.clone());
                break;
            }
            Expr::Member { object, prop, .. } => {
                match prop {
                    MemberProp::Static(s) => segs.push(s.clone()),
                    MemberProp::Computed(idx) => match &**idx {
                        Expr::Literal { span } => {
                            let raw = src.get(span.start..span.end)?;
                            if raw.starts_with('\'') || raw.starts_with('"') {
                                segs.push(ast::string_value(raw));
                            } else if raw.starts_with('`') && !raw.contains("${") {
                                segs.push(raw[1..raw.len() - 1].to_string());
                            } else {
                                return None;
                            }
                        }
                        _ => return None,
                    },
                }
                cur = object;
            }
            _ => return None,
        }
    }
    segs.reverse();
    let root = segs[0].clone();
    Some((root, segs.join(".")))
}

fn assign_target_path(target: &Expr, src: &str) -> Option<(String, String)> {
    member_path(target, src)
}

/// Callee analysis: `(callee_name, prop_path)`.  The name is the rightmost
/// statically-known segment; `"<computed>"` when the callee is dynamic and
/// `"<anonymous>"` for immediately-invoked function literals.
fn callee_info(callee: &Expr, src: &str) -> (String, Option<String>) {
    match callee {
        Expr::Ident { name, .. } => (name.clone(), None),
        Expr::Member { object, prop, .. } => {
            if let Some((_, path)) = member_path(callee, src) {
                let last = path.rsplit('.').next().unwrap().to_string();
                return (last, Some(path));
            }
            match prop {
                MemberProp::Static(s) => {
                    let _ = object;
                    (s.clone(), None)
                }
                MemberProp::Computed(idx) => match &**idx {
                    Expr::Literal { span } => {
                        let raw = src.get(span.start..span.end);
                        match raw {
                            Some(r) if r.starts_with('\'') || r.starts_with('"') => {
                                (ast::string_value(r), None)
                            }
                            _ => ("<computed>".to_string(), None),
                        }
                    }
                    _ => ("<computed>".to_string(), None),
                },
            }
        }
        Expr::Function(_) => ("<anonymous>".to_string(), None),
        _ => ("<computed>".to_string(), None),
    }
}
