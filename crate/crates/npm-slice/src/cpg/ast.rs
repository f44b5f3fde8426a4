//! Recursive-descent parser for the supported JavaScript subset.
//!
//! Statements outside the subset (or malformed input) never abort the parse:
//! the offending token run is consumed with bracket awareness and becomes a
//! [`Stmt::Other`] span, so downstream layers still see it as one sequenced
//! region.  Expressions use precedence climbing; arrow functions are resolved
//! with bounded token lookahead; `for (x in y)` threads a no-`in` flag through
//! the binary-operator level.

use super::lexer::{LexedToken, TokKind};

/// A source extent: byte offsets plus 1-based start line/column and end line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
}

impl Span {
    pub fn join(a: Span, b: Span) -> Span {
        Span {
            start: a.start.min(b.start),
            end: a.end.max(b.end),
            line: a.line.min(b.line),
            col: if a.start <= b.start { a.col } else { b.col },
            end_line: a.end_line.max(b.end_line),
        }
    }
}

#[derive(Debug, Clone)]
pub enum MemberProp {
    Static(String),
    Computed(Box<Expr>),
}

#[derive(Debug, Clone)]
pub struct FuncLit {
    pub name: Option<String>,
    pub params: Vec<Pattern>,
    pub body: Vec<Stmt>,
    /// `function f(a, b)` / `(a, b) =>` — the part before the body.
    pub head_span: Span,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum Expr {
    Ident { name: String, span: Span },
    Literal { span: Span },
    Template { parts: Vec<Expr>, span: Span },
    Array { elems: Vec<Expr>, span: Span },
    /// Object literal; `parts` holds property values, computed keys, and
    /// spreads — everything that can read a variable.
    Object { parts: Vec<Expr>, span: Span },
    Member { object: Box<Expr>, prop: MemberProp, span: Span },
    Call { callee: Box<Expr>, args: Vec<Expr>, is_new: bool, span: Span },
    Assign { op: String, target: Box<Expr>, value: Box<Expr>, span: Span },
    Update { arg: Box<Expr>, span: Span },
    Unary { arg: Box<Expr>, span: Span },
    Binary { left: Box<Expr>, right: Box<Expr>, span: Span },
    Conditional { cond: Box<Expr>, cons: Box<Expr>, alt: Box<Expr>, span: Span },
    Function(Box<FuncLit>),
    Sequence { exprs: Vec<Expr>, span: Span },
    Spread { arg: Box<Expr>, span: Span },
    /// Consumed but not modeled (class expressions, `new.target`, …).
    Opaque { span: Span },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Ident { span, .. }
            | Expr::Literal { span }
            | Expr::Template { span, .. }
            | Expr::Array { span, .. }
            | Expr::Object { span, .. }
            | Expr::Member { span, .. }
            | Expr::Call { span, .. }
            | Expr::Assign { span, .. }
            | Expr::Update { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Conditional { span, .. }
            | Expr::Sequence { span, .. }
            | Expr::Spread { span, .. }
            | Expr::Opaque { span } => *span,
            Expr::Function(f) => f.span,
        }
    }

    fn span_mut(&mut self) -> &mut Span {
        match self {
            Expr::Ident { span, .. }
            | Expr::Literal { span }
            | Expr::Template { span, .. }
            | Expr::Array { span, .. }
            | Expr::Object { span, .. }
            | Expr::Member { span, .. }
            | Expr::Call { span, .. }
            | Expr::Assign { span, .. }
            | Expr::Update { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Conditional { span, .. }
            | Expr::Sequence { span, .. }
            | Expr::Spread { span, .. }
            | Expr::Opaque { span } => span,
            Expr::Function(f) => &mut f.span,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Pattern {
    Ident { name: String, span: Span },
    Object { props: Vec<(Option<Expr>, Pattern)>, span: Span },
    Array { elems: Vec<Pattern>, span: Span },
    Default { inner: Box<Pattern>, value: Box<Expr>, span: Span },
    Rest { inner: Box<Pattern>, span: Span },
}

impl Pattern {
    /// All identifier names this pattern binds.
    pub fn bound_names(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Ident { name, .. } => out.push(name.clone()),
            Pattern::Object { props, .. } => {
                for (_, p) in props {
                    p.bound_names(out);
                }
            }
            Pattern::Array { elems, .. } => {
                for p in elems {
                    p.bound_names(out);
                }
            }
            Pattern::Default { inner, .. } | Pattern::Rest { inner, .. } => {
                inner.bound_names(out)
            }
        }
    }

    /// Expressions embedded in the pattern (computed keys, default values).
    pub fn embedded_exprs(&self, out: &mut Vec<Expr>) {
        match self {
            Pattern::Ident { .. } => {}
            Pattern::Object { props, .. } => {
                for (k, p) in props {
                    if let Some(k) = k {
                        out.push(k.clone());
                    }
                    p.embedded_exprs(out);
                }
            }
            Pattern::Array { elems, .. } => {
                for p in elems {
                    p.embedded_exprs(out);
                }
            }
            Pattern::Default { inner, value, .. } => {
                out.push((**value).clone());
                inner.embedded_exprs(out);
            }
            Pattern::Rest { inner, .. } => inner.embedded_exprs(out),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatchClause {
    pub param: Option<Pattern>,
    pub body: Vec<Stmt>,
    pub head_span: Span,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    VarDecl {
        /// Parse fidelity only; a flat namespace makes `var`/`let`/`const`
        /// equivalent downstream.
        #[allow(dead_code)]
        kind: String,
        decls: Vec<(Pattern, Option<Expr>)>,
        span: Span,
    },
    Expr { expr: Expr, span: Span },
    FuncDecl { func: FuncLit, span: Span },
    Return { arg: Option<Expr>, span: Span },
    Throw { arg: Expr, span: Span },
    If { cond: Expr, cons: Vec<Stmt>, alt: Option<Vec<Stmt>>, head_span: Span },
    While { cond: Expr, body: Vec<Stmt>, head_span: Span },
    DoWhile { cond: Expr, body: Vec<Stmt>, head_span: Span },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        update: Option<Expr>,
        body: Vec<Stmt>,
        head_span: Span,
    },
    ForIn {
        decl_kind: Option<String>,
        pat: Pattern,
        right: Expr,
        /// Parse fidelity only; `for…in` and `for…of` flow identically.
        #[allow(dead_code)]
        of: bool,
        body: Vec<Stmt>,
        head_span: Span,
    },
    Try {
        body: Vec<Stmt>,
        catch: Option<CatchClause>,
        finally: Option<Vec<Stmt>>,
        head_span: Span,
    },
    /// Static import; `names` are the local bindings, `module` the specifier.
    Import { names: Vec<String>, module: Option<String>, span: Span },
    /// Outside the subset or unparseable; one sequenced opaque region.
    Other { span: Span },
}

#[derive(Debug, Clone)]
pub struct ParseDiag {
    pub line: u32,
    pub message: String,
}

struct ParseErr;

type PResult<T> = Result<T, ParseErr>;

/// Identifier-position keywords that cannot start a plain identifier
/// expression (`of`, `async`, … are contextual and excluded).
fn is_reserved(name: &str) -> bool {
    matches!(
        name,
        "var" | "let"
            | "const"
            | "function"
            | "return"
            | "if"
            | "else"
            | "for"
            | "while"
            | "do"
            | "try"
            | "catch"
            | "finally"
            | "new"
            | "typeof"
            | "instanceof"
            | "in"
            | "delete"
            | "void"
            | "class"
            | "extends"
            | "import"
            | "export"
            | "switch"
            | "case"
            | "break"
            | "continue"
            | "throw"
            | "with"
            | "debugger"
    )
}

pub fn parse(tokens: &[LexedToken], _src: &str) -> (Vec<Stmt>, Vec<ParseDiag>) {
    let mut p = Parser { toks: tokens, pos: 0, depth: 0, diags: Vec::new() };
    let stmts = p.stmt_list(false);
    (stmts, p.diags)
}

/// Hard cap on statement/expression nesting. Pathological inputs such as ten
/// thousand nested parentheses would otherwise exhaust the native stack, which
/// aborts the process rather than unwinding; past this depth the parser bails
/// out with a diagnostic and the region is kept as an opaque statement.
const MAX_NESTING_DEPTH: u32 = 200;

struct Parser<'a> {
    toks: &'a [LexedToken],
    pos: usize,
    depth: u32,
    diags: Vec<ParseDiag>,
}

impl<'a> Parser<'a> {
    fn cur(&self) -> &LexedToken {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek(&self, off: usize) -> &LexedToken {
        &self.toks[(self.pos + off).min(self.toks.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.cur().kind == TokKind::Eof
    }

    fn bump(&mut self) -> &LexedToken {
        let i = self.pos;
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        &self.toks[i]
    }

    fn tok_span(&self, t: &LexedToken) -> Span {
        let nl = t.text.matches('\n').count() as u32;
        Span { start: t.start, end: t.end, line: t.line, col: t.col, end_line: t.line + nl }
    }

    fn prev_end_span(&self) -> Span {
        let i = self.pos.saturating_sub(1);
        self.tok_span(&self.toks[i])
    }

    fn span_from(&self, start_idx: usize) -> Span {
        let a = self.tok_span(&self.toks[start_idx.min(self.toks.len() - 1)]);
        let b = self.prev_end_span();
        Span::join(a, b)
    }

    fn at_punct(&self, s: &str) -> bool {
        let t = self.cur();
        t.kind == TokKind::Punct && t.text == s
    }

    fn at_ident(&self, s: &str) -> bool {
        let t = self.cur();
        t.kind == TokKind::Ident && t.text == s
    }

    fn eat_punct(&mut self, s: &str) -> bool {
        if self.at_punct(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_ident(&mut self, s: &str) -> bool {
        if self.at_ident(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, s: &str) -> PResult<()> {
        if self.eat_punct(s) {
            Ok(())
        } else {
            Err(ParseErr)
        }
    }

    /// Statement terminator: `;`, or automatic insertion before `}`, EOF, or
    /// a line break.
    fn semi(&mut self) -> PResult<()> {
        if self.eat_punct(";") || self.at_punct("}") || self.at_eof() || self.cur().nl_before {
            Ok(())
        } else {
            Err(ParseErr)
        }
    }

    // ---- statements ----

    fn stmt_list(&mut self, in_block: bool) -> Vec<Stmt> {
        let mut out = Vec::new();
        loop {
            if self.at_eof() || (in_block && self.at_punct("}")) {
                break;
            }
            let start = self.pos;
            match self.stmt() {
                Ok(items) => out.extend(items),
                Err(_) => self.recover(start, &mut out),
            }
        }
        out
    }

    /// Bracket-aware panic recovery: consume to the next `;` at depth zero or
    /// stop before a block-closing `}`, and record the region as `Other`.
    fn recover(&mut self, start: usize, out: &mut Vec<Stmt>) {
        self.pos = start;
        let line = self.cur().line;
        let mut depth: i32 = 0;
        let mut consumed = 0usize;
        loop {
            if self.at_eof() {
                break;
            }
            let t = self.cur();
            let is_open = matches!(t.kind, TokKind::TemplateHead)
                || (t.kind == TokKind::Punct && matches!(t.text.as_str(), "(" | "[" | "{"));
            let is_close = matches!(t.kind, TokKind::TemplateTail)
                || (t.kind == TokKind::Punct && matches!(t.text.as_str(), ")" | "]" | "}"));
            // Stop at a statement boundary: a top-level `;`, or — mirroring
            // automatic semicolon insertion — a token on a later line.
            if depth == 0 && consumed > 0 && t.line != line {
                break;
            }
            if depth == 0 && t.kind == TokKind::Punct && t.text == ";" {
                self.bump();
                consumed += 1;
                break;
            }
            if depth == 0 && is_close {
                if consumed == 0 {
                    self.bump();
                    consumed += 1;
                }
                break;
            }
            if is_open {
                depth += 1;
            } else if is_close {
                depth -= 1;
            }
            self.bump();
            consumed += 1;
        }
        if consumed > 0 {
            let span = self.span_from(start);
            self.diags.push(ParseDiag { line, message: "unparsed region".into() });
            out.push(Stmt::Other { span });
        }
    }

    /// Checked entry to every recursive descent: errors out past
    /// [`MAX_NESTING_DEPTH`] instead of risking native stack exhaustion.
    fn enter(&mut self) -> PResult<()> {
        if self.depth >= MAX_NESTING_DEPTH {
            let line = self.cur().line;
            self.diags.push(ParseDiag { line, message: "nesting too deep".into() });
            return Err(ParseErr);
        }
        self.depth += 1;
        Ok(())
    }

    fn stmt(&mut self) -> PResult<Vec<Stmt>> {
        self.enter()?;
        let r = self.stmt_inner();
        self.depth -= 1;
        r
    }

    fn stmt_inner(&mut self) -> PResult<Vec<Stmt>> {
        if self.at_punct(";") {
            self.bump();
            return Ok(vec![]);
        }
        if self.at_punct("{") {
            self.bump();
            let stmts = self.stmt_list(true);
            self.expect_punct("}")?;
            return Ok(stmts);
        }
        let t = self.cur().clone();
        if t.kind == TokKind::Ident {
            match t.text.as_str() {
                "var" | "let" | "const" => {
                    let declish = matches!(self.peek(1).kind, TokKind::Ident)
                        && !is_reserved(&self.peek(1).text)
                        || (self.peek(1).kind == TokKind::Punct
                            && matches!(self.peek(1).text.as_str(), "{" | "["));
                    if declish {
                        return self.var_decl_stmt().map(|s| vec![s]);
                    }
                }
                "function" => return self.func_decl_stmt(false).map(|s| vec![s]),
                "async" if self.peek(1).kind == TokKind::Ident
                    && self.peek(1).text == "function" =>
                {
                    return self.func_decl_stmt(true).map(|s| vec![s]);
                }
                "if" => return self.if_stmt().map(|s| vec![s]),
                "while" => return self.while_stmt().map(|s| vec![s]),
                "do" => return self.do_while_stmt().map(|s| vec![s]),
                "for" => return self.for_stmt().map(|s| vec![s]),
                "try" => return self.try_stmt().map(|s| vec![s]),
                "return" => return self.return_stmt().map(|s| vec![s]),
                "throw" => return self.throw_stmt().map(|s| vec![s]),
                "import" if !(self.peek(1).kind == TokKind::Punct
                    && self.peek(1).text == "(") =>
                {
                    return self.import_stmt().map(|s| vec![s]);
                }
                "export" => return self.export_stmt(),
                "break" | "continue" => {
                    let start = self.pos;
                    self.bump();
                    if self.cur().kind == TokKind::Ident
                        && !self.cur().nl_before
                        && !is_reserved(&self.cur().text)
                    {
                        self.bump(); // label
                    }
                    let _ = self.semi();
                    return Ok(vec![Stmt::Other { span: self.span_from(start) }]);
                }
                "switch" => return self.opaque_head_block(true).map(|s| vec![s]),
                "class" => return self.class_stmt().map(|s| vec![s]),
                "debugger" => {
                    let start = self.pos;
                    self.bump();
                    let _ = self.semi();
                    return Ok(vec![Stmt::Other { span: self.span_from(start) }]);
                }
                "with" => return self.opaque_head_block(false).map(|s| vec![s]),
                _ => {
                    // Labeled statement: `name: stmt`.
                    if !is_reserved(&t.text)
                        && self.peek(1).kind == TokKind::Punct
                        && self.peek(1).text == ":"
                    {
                        self.bump();
                        self.bump();
                        return self.stmt();
                    }
                }
            }
        }
        // Expression statement.
        let start = self.pos;
        let expr = self.expression(false)?;
        self.semi()?;
        let span = self.span_from(start);
        Ok(vec![Stmt::Expr { expr, span }])
    }

    fn var_decl_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let kind = self.bump().text.clone();
        let mut decls = Vec::new();
        loop {
            let pat = self.pattern()?;
            let init = if self.eat_punct("=") { Some(self.assign_expr(false)?) } else { None };
            decls.push((pat, init));
            if !self.eat_punct(",") {
                break;
            }
        }
        self.semi()?;
        Ok(Stmt::VarDecl { kind, decls, span: self.span_from(start) })
    }

    fn func_decl_stmt(&mut self, is_async: bool) -> PResult<Stmt> {
        let start = self.pos;
        if is_async {
            self.bump();
        }
        let func = self.function_literal()?;
        Ok(Stmt::FuncDecl { func, span: self.span_from(start) })
    }

    /// `function name?(params) { body }` with the cursor on `function`.
    fn function_literal(&mut self) -> PResult<FuncLit> {
        let start = self.pos;
        self.bump(); // function
        self.eat_punct("*");
        let name = if self.cur().kind == TokKind::Ident && !is_reserved(&self.cur().text) {
            Some(self.bump().text.clone())
        } else {
            None
        };
        self.expect_punct("(")?;
        let params = self.param_list()?;
        let head_span = self.span_from(start);
        self.expect_punct("{")?;
        let body = self.stmt_list(true);
        self.expect_punct("}")?;
        Ok(FuncLit { name, params, body, head_span, span: self.span_from(start) })
    }

    /// Parameters up to and including the closing `)`.
    fn param_list(&mut self) -> PResult<Vec<Pattern>> {
        let mut params = Vec::new();
        loop {
            if self.eat_punct(")") {
                break;
            }
            let pat = self.pattern_with_default()?;
            params.push(pat);
            if !self.eat_punct(",") {
                self.expect_punct(")")?;
                break;
            }
        }
        Ok(params)
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump(); // if
        self.expect_punct("(")?;
        let cond = self.expression(false)?;
        self.expect_punct(")")?;
        let head_span = self.span_from(start);
        let cons = self.stmt_or_block()?;
        let alt = if self.eat_ident("else") { Some(self.stmt_or_block()?) } else { None };
        Ok(Stmt::If { cond, cons, alt, head_span })
    }

    fn while_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump();
        self.expect_punct("(")?;
        let cond = self.expression(false)?;
        self.expect_punct(")")?;
        let head_span = self.span_from(start);
        let body = self.stmt_or_block()?;
        Ok(Stmt::While { cond, body, head_span })
    }

    fn do_while_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump(); // do
        let head_span = self.span_from(start);
        let body = self.stmt_or_block()?;
        if !self.eat_ident("while") {
            return Err(ParseErr);
        }
        self.expect_punct("(")?;
        let cond = self.expression(false)?;
        self.expect_punct(")")?;
        let _ = self.semi();
        Ok(Stmt::DoWhile { cond, body, head_span })
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump(); // for
        self.expect_punct("(")?;
        // Declaration-style init?
        if self.cur().kind == TokKind::Ident
            && matches!(self.cur().text.as_str(), "var" | "let" | "const")
            && (self.peek(1).kind == TokKind::Ident && !is_reserved(&self.peek(1).text)
                || self.peek(1).kind == TokKind::Punct
                    && matches!(self.peek(1).text.as_str(), "{" | "["))
        {
            let kind = self.bump().text.clone();
            let pat = self.pattern()?;
            if self.at_ident("in") || self.at_ident("of") {
                let of = self.bump().text == "of";
                let right = self.assign_expr(false)?;
                self.expect_punct(")")?;
                let head_span = self.span_from(start);
                let body = self.stmt_or_block()?;
                return Ok(Stmt::ForIn { decl_kind: Some(kind), pat, right, of, body, head_span });
            }
            // Classic for with declaration init.
            let decl_start = start + 1;
            let mut decls = Vec::new();
            let init0 = if self.eat_punct("=") { Some(self.assign_expr(true)?) } else { None };
            decls.push((pat, init0));
            while self.eat_punct(",") {
                let p = self.pattern()?;
                let i = if self.eat_punct("=") { Some(self.assign_expr(true)?) } else { None };
                decls.push((p, i));
            }
            let init_span = self.span_from(decl_start);
            let init = Some(Box::new(Stmt::VarDecl { kind, decls, span: init_span }));
            return self.for_classic_tail(start, init);
        }
        if self.eat_punct(";") {
            return self.for_classic_tail_after_semi(start, None);
        }
        let init_start = self.pos;
        let e = self.expression(true)?;
        if self.at_ident("in") || self.at_ident("of") {
            let of = self.bump().text == "of";
            let pat = match &e {
                Expr::Ident { name, span } => {
                    Pattern::Ident { name: name.clone(), span: *span }
                }
                _ => return Err(ParseErr), // member targets and patterns: out of subset
            };
            let right = self.assign_expr(false)?;
            self.expect_punct(")")?;
            let head_span = self.span_from(start);
            let body = self.stmt_or_block()?;
            return Ok(Stmt::ForIn { decl_kind: None, pat, right, of, body, head_span });
        }
        let init_span = self.span_from(init_start);
        let init = Some(Box::new(Stmt::Expr { expr: e, span: init_span }));
        self.for_classic_tail(start, init)
    }

    fn for_classic_tail(&mut self, start: usize, init: Option<Box<Stmt>>) -> PResult<Stmt> {
        self.expect_punct(";")?;
        self.for_classic_tail_after_semi(start, init)
    }

    fn for_classic_tail_after_semi(
        &mut self,
        start: usize,
        init: Option<Box<Stmt>>,
    ) -> PResult<Stmt> {
        let cond = if self.at_punct(";") { None } else { Some(self.expression(false)?) };
        self.expect_punct(";")?;
        let update = if self.at_punct(")") { None } else { Some(self.expression(false)?) };
        self.expect_punct(")")?;
        let head_span = self.span_from(start);
        let body = self.stmt_or_block()?;
        Ok(Stmt::For { init, cond, update, body, head_span })
    }

    fn try_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump(); // try
        let head_span = self.span_from(start);
        self.expect_punct("{")?;
        let body = self.stmt_list(true);
        self.expect_punct("}")?;
        let mut catch = None;
        if self.at_ident("catch") {
            let ch_start = self.pos;
            self.bump();
            let param = if self.eat_punct("(") {
                let p = self.pattern()?;
                self.expect_punct(")")?;
                Some(p)
            } else {
                None
            };
            let ch_head = self.span_from(ch_start);
            self.expect_punct("{")?;
            let cbody = self.stmt_list(true);
            self.expect_punct("}")?;
            catch = Some(CatchClause { param, body: cbody, head_span: ch_head });
        }
        let mut finally = None;
        if self.eat_ident("finally") {
            self.expect_punct("{")?;
            finally = Some(self.stmt_list(true));
            self.expect_punct("}")?;
        }
        if catch.is_none() && finally.is_none() {
            return Err(ParseErr);
        }
        Ok(Stmt::Try { body, catch, finally, head_span })
    }

    fn return_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump();
        let arg = if self.at_punct(";") || self.at_punct("}") || self.at_eof() || self.cur().nl_before
        {
            None
        } else {
            Some(self.expression(false)?)
        };
        self.semi()?;
        Ok(Stmt::Return { arg, span: self.span_from(start) })
    }

    fn throw_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump();
        let arg = self.expression(false)?;
        self.semi()?;
        Ok(Stmt::Throw { arg, span: self.span_from(start) })
    }

    fn import_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump(); // import
        let mut names = Vec::new();
        let module;
        if self.cur().kind == TokKind::Str {
            module = Some(string_value(&self.bump().text));
            let _ = self.semi();
            return Ok(Stmt::Import { names, module, span: self.span_from(start) });
        }
        // default / namespace / named bindings, in any legal combination.
        loop {
            if self.cur().kind == TokKind::Ident && !is_reserved(&self.cur().text) && !self.at_ident("from") {
                names.push(self.bump().text.clone());
            } else if self.eat_punct("*") {
                if !self.eat_ident("as") {
                    return Err(ParseErr);
                }
                names.push(self.bump().text.clone());
            } else if self.eat_punct("{") {
                loop {
                    if self.eat_punct("}") {
                        break;
                    }
                    if self.cur().kind != TokKind::Ident && self.cur().kind != TokKind::Str {
                        return Err(ParseErr);
                    }
                    let imported = self.bump().text.clone();
                    if self.eat_ident("as") {
                        names.push(self.bump().text.clone());
                    } else {
                        names.push(imported);
                    }
                    if !self.eat_punct(",") {
                        self.expect_punct("}")?;
                        break;
                    }
                }
            } else {
                return Err(ParseErr);
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        if !self.eat_ident("from") || self.cur().kind != TokKind::Str {
            return Err(ParseErr);
        }
        module = Some(string_value(&self.bump().text));
        let _ = self.semi();
        Ok(Stmt::Import { names, module, span: self.span_from(start) })
    }

    fn export_stmt(&mut self) -> PResult<Vec<Stmt>> {
        let start = self.pos;
        self.bump(); // export
        if self.eat_ident("default") {
            if self.at_ident("function") || self.at_ident("async") {
                return self.stmt();
            }
            let expr = self.assign_expr(false)?;
            let _ = self.semi();
            let span = self.span_from(start);
            return Ok(vec![Stmt::Expr { expr, span }]);
        }
        if self.at_ident("var")
            || self.at_ident("let")
            || self.at_ident("const")
            || self.at_ident("function")
            || self.at_ident("async")
            || self.at_ident("class")
        {
            return self.stmt();
        }
        // `export { … }` / `export * from '…'`: re-export, nothing executes.
        if self.eat_punct("{") {
            self.consume_balanced_until_close("}")?;
        } else if self.eat_punct("*") {
            // fallthrough to optional from
        } else {
            return Err(ParseErr);
        }
        if self.eat_ident("from") {
            if self.cur().kind != TokKind::Str {
                return Err(ParseErr);
            }
            self.bump();
        }
        let _ = self.semi();
        Ok(vec![Stmt::Other { span: self.span_from(start) }])
    }

    fn class_stmt(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        self.bump(); // class
        while !self.at_punct("{") && !self.at_eof() {
            self.bump(); // name, extends clause
        }
        self.expect_punct("{")?;
        self.consume_balanced_until_close("}")?;
        let _ = self.semi();
        Ok(Stmt::Other { span: self.span_from(start) })
    }

    /// `switch (e) { … }` / `with (e) stmt` — consumed whole as `Other`.
    fn opaque_head_block(&mut self, block_required: bool) -> PResult<Stmt> {
        let start = self.pos;
        self.bump(); // keyword
        self.expect_punct("(")?;
        self.consume_balanced_until_close(")")?;
        if self.at_punct("{") {
            self.bump();
            self.consume_balanced_until_close("}")?;
        } else if block_required {
            return Err(ParseErr);
        } else {
            let _ = self.stmt()?; // `with` body: consumed, not modeled
        }
        Ok(Stmt::Other { span: self.span_from(start) })
    }

    /// With the opener already consumed, skip to (and consume) the matching
    /// closer, tracking all bracket kinds and template parts.
    fn consume_balanced_until_close(&mut self, close: &str) -> PResult<()> {
        let mut depth: i32 = 0;
        loop {
            if self.at_eof() {
                return Err(ParseErr);
            }
            let t = self.cur();
            let is_open = matches!(t.kind, TokKind::TemplateHead)
                || (t.kind == TokKind::Punct && matches!(t.text.as_str(), "(" | "[" | "{"));
            let is_close = matches!(t.kind, TokKind::TemplateTail)
                || (t.kind == TokKind::Punct && matches!(t.text.as_str(), ")" | "]" | "}"));
            if depth == 0 && t.kind == TokKind::Punct && t.text == close {
                self.bump();
                return Ok(());
            }
            if is_open {
                depth += 1;
            } else if is_close {
                depth -= 1;
                if depth < 0 {
                    return Err(ParseErr);
                }
            }
            self.bump();
        }
    }

    fn stmt_or_block(&mut self) -> PResult<Vec<Stmt>> {
        self.stmt()
    }

    // ---- patterns ----

    fn pattern(&mut self) -> PResult<Pattern> {
        let t = self.cur().clone();
        match t.kind {
            TokKind::Ident if !is_reserved(&t.text) => {
                self.bump();
                let span = self.tok_span(&t);
                Ok(Pattern::Ident { name: t.text, span })
            }
            TokKind::Punct if t.text == "{" => {
                let start = self.pos;
                self.bump();
                let mut props = Vec::new();
                loop {
                    if self.eat_punct("}") {
                        break;
                    }
                    if self.at_punct("...") {
                        self.bump();
                        let inner = self.pattern()?;
                        let span = inner.span_of();
                        props.push((None, Pattern::Rest { inner: Box::new(inner), span }));
                    } else {
                        let mut computed_key = None;
                        let key_tok = self.cur().clone();
                        let key_name: Option<String> = match key_tok.kind {
                            TokKind::Ident => {
                                self.bump();
                                Some(key_tok.text.clone())
                            }
                            TokKind::Str => {
                                self.bump();
                                Some(string_value(&key_tok.text))
                            }
                            TokKind::Num => {
                                self.bump();
                                Some(key_tok.text.clone())
                            }
                            TokKind::Punct if key_tok.text == "[" => {
                                self.bump();
                                let e = self.assign_expr(false)?;
                                self.expect_punct("]")?;
                                computed_key = Some(e);
                                None
                            }
                            _ => return Err(ParseErr),
                        };
                        let mut pat = if self.eat_punct(":") {
                            self.pattern()?
                        } else {
                            match key_name.clone() {
                                Some(name) if !is_reserved(&name) => {
                                    Pattern::Ident { name, span: self.tok_span(&key_tok) }
                                }
                                _ => return Err(ParseErr),
                            }
                        };
                        if self.at_punct("=") {
                            self.bump();
                            let v = self.assign_expr(false)?;
                            let span = Span::join(pat.span_of(), v.span());
                            pat = Pattern::Default { inner: Box::new(pat), value: Box::new(v), span };
                        }
                        props.push((computed_key, pat));
                    }
                    if !self.eat_punct(",") {
                        self.expect_punct("}")?;
                        break;
                    }
                }
                Ok(Pattern::Object { props, span: self.span_from(start) })
            }
            TokKind::Punct if t.text == "[" => {
                let start = self.pos;
                self.bump();
                let mut elems = Vec::new();
                loop {
                    if self.eat_punct("]") {
                        break;
                    }
                    if self.eat_punct(",") {
                        continue; // elision
                    }
                    let pat = if self.at_punct("...") {
                        self.bump();
                        let inner = self.pattern()?;
                        let span = inner.span_of();
                        Pattern::Rest { inner: Box::new(inner), span }
                    } else {
                        self.pattern_with_default()?
                    };
                    elems.push(pat);
                    if !self.eat_punct(",") {
                        self.expect_punct("]")?;
                        break;
                    }
                }
                Ok(Pattern::Array { elems, span: self.span_from(start) })
            }
            _ => Err(ParseErr),
        }
    }

    fn pattern_with_default(&mut self) -> PResult<Pattern> {
        if self.at_punct("...") {
            self.bump();
            let inner = self.pattern()?;
            let span = inner.span_of();
            return Ok(Pattern::Rest { inner: Box::new(inner), span });
        }
        let pat = self.pattern()?;
        if self.eat_punct("=") {
            let v = self.assign_expr(false)?;
            let span = Span::join(pat.span_of(), v.span());
            return Ok(Pattern::Default { inner: Box::new(pat), value: Box::new(v), span });
        }
        Ok(pat)
    }

    // ---- expressions ----

    fn expression(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.pos;
        let first = self.assign_expr(no_in)?;
        if !self.at_punct(",") {
            return Ok(first);
        }
        let mut exprs = vec![first];
        while self.eat_punct(",") {
            exprs.push(self.assign_expr(no_in)?);
        }
        Ok(Expr::Sequence { exprs, span: self.span_from(start) })
    }

    fn assign_expr(&mut self, no_in: bool) -> PResult<Expr> {
        self.enter()?;
        let r = self.assign_expr_inner(no_in);
        self.depth -= 1;
        r
    }

    fn assign_expr_inner(&mut self, no_in: bool) -> PResult<Expr> {
        if let Some(arrow) = self.try_arrow(no_in)? {
            return Ok(arrow);
        }
        let start = self.pos;
        let left = self.conditional(no_in)?;
        let op = {
            let t = self.cur();
            if t.kind == TokKind::Punct
                && matches!(
                    t.text.as_str(),
                    "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "**=" | "<<=" | ">>=" | ">>>="
                        | "&=" | "|=" | "^=" | "&&=" | "||=" | "??="
                )
            {
                Some(t.text.clone())
            } else {
                None
            }
        };
        if let Some(op) = op {
            self.bump();
            let value = self.assign_expr(no_in)?;
            let span = self.span_from(start);
            return Ok(Expr::Assign { op, target: Box::new(left), value: Box::new(value), span });
        }
        Ok(left)
    }

    /// Bounded lookahead for arrow functions:
    /// `x =>`, `(…) =>`, `async x =>`, `async (…) =>`.
    fn try_arrow(&mut self, no_in: bool) -> PResult<Option<Expr>> {
        let start = self.pos;
        let mut i = self.pos;
        if self.toks[i].kind == TokKind::Ident
            && self.toks[i].text == "async"
            && !self.peek(1).nl_before
            && (self.peek(1).kind == TokKind::Ident && !is_reserved(&self.peek(1).text)
                || self.peek(1).kind == TokKind::Punct && self.peek(1).text == "(")
        {
            i += 1;
        }
        let t = &self.toks[i.min(self.toks.len() - 1)];
        let params_end;
        if t.kind == TokKind::Ident && !is_reserved(&t.text) {
            params_end = i + 1;
        } else if t.kind == TokKind::Punct && t.text == "(" {
            let mut j = i + 1;
            let mut depth = 1i32;
            loop {
                if j >= self.toks.len() || self.toks[j].kind == TokKind::Eof {
                    return Ok(None);
                }
                let tj = &self.toks[j];
                let open = matches!(tj.kind, TokKind::TemplateHead)
                    || tj.kind == TokKind::Punct && matches!(tj.text.as_str(), "(" | "[" | "{");
                let close = matches!(tj.kind, TokKind::TemplateTail)
                    || tj.kind == TokKind::Punct && matches!(tj.text.as_str(), ")" | "]" | "}");
                if open {
                    depth += 1;
                } else if close {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                j += 1;
            }
            params_end = j + 1;
        } else {
            return Ok(None);
        }
        let after = &self.toks[params_end.min(self.toks.len() - 1)];
        if !(after.kind == TokKind::Punct && after.text == "=>") {
            return Ok(None);
        }
        // Commit: parse params for real.
        if self.at_ident("async") {
            self.bump();
        }
        let params = if self.cur().kind == TokKind::Ident {
            let t = self.bump().clone();
            vec![Pattern::Ident { name: t.text.clone(), span: self.tok_span(&t) }]
        } else {
            self.expect_punct("(")?;
            self.param_list()?
        };
        let head_span = self.span_from(start);
        self.expect_punct("=>")?;
        let body = if self.at_punct("{") {
            self.bump();
            let b = self.stmt_list(true);
            self.expect_punct("}")?;
            b
        } else {
            let e = self.assign_expr(no_in)?;
            let span = e.span();
            vec![Stmt::Return { arg: Some(e), span }]
        };
        let span = self.span_from(start);
        Ok(Some(Expr::Function(Box::new(FuncLit {
            name: None,
            params,
            body,
                        head_span,
            span,
        }))))
    }

    fn conditional(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.pos;
        let cond = self.binary(1, no_in)?;
        if self.at_punct("?") && !self.at_punct("?.") {
            self.bump();
            let cons = self.assign_expr(false)?;
            self.expect_punct(":")?;
            let alt = self.assign_expr(no_in)?;
            let span = self.span_from(start);
            return Ok(Expr::Conditional {
                cond: Box::new(cond),
                cons: Box::new(cons),
                alt: Box::new(alt),
                span,
            });
        }
        Ok(cond)
    }

    fn binary_prec(&self, no_in: bool) -> Option<(u8, bool)> {
        let t = self.cur();
        match t.kind {
            TokKind::Punct => match t.text.as_str() {
                "??" => Some((1, false)),
                "||" => Some((2, false)),
                "&&" => Some((3, false)),
                "|" => Some((4, false)),
                "^" => Some((5, false)),
                "&" => Some((6, false)),
                "==" | "!=" | "===" | "!==" => Some((7, false)),
                "<" | ">" | "<=" | ">=" => Some((8, false)),
                "<<" | ">>" | ">>>" => Some((9, false)),
                "+" | "-" => Some((10, false)),
                "*" | "/" | "%" => Some((11, false)),
                "**" => Some((12, true)),
                _ => None,
            },
            TokKind::Ident => match t.text.as_str() {
                "instanceof" => Some((8, false)),
                "in" if !no_in => Some((8, false)),
                _ => None,
            },
            _ => None,
        }
    }

    fn binary(&mut self, min_prec: u8, no_in: bool) -> PResult<Expr> {
        let start = self.pos;
        let mut left = self.unary(no_in)?;
        while let Some((prec, right_assoc)) = self.binary_prec(no_in) {
            if prec < min_prec {
                break;
            }
            self.bump();
            let next_min = if right_assoc { prec } else { prec + 1 };
            let right = self.binary(next_min, no_in)?;
            let span = self.span_from(start);
            left = Expr::Binary { left: Box::new(left), right: Box::new(right), span };
        }
        Ok(left)
    }

    fn unary(&mut self, no_in: bool) -> PResult<Expr> {
        self.enter()?;
        let r = self.unary_inner(no_in);
        self.depth -= 1;
        r
    }

    fn unary_inner(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.pos;
        let t = self.cur().clone();
        let is_unary_punct =
            t.kind == TokKind::Punct && matches!(t.text.as_str(), "!" | "~" | "+" | "-");
        let is_unary_kw = t.kind == TokKind::Ident
            && matches!(t.text.as_str(), "typeof" | "void" | "delete" | "await" | "yield");
        if is_unary_punct || is_unary_kw {
            self.bump();
            if t.text == "yield" && (self.at_punct(";") || self.at_punct(")") || self.cur().nl_before) {
                return Ok(Expr::Ident { name: "yield".into(), span: self.tok_span(&t) });
            }
            let arg = self.unary(no_in)?;
            let span = self.span_from(start);
            return Ok(Expr::Unary { arg: Box::new(arg), span });
        }
        if t.kind == TokKind::Punct && matches!(t.text.as_str(), "++" | "--") {
            self.bump();
            let arg = self.unary(no_in)?;
            let span = self.span_from(start);
            return Ok(Expr::Update { arg: Box::new(arg), span });
        }
        let mut e = self.call_member(no_in)?;
        // Postfix update on the same line.
        if self.cur().kind == TokKind::Punct
            && matches!(self.cur().text.as_str(), "++" | "--")
            && !self.cur().nl_before
        {
            self.bump();
            let span = self.span_from(start);
            e = Expr::Update { arg: Box::new(e), span };
        }
        Ok(e)
    }

    fn call_member(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.pos;
        if self.at_ident("new") {
            self.bump();
            if self.at_punct(".") {
                // new.target
                self.bump();
                if self.cur().kind == TokKind::Ident {
                    self.bump();
                }
                return Ok(Expr::Opaque { span: self.span_from(start) });
            }
            let callee = self.member_only(no_in)?;
            let args = if self.at_punct("(") {
                self.bump();
                self.arg_list()?
            } else {
                Vec::new()
            };
            let span = self.span_from(start);
            let mut e = Expr::Call { callee: Box::new(callee), args, is_new: true, span };
            e = self.chain_tail(e, start, no_in)?;
            return Ok(e);
        }
        let base = self.primary(no_in)?;
        self.chain_tail(base, start, no_in)
    }

    /// Member chain without call arguments (the `new` callee position).
    fn member_only(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.pos;
        let mut e = self.primary(no_in)?;
        loop {
            if self.at_punct(".") {
                self.bump();
                if self.cur().kind != TokKind::Ident {
                    return Err(ParseErr);
                }
                let name = self.bump().text.clone();
                let span = self.span_from(start);
                e = Expr::Member { object: Box::new(e), prop: MemberProp::Static(name), span };
            } else if self.at_punct("[") {
                self.bump();
                let idx = self.expression(false)?;
                self.expect_punct("]")?;
                let span = self.span_from(start);
                e = Expr::Member {
                    object: Box::new(e),
                    prop: MemberProp::Computed(Box::new(idx)),
                    span,
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn chain_tail(&mut self, mut e: Expr, start: usize, _no_in: bool) -> PResult<Expr> {
        loop {
            if self.at_punct(".") || self.at_punct("?.") {
                let optional = self.cur().text == "?.";
                self.bump();
                if optional && self.at_punct("(") {
                    self.bump();
                    let args = self.arg_list()?;
                    let span = self.span_from(start);
                    e = Expr::Call { callee: Box::new(e), args, is_new: false, span };
                    continue;
                }
                if self.cur().kind != TokKind::Ident {
                    return Err(ParseErr);
                }
                let name = self.bump().text.clone();
                let span = self.span_from(start);
                e = Expr::Member { object: Box::new(e), prop: MemberProp::Static(name), span };
            } else if self.at_punct("[") {
                self.bump();
                let idx = self.expression(false)?;
                self.expect_punct("]")?;
                let span = self.span_from(start);
                e = Expr::Member {
                    object: Box::new(e),
                    prop: MemberProp::Computed(Box::new(idx)),
                    span,
                };
            } else if self.at_punct("(") {
                self.bump();
                let args = self.arg_list()?;
                let span = self.span_from(start);
                e = Expr::Call { callee: Box::new(e), args, is_new: false, span };
            } else if matches!(self.cur().kind, TokKind::TemplateFull | TokKind::TemplateHead) {
                // Tagged template: model as a call whose argument is the template.
                let tpl = self.template()?;
                let span = self.span_from(start);
                e = Expr::Call { callee: Box::new(e), args: vec![tpl], is_new: false, span };
            } else {
                return Ok(e);
            }
        }
    }

    /// Arguments up to and including the closing `)`.
    fn arg_list(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        loop {
            if self.eat_punct(")") {
                break;
            }
            if self.at_punct("...") {
                let s = self.pos;
                self.bump();
                let arg = self.assign_expr(false)?;
                let span = self.span_from(s);
                args.push(Expr::Spread { arg: Box::new(arg), span });
            } else {
                args.push(self.assign_expr(false)?);
            }
            if !self.eat_punct(",") {
                self.expect_punct(")")?;
                break;
            }
        }
        Ok(args)
    }

    fn template(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let t = self.cur().clone();
        if t.kind == TokKind::TemplateFull {
            self.bump();
            return Ok(Expr::Literal { span: self.tok_span(&t) });
        }
        debug_assert_eq!(t.kind, TokKind::TemplateHead);
        self.bump();
        let mut parts = Vec::new();
        loop {
            parts.push(self.expression(false)?);
            let t = self.cur().clone();
            match t.kind {
                TokKind::TemplateMiddle => {
                    self.bump();
                }
                TokKind::TemplateTail => {
                    self.bump();
                    break;
                }
                _ => return Err(ParseErr),
            }
        }
        Ok(Expr::Template { parts, span: self.span_from(start) })
    }

    fn primary(&mut self, _no_in: bool) -> PResult<Expr> {
        let t = self.cur().clone();
        match t.kind {
            TokKind::Ident => match t.text.as_str() {
                "function" => {
                    let f = self.function_literal()?;
                    Ok(Expr::Function(Box::new(f)))
                }
                "async" if self.peek(1).kind == TokKind::Ident
                    && self.peek(1).text == "function" =>
                {
                    self.bump();
                    let start = self.pos;
                    let mut f = self.function_literal()?;
                    f.span = self.span_from(start.saturating_sub(1));
                    Ok(Expr::Function(Box::new(f)))
                }
                "class" => {
                    let start = self.pos;
                    self.bump();
                    while !self.at_punct("{") && !self.at_eof() {
                        self.bump();
                    }
                    self.expect_punct("{")?;
                    self.consume_balanced_until_close("}")?;
                    Ok(Expr::Opaque { span: self.span_from(start) })
                }
                "true" | "false" | "null" => {
                    self.bump();
                    Ok(Expr::Literal { span: self.tok_span(&t) })
                }
                "this" | "super" => {
                    self.bump();
                    let span = self.tok_span(&t);
                    Ok(Expr::Ident { name: t.text, span })
                }
                name if !is_reserved(name) => {
                    self.bump();
                    let span = self.tok_span(&t);
                    Ok(Expr::Ident { name: t.text, span })
                }
                _ => Err(ParseErr),
            },
            TokKind::Num | TokKind::Str | TokKind::Regex => {
                self.bump();
                Ok(Expr::Literal { span: self.tok_span(&t) })
            }
            TokKind::TemplateFull | TokKind::TemplateHead => self.template(),
            TokKind::Punct => match t.text.as_str() {
                "(" => {
                    let start = self.pos;
                    self.bump();
                    let mut e = self.expression(false)?;
                    self.expect_punct(")")?;
                    *e.span_mut() = self.span_from(start);
                    Ok(e)
                }
                "[" => {
                    let start = self.pos;
                    self.bump();
                    let mut elems = Vec::new();
                    loop {
                        if self.eat_punct("]") {
                            break;
                        }
                        if self.eat_punct(",") {
                            continue;
                        }
                        if self.at_punct("...") {
                            let s = self.pos;
                            self.bump();
                            let arg = self.assign_expr(false)?;
                            let span = self.span_from(s);
                            elems.push(Expr::Spread { arg: Box::new(arg), span });
                        } else {
                            elems.push(self.assign_expr(false)?);
                        }
                        if !self.eat_punct(",") {
                            self.expect_punct("]")?;
                            break;
                        }
                    }
                    Ok(Expr::Array { elems, span: self.span_from(start) })
                }
                "{" => self.object_literal(),
                _ => Err(ParseErr),
            },
            _ => Err(ParseErr),
        }
    }

    fn object_literal(&mut self) -> PResult<Expr> {
        let start = self.pos;
        self.bump(); // {
        let mut parts = Vec::new();
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.at_punct("...") {
                let s = self.pos;
                self.bump();
                let arg = self.assign_expr(false)?;
                let span = self.span_from(s);
                parts.push(Expr::Spread { arg: Box::new(arg), span });
            } else {
                // Optional get/set/async/* method prefixes.
                let mut prefixed = false;
                if self.cur().kind == TokKind::Ident
                    && matches!(self.cur().text.as_str(), "get" | "set" | "async")
                {
                    let next = self.peek(1);
                    let key_follows = matches!(next.kind, TokKind::Ident | TokKind::Str | TokKind::Num)
                        || (next.kind == TokKind::Punct && matches!(next.text.as_str(), "[" | "*"));
                    if key_follows {
                        self.bump();
                        prefixed = true;
                    }
                }
                self.eat_punct("*");
                let key_tok = self.cur().clone();
                let key_name: Option<String> = match key_tok.kind {
                    TokKind::Ident => {
                        self.bump();
                        Some(key_tok.text.clone())
                    }
                    TokKind::Str => {
                        self.bump();
                        Some(string_value(&key_tok.text))
                    }
                    TokKind::Num => {
                        self.bump();
                        Some(key_tok.text.clone())
                    }
                    TokKind::Punct if key_tok.text == "[" => {
                        self.bump();
                        let k = self.assign_expr(false)?;
                        self.expect_punct("]")?;
                        parts.push(k);
                        None
                    }
                    _ => return Err(ParseErr),
                };
                if self.eat_punct(":") {
                    parts.push(self.assign_expr(false)?);
                } else if self.at_punct("(") {
                    // Method shorthand.
                    let mstart = self.pos;
                    self.bump();
                    let params = self.param_list()?;
                    let head_span = self.span_from(mstart);
                    self.expect_punct("{")?;
                    let body = self.stmt_list(true);
                    self.expect_punct("}")?;
                    let span = self.span_from(mstart);
                    parts.push(Expr::Function(Box::new(FuncLit {
                        name: key_name,
                        params,
                        body,
                                                head_span,
                        span,
                    })));
                } else if self.at_punct("=") {
                    // Shorthand with default (destructuring-assignment form).
                    self.bump();
                    parts.push(self.assign_expr(false)?);
                } else {
                    // Plain shorthand `{ a }`.
                    match key_name {
                        Some(name) if !prefixed && !is_reserved(&name) => {
                            parts.push(Expr::Ident { name, span: self.tok_span(&key_tok) });
                        }
                        _ => {
                            if !prefixed {
                                return Err(ParseErr);
                            }
                        }
                    }
                }
            }
            if !self.eat_punct(",") {
                self.expect_punct("}")?;
                break;
            }
        }
        Ok(Expr::Object { parts, span: self.span_from(start) })
    }
}

impl Pattern {
    pub fn span_of(&self) -> Span {
        match self {
            Pattern::Ident { span, .. }
            | Pattern::Object { span, .. }
            | Pattern::Array { span, .. }
            | Pattern::Default { span, .. }
            | Pattern::Rest { span, .. } => *span,
        }
    }
}

/// Decode a quoted string token to its value (handles the common escapes;
/// unknown escapes keep the escaped character).
pub fn string_value(raw: &str) -> String {
    let inner = if raw.len() >= 2 { &raw[1..raw.len() - 1] } else { raw };
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            None => break,
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some('b') => out.push('\u{8}'),
            Some('f') => out.push('\u{c}'),
            Some('v') => out.push('\u{b}'),
            Some('0') => out.push('\0'),
            Some('x') => {
                let hex: String = chars.by_ref().take(2).collect();
                if let Ok(v) = u32::from_str_radix(&hex, 16) {
                    if let Some(ch) = char::from_u32(v) {
                        out.push(ch);
                    }
                }
            }
            Some('u') => {
                let mut peek = chars.clone();
                if peek.next() == Some('{') {
                    chars.next();
                    let hex: String = chars.by_ref().take_while(|&c| c != '}').collect();
                    if let Ok(v) = u32::from_str_radix(&hex, 16) {
                        if let Some(ch) = char::from_u32(v) {
                            out.push(ch);
                        }
                    }
                } else {
                    let hex: String = chars.by_ref().take(4).collect();
                    if let Ok(v) = u32::from_str_radix(&hex, 16) {
                        if let Some(ch) = char::from_u32(v) {
                            out.push(ch);
                        }
                    }
                }
            }
            Some(other) => out.push(other),
        }
    }
    out
}
