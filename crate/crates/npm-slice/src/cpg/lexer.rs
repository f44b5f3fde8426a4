//! Hand-rolled JavaScript lexer.
//!
//! Produces a flat token stream with byte spans and 1-based line/column
//! positions.  Template literals are split into head/middle/tail parts so the
//! parser can recurse into `${…}` substitutions; a stack of brace depths keeps
//! nested templates straight.  Regex literals are disambiguated from division
//! by the preceding significant token.  Lexing never fails: unknown bytes and
//! unterminated strings produce diagnostics and the scan continues.

/// Token categories.  Keywords arrive as [`TokKind::Ident`]; the parser
/// decides which identifiers are reserved in context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokKind {
    Ident,
    Num,
    Str,
    /// A complete template literal with no substitutions: `` `abc` ``.
    TemplateFull,
    /// `` `abc${ `` — opens a substitution.
    TemplateHead,
    /// `}abc${` — between substitutions.
    TemplateMiddle,
    /// `` }abc` `` — closes the literal.
    TemplateTail,
    Regex,
    Punct,
    Eof,
}

/// One lexed token.  `start`/`end` are byte offsets into the source;
/// `line`/`col` are 1-based and point at `start`.  `nl_before` is set when a
/// line terminator separates this token from the previous one (the parser's
/// semicolon-insertion cue).
#[derive(Debug, Clone)]
pub struct LexedToken {
    pub kind: TokKind,
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
    pub nl_before: bool,
}

#[derive(Debug, Clone)]
pub struct LexDiag {
    pub line: u32,
    pub message: String,
}

const PUNCT_TABLE: &[&str] = &[
    ">>>=", "===", "!==", "**=", "<<=", ">>=", ">>>", "...", "&&=", "||=", "??=", "=>", "==",
    "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=", "<<", ">>", "**", "+", "-", "*", "/", "%", "=", "<", ">", "!", "?", ":", ";",
    ",", ".", "(", ")", "[", "]", "{", "}", "&", "|", "^", "~", "@", "#",
];

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

/// Keywords after which `/` starts a regex literal rather than division.
const REGEX_PRECEDING_KEYWORDS: &[&str] = &[
    "return", "typeof", "instanceof", "in", "of", "new", "delete", "void", "throw", "case",
    "do", "else", "yield", "await",
];

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    line_start: usize,
    nl_pending: bool,
    tokens: Vec<LexedToken>,
    diags: Vec<LexDiag>,
    /// Brace-depth stack for template substitutions: one entry per open
    /// `${…}`, counting `{` nesting inside it.
    template_stack: Vec<u32>,
}

/// Lex `src` completely.  The returned stream always ends with an `Eof` token.
pub fn lex(src: &str) -> (Vec<LexedToken>, Vec<LexDiag>) {
    let mut lx = Lexer {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        line: 1,
        line_start: 0,
        nl_pending: false,
        tokens: Vec::new(),
        diags: Vec::new(),
        template_stack: Vec::new(),
    };
    lx.run();
    (lx.tokens, lx.diags)
}

impl<'a> Lexer<'a> {
    fn run(&mut self) {
        while self.pos < self.bytes.len() {
            self.skip_trivia();
            if self.pos >= self.bytes.len() {
                break;
            }
            let start = self.pos;
            let c = self.cur_char();
            if is_ident_start(c) {
                self.lex_ident();
            } else if c.is_ascii_digit() || (c == '.' && self.peek_byte(1).is_some_and(|b| b.is_ascii_digit())) {
                self.lex_number();
            } else if c == '"' || c == '\'' {
                self.lex_string(c);
            } else if c == '`' {
                self.lex_template_part(true);
            } else if c == '}' && self.template_stack.last() == Some(&0) {
                // Closes a template substitution: resume template scanning.
                self.template_stack.pop();
                self.lex_template_part(false);
            } else if c == '/' && self.regex_allowed() {
                self.lex_regex();
            } else {
                self.lex_punct_or_unknown();
            }
            debug_assert!(self.pos > start, "lexer must make progress");
            if self.pos == start {
                self.pos += 1; // belt and braces: never loop forever
            }
        }
        let (line, col) = (self.line, self.col_at(self.pos));
        self.tokens.push(LexedToken {
            kind: TokKind::Eof,
            text: String::new(),
            start: self.pos,
            end: self.pos,
            line,
            col,
            nl_before: self.nl_pending,
        });
    }

    fn cur_char(&self) -> char {
        self.src[self.pos..].chars().next().unwrap()
    }

    fn peek_byte(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn col_at(&self, pos: usize) -> u32 {
        (pos - self.line_start) as u32 + 1
    }

    fn advance_char(&mut self) {
        let c = self.cur_char();
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos + 1;
            self.nl_pending = true;
        }
        self.pos += c.len_utf8();
    }

    fn skip_trivia(&mut self) {
        loop {
            if self.pos >= self.bytes.len() {
                return;
            }
            let c = self.cur_char();
            if c.is_whitespace() {
                self.advance_char();
            } else if c == '/' && self.peek_byte(1) == Some(b'/') {
                while self.pos < self.bytes.len() && self.cur_char() != '\n' {
                    self.advance_char();
                }
            } else if c == '/' && self.peek_byte(1) == Some(b'*') {
                let line = self.line;
                self.pos += 2;
                let mut closed = false;
                while self.pos < self.bytes.len() {
                    if self.cur_char() == '*' && self.peek_byte(1) == Some(b'/') {
                        self.pos += 2;
                        closed = true;
                        break;
                    }
                    self.advance_char();
                }
                if !closed {
                    self.diags.push(LexDiag { line, message: "unterminated block comment".into() });
                }
            } else {
                return;
            }
        }
    }

    fn push(&mut self, kind: TokKind, start: usize, line: u32, col: u32) {
        let text = self.src[start..self.pos].to_string();
        let nl = std::mem::take(&mut self.nl_pending);
        self.tokens.push(LexedToken { kind, text, start, end: self.pos, line, col, nl_before: nl });
    }

    fn lex_ident(&mut self) {
        let (start, line, col) = (self.pos, self.line, self.col_at(self.pos));
        while self.pos < self.bytes.len() && is_ident_part(self.cur_char()) {
            self.advance_char();
        }
        self.push(TokKind::Ident, start, line, col);
    }

    fn lex_number(&mut self) {
        let (start, line, col) = (self.pos, self.line, self.col_at(self.pos));
        // Radix prefixes.
        if self.cur_char() == '0'
            && matches!(self.peek_byte(1), Some(b'x' | b'X' | b'o' | b'O' | b'b' | b'B'))
        {
            self.pos += 2;
            while self.pos < self.bytes.len() && (self.cur_char().is_ascii_alphanumeric() || self.cur_char() == '_') {
                self.advance_char();
            }
            self.push(TokKind::Num, start, line, col);
            return;
        }
        let mut seen_dot = false;
        while self.pos < self.bytes.len() {
            let c = self.cur_char();
            if c.is_ascii_digit() || c == '_' {
                self.advance_char();
            } else if c == '.' && !seen_dot && self.peek_byte(1).is_none_or(|b| b != b'.') {
                seen_dot = true;
                self.advance_char();
            } else if c == 'e' || c == 'E' {
                self.advance_char();
                if self.pos < self.bytes.len() && matches!(self.cur_char(), '+' | '-') {
                    self.advance_char();
                }
            } else if c == 'n' {
                self.advance_char(); // bigint suffix
                break;
            } else {
                break;
            }
        }
        self.push(TokKind::Num, start, line, col);
    }

    fn lex_string(&mut self, quote: char) {
        let (start, line, col) = (self.pos, self.line, self.col_at(self.pos));
        self.advance_char(); // opening quote
        let mut closed = false;
        while self.pos < self.bytes.len() {
            let c = self.cur_char();
            if c == '\\' {
                self.advance_char();
                if self.pos < self.bytes.len() {
                    self.advance_char();
                }
            } else if c == quote {
                self.advance_char();
                closed = true;
                break;
            } else if c == '\n' {
                break; // unterminated: recover at end of line
            } else {
                self.advance_char();
            }
        }
        if !closed {
            self.diags.push(LexDiag { line, message: "unterminated string literal".into() });
        }
        self.push(TokKind::Str, start, line, col);
    }

    /// Scan a template span.  `opening` means we start at a backtick; false
    /// means we start at the `}` that closed a substitution.
    fn lex_template_part(&mut self, opening: bool) {
        let (start, line, col) = (self.pos, self.line, self.col_at(self.pos));
        self.advance_char(); // ` or }
        loop {
            if self.pos >= self.bytes.len() {
                self.diags.push(LexDiag { line, message: "unterminated template literal".into() });
                let kind = if opening { TokKind::TemplateFull } else { TokKind::TemplateTail };
                self.push(kind, start, line, col);
                return;
            }
            let c = self.cur_char();
            if c == '\\' {
                self.advance_char();
                if self.pos < self.bytes.len() {
                    self.advance_char();
                }
            } else if c == '`' {
                self.advance_char();
                let kind = if opening { TokKind::TemplateFull } else { TokKind::TemplateTail };
                self.push(kind, start, line, col);
                return;
            } else if c == '$' && self.peek_byte(1) == Some(b'{') {
                self.pos += 2;
                self.template_stack.push(0);
                let kind = if opening { TokKind::TemplateHead } else { TokKind::TemplateMiddle };
                self.push(kind, start, line, col);
                return;
            } else {
                self.advance_char();
            }
        }
    }

    /// Should a `/` here start a regex literal?  Yes after nothing, after
    /// most punctuation, and after expression-position keywords; no after
    /// values (identifiers, literals, `)`, `]`).
    fn regex_allowed(&self) -> bool {
        match self.tokens.last() {
            None => true,
            Some(t) => match t.kind {
                TokKind::Ident => REGEX_PRECEDING_KEYWORDS.contains(&t.text.as_str()),
                TokKind::Num | TokKind::Str | TokKind::Regex | TokKind::TemplateFull
                | TokKind::TemplateTail => false,
                TokKind::Punct => !matches!(t.text.as_str(), ")" | "]"),
                _ => true,
            },
        }
    }

    fn lex_regex(&mut self) {
        let (start, line, col) = (self.pos, self.line, self.col_at(self.pos));
        self.advance_char(); // opening /
        let mut in_class = false;
        let mut closed = false;
        while self.pos < self.bytes.len() {
            let c = self.cur_char();
            if c == '\\' {
                self.advance_char();
                if self.pos < self.bytes.len() {
                    self.advance_char();
                }
            } else if c == '[' {
                in_class = true;
                self.advance_char();
            } else if c == ']' {
                in_class = false;
                self.advance_char();
            } else if c == '/' && !in_class {
                self.advance_char();
                closed = true;
                break;
            } else if c == '\n' {
                break;
            } else {
                self.advance_char();
            }
        }
        if !closed {
            self.diags.push(LexDiag { line, message: "unterminated regex literal".into() });
        }
        while self.pos < self.bytes.len() && is_ident_part(self.cur_char()) {
            self.advance_char(); // flags
        }
        self.push(TokKind::Regex, start, line, col);
    }

    fn lex_punct_or_unknown(&mut self) {
        let (start, line, col) = (self.pos, self.line, self.col_at(self.pos));
        let rest = &self.src[self.pos..];
        for p in PUNCT_TABLE {
            if rest.starts_with(p) {
                if *p == "{" {
                    if let Some(depth) = self.template_stack.last_mut() {
                        *depth += 1;
                    }
                } else if *p == "}" {
                    if let Some(depth) = self.template_stack.last_mut() {
                        // A `}` reaching here is a plain brace inside the
                        // substitution (depth 0 was handled by the template
                        // scanner in `run`).
                        *depth = depth.saturating_sub(1);
                    }
                }
                self.pos += p.len();
                self.push(TokKind::Punct, start, line, col);
                return;
            }
        }
        let c = self.cur_char();
        self.diags.push(LexDiag { line, message: format!("unexpected character {c:?}") });
        self.advance_char();
        self.push(TokKind::Punct, start, line, col);
    }
}
