//! Token stream cursor and the untyped pattern syntax tree.

use super::lexer::{Tok, Token};
use super::{Diagnostic, Span};

const MAX_DEPTH: usize = 200;

#[derive(Clone, Debug)]
pub(crate) struct Name {
    pub text: String,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub(crate) enum Ast {
    EVar(Name, Name),
    SVar(Name, Name),
    /// `None` when the index does not fit in `usize`.
    BEVar(Option<usize>),
    BSVar(Option<usize>),
    App(Name, Vec<Node>),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Exists(Name, Box<Node>),
    Mu(Option<Name>, Box<Node>),
    Ceil(Name, Box<Node>),
    Top(Name),
    Bottom(Name),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Forall(Name, Box<Node>),
    Nu(Option<Name>, Box<Node>),
    Floor(Name, Box<Node>),
    Equals(Name, Box<Node>, Box<Node>),
    Subseteq(Name, Box<Node>, Box<Node>),
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub ast: Ast,
    /// First token of the pattern.
    pub head: Span,
    /// Whole pattern when it fits on one line, otherwise `head`.
    pub full: Span,
}

/// Marker for a failed parse; the diagnostic is already recorded.
#[derive(Debug)]
pub(crate) struct Failed;

pub(crate) type PResult<T> = Result<T, Failed>;

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    pub diags: Vec<Diagnostic>,
    depth: usize,
}

impl Parser {
    pub fn new(toks: Vec<Token>, diags: Vec<Diagnostic>) -> Parser {
        Parser { toks, pos: 0, diags, depth: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    /// Span of the token before the cursor.
    pub fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    pub fn error(&mut self, span: Span, code: &'static str, message: impl Into<String>) -> Failed {
        self.diags.push(Diagnostic::error(span, code, message));
        Failed
    }

    pub fn unexpected(&mut self, wanted: &str) -> Failed {
        let t = self.peek().clone();
        let code = if t.tok == Tok::Eof { "unexpected-eof" } else { "unexpected-token" };
        self.error(t.span, code, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    pub fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn ident(&mut self, what: &str) -> PResult<Name> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let text = s.clone();
                let span = self.bump().span;
                Ok(Name { text, span })
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    /// Skip to the next token that starts a line and satisfies `is_start`.
    pub fn sync(&mut self, is_start: impl Fn(&Tok) -> bool) {
        while !self.at_eof() && !(self.peek().line_start && is_start(&self.peek().tok)) {
            self.bump();
        }
    }

    fn sort_annotation(&mut self) -> PResult<Name> {
        self.expect(Tok::LBrace)?;
        let name = self.ident("a sort name")?;
        self.expect(Tok::RBrace)?;
        Ok(name)
    }

    fn parenthesized(&mut self, n: usize) -> PResult<Vec<Node>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect(Tok::Comma)?;
            }
            out.push(self.pattern()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn one(&mut self) -> PResult<Box<Node>> {
        Ok(Box::new(self.parenthesized(1)?.pop().expect("one operand")))
    }

    fn two(&mut self) -> PResult<(Box<Node>, Box<Node>)> {
        let mut v = self.parenthesized(2)?;
        let r = v.pop().expect("two operands");
        let l = v.pop().expect("two operands");
        Ok((Box::new(l), Box::new(r)))
    }

    pub fn pattern(&mut self) -> PResult<Node> {
        if self.depth >= MAX_DEPTH {
            let span = self.peek().span;
            return Err(self.error(span, "nesting-too-deep", format!("patterns nest deeper than {MAX_DEPTH} levels")));
        }
        self.depth += 1;
        let r = self.pattern_inner();
        self.depth -= 1;
        r
    }

    fn pattern_inner(&mut self) -> PResult<Node> {
        let start = self.peek().clone();
        let ast = match start.tok.clone() {
            Tok::Hash => {
                self.bump();
                let name = self.ident("a set variable name")?;
                self.expect(Tok::Colon)?;
                let sort = self.ident("a sort name")?;
                Ast::SVar(name, sort)
            }
            Tok::Ident(text) => {
                self.bump();
                let name = Name { text: text.clone(), span: start.span };
                match self.peek().tok {
                    Tok::Colon => {
                        self.bump();
                        Ast::EVar(name, self.ident("a sort name")?)
                    }
                    Tok::LParen => {
                        self.bump();
                        let mut args = Vec::new();
                        if !self.eat(&Tok::RParen) {
                            loop {
                                args.push(self.pattern()?);
                                if self.eat(&Tok::RParen) {
                                    break;
                                }
                                self.expect(Tok::Comma)?;
                            }
                        }
                        Ast::App(name, args)
                    }
                    _ => match bound_index(&text) {
                        Some((true, i)) => Ast::BEVar(i),
                        Some((false, i)) => Ast::BSVar(i),
                        None => {
                            // Leave the token for recovery: it may start the next declaration.
                            self.pos -= 1;
                            return Err(self.error(
                                start.span,
                                "unexpected-token",
                                format!(
                                    "`{text}` is not a pattern; write `{text}:Sort` for a variable or `{text}(...)` for an application"
                                ),
                            ));
                        }
                    },
                }
            }
            Tok::Keyword(kw) => {
                self.bump();
                match kw.as_str() {
                    "not" => Ast::Not(self.one()?),
                    "and" => {
                        let (l, r) = self.two()?;
                        Ast::And(l, r)
                    }
                    "or" => {
                        let (l, r) = self.two()?;
                        Ast::Or(l, r)
                    }
                    "implies" => {
                        let (l, r) = self.two()?;
                        Ast::Implies(l, r)
                    }
                    "iff" => {
                        let (l, r) = self.two()?;
                        Ast::Iff(l, r)
                    }
                    "exists" | "forall" => {
                        let sort = self.sort_annotation()?;
                        let body = Box::new(self.pattern()?);
                        if kw == "exists" {
                            Ast::Exists(sort, body)
                        } else {
                            Ast::Forall(sort, body)
                        }
                    }
                    "mu" | "nu" => {
                        let sort = if self.peek().tok == Tok::LBrace { Some(self.sort_annotation()?) } else { None };
                        let body = Box::new(self.pattern()?);
                        if kw == "mu" {
                            Ast::Mu(sort, body)
                        } else {
                            Ast::Nu(sort, body)
                        }
                    }
                    "ceil" | "floor" => {
                        let sort = self.sort_annotation()?;
                        let body = self.one()?;
                        if kw == "ceil" {
                            Ast::Ceil(sort, body)
                        } else {
                            Ast::Floor(sort, body)
                        }
                    }
                    "top" => Ast::Top(self.sort_annotation()?),
                    "bottom" => Ast::Bottom(self.sort_annotation()?),
                    "equals" | "subseteq" => {
                        let sort = self.sort_annotation()?;
                        let (l, r) = self.two()?;
                        if kw == "equals" {
                            Ast::Equals(sort, l, r)
                        } else {
                            Ast::Subseteq(sort, l, r)
                        }
                    }
                    _ => {
                        return Err(self.error(
                            start.span,
                            "unknown-connective",
                            format!("unknown connective `\\{kw}`"),
                        ))
                    }
                }
            }
            _ => return Err(self.unexpected("a pattern")),
        };
        let end = self.prev_span();
        let full = if end.line == start.span.line {
            Span::new(start.span.line, start.span.column, end.column + end.length - start.span.column)
        } else {
            start.span
        };
        Ok(Node { ast, head: start.span, full })
    }
}

/// `b12` / `B3`; the bool is true for element indices.
fn bound_index(text: &str) -> Option<(bool, Option<usize>)> {
    let elem = match text.as_bytes().first()? {
        b'b' => true,
        b'B' => false,
        _ => return None,
    };
    let digits = &text[1..];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((elem, digits.parse().ok()))
}
