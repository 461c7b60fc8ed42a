//! Text formats for theories (`.mlt`), models (`.mlm`) and patterns.
//!
//! ```text
//! // theory
//! sort Nat
//! symbol O : -> Nat
//! symbol S : Nat -> Nat
//! axiom nat-domain [Nat] \mu \or(O(), S(B0))
//! schema definedness
//!
//! // model
//! model std
//! carrier Nat = { 0, 1 }
//! interp O() = { 0 }
//! interp S(0) = { 1 }
//! ```
//!
//! Pattern syntax: `x:Sort`, `#X:Sort`, `b<n>`, `B<n>`, `sym(p, ...)`,
//! `\not(p)`, `\and(p, q)`, `\exists{Sort} p`, `\mu p` or `\mu{Sort} p`,
//! `\ceil{Sort}(p)`, and the derived forms `\top{S}`, `\bottom{S}`,
//! `\or`, `\implies`, `\iff`, `\forall{S} p`, `\nu p`, `\floor{S}(p)`,
//! `\equals{S}(p, q)`, `\subseteq{S}(p, q)`. Derived forms are expanded
//! while parsing.

mod elab;
mod files;
mod lexer;
mod printer;
mod syntax;

use std::fmt;

use crate::kernel::{Context, Pattern};
use crate::signature::Signature;

pub use files::{parse_model, parse_theory};
pub use printer::print_pattern;

/// 1-based line and column, length in characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl Span {
    pub fn new(line: usize, column: usize, length: usize) -> Span {
        Span { line, column, length }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, code: &'static str, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Error, span, code, message: message.into() }
    }

    pub fn warning(span: Span, code: &'static str, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Warning, span, code, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}[{}]: {}", self.span.line, self.span.column, self.code, self.message)
    }
}

/// A successful parse together with its warnings.
#[derive(Clone, Debug)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<Diagnostic>,
}

/// Split diagnostics into a result: any error makes the parse fail.
fn conclude<T>(value: Option<T>, mut diags: Vec<Diagnostic>) -> Result<Parsed<T>, Vec<Diagnostic>> {
    diags.sort_by_key(|d| (d.span.line, d.span.column));
    match value {
        Some(value) if !diags.iter().any(Diagnostic::is_error) => Ok(Parsed { value, warnings: diags }),
        _ => Err(diags),
    }
}

/// Parse one pattern valid in the contexts `ex` and `mu`.
pub fn parse_pattern(
    text: &str,
    sig: &Signature,
    ex: &Context,
    mu: &Context,
) -> Result<Parsed<Pattern>, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let toks = lexer::lex(text, &mut diags);
    let mut parser = syntax::Parser::new(toks, diags);
    let node = parser.pattern().ok();
    if node.is_some() && !parser.at_eof() {
        let _ = parser.unexpected("end of input");
    }
    let mut diags = std::mem::take(&mut parser.diags);
    let value = node.and_then(|n| {
        let mut el = elab::Elab::new(sig);
        let p = el.elab(&n, ex, mu, None);
        diags.append(&mut el.diags);
        p
    });
    conclude(value, diags)
}
