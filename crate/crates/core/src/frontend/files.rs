use std::collections::HashMap;
use std::sync::Arc;

use super::elab::Elab;
use super::lexer::{lex, Tok};
use super::syntax::{Failed, Name, Node, PResult, Parser};
use super::{conclude, Diagnostic, Parsed, Span};
use crate::kernel::Context;
use crate::model::{CarrierElem, CarrierSet, FiniteModel, ModelError};
use crate::signature::{Signature, SignatureError, Symbol};
use crate::theory::{Theory, TheoryError};

const THEORY_KEYWORDS: &[&str] = &["sort", "symbol", "axiom", "schema"];
const MODEL_KEYWORDS: &[&str] = &["model", "carrier", "interp"];

fn is_keyword(tok: &Tok, set: &[&str]) -> bool {
    matches!(tok, Tok::Ident(s) if set.contains(&s.as_str()))
}

enum TheoryDecl {
    Sort(Name),
    Symbol { name: Name, params: Vec<Name>, result: Name },
    Axiom { label: Name, sort: Name, pattern: Node },
    Schema(Name),
}

fn theory_decl(p: &mut Parser) -> PResult<TheoryDecl> {
    let kw = p.ident("a declaration (`sort`, `symbol`, `axiom` or `schema`)")?;
    match kw.text.as_str() {
        "sort" => Ok(TheoryDecl::Sort(p.ident("a sort name")?)),
        "symbol" => {
            let name = p.ident("a symbol name")?;
            p.expect(Tok::Colon)?;
            let mut params = Vec::new();
            if p.peek().tok != Tok::Arrow {
                params.push(p.ident("a sort name or `->`")?);
                while p.eat(&Tok::Comma) {
                    params.push(p.ident("a sort name")?);
                }
            }
            p.expect(Tok::Arrow)?;
            let result = p.ident("a result sort")?;
            Ok(TheoryDecl::Symbol { name, params, result })
        }
        "axiom" => {
            let label = p.ident("an axiom label")?;
            p.expect(Tok::LBracket)?;
            let sort = p.ident("a sort name")?;
            p.expect(Tok::RBracket)?;
            let pattern = p.pattern()?;
            Ok(TheoryDecl::Axiom { label, sort, pattern })
        }
        "schema" => Ok(TheoryDecl::Schema(p.ident("a schema name")?)),
        other => Err(p.error(
            kw.span,
            "unknown-declaration",
            format!("expected `sort`, `symbol`, `axiom` or `schema`, found `{other}`"),
        )),
    }
}

fn parse_decls<T>(
    text: &str,
    keywords: &[&str],
    decl: impl Fn(&mut Parser) -> PResult<T>,
) -> (Vec<T>, Vec<Diagnostic>, Span) {
    let mut diags = Vec::new();
    let toks = lex(text, &mut diags);
    let mut p = Parser::new(toks, diags);
    let mut out = Vec::new();
    while !p.at_eof() {
        let start_line = p.peek().span.line;
        let start = p.position();
        match decl(&mut p) {
            Ok(d) => {
                out.push(d);
                if !p.at_eof() && !p.peek().line_start {
                    let t = p.peek().clone();
                    p.bump();
                    p.diags.push(Diagnostic::error(
                        t.span,
                        "unexpected-token",
                        format!(
                            "expected the end of the declaration started on line {start_line}, found {}",
                            t.tok.describe()
                        ),
                    ));
                    p.sync(|t| is_keyword(t, keywords));
                }
            }
            Err(Failed) => {
                if p.position() == start {
                    p.bump();
                }
                p.sync(|t| is_keyword(t, keywords))
            }
        }
    }
    let eof = p.peek().span;
    (out, p.diags, eof)
}

fn signature_diag(span: Span, e: &SignatureError) -> Diagnostic {
    let code = match e {
        SignatureError::EmptyName => "empty-name",
        SignatureError::DuplicateSort(_) => "duplicate-sort",
        SignatureError::DuplicateSymbol(_) => "duplicate-symbol",
        SignatureError::UnknownSort(_) => "unknown-sort",
        SignatureError::UnknownSymbol(_) => "unknown-symbol",
    };
    Diagnostic::error(span, code, e.to_string())
}

/// Parse a theory file. Sorts and symbols may be used before the line
/// declaring them; axioms are kept in file order.
pub fn parse_theory(text: &str) -> Result<Parsed<Theory>, Vec<Diagnostic>> {
    let (decls, mut diags, _) = parse_decls(text, THEORY_KEYWORDS, theory_decl);

    let mut sig = Signature::new();
    for d in &decls {
        if let TheoryDecl::Sort(name) = d {
            if let Err(e) = sig.declare_sort(&name.text) {
                diags.push(signature_diag(name.span, &e));
            }
        }
    }
    for d in &decls {
        if let TheoryDecl::Symbol { name, params, result } = d {
            let mut ok = true;
            let mut sorts = Vec::new();
            for s in params.iter().chain(std::iter::once(result)) {
                match sig.sort(&s.text) {
                    Some(sort) => sorts.push(sort),
                    None => {
                        diags.push(Diagnostic::error(s.span, "unknown-sort", format!("unknown sort `{}`", s.text)));
                        ok = false;
                    }
                }
            }
            if ok {
                let result = sorts.pop().expect("result sort");
                if let Err(e) = sig.declare_symbol(&name.text, &sorts, result) {
                    diags.push(signature_diag(name.span, &e));
                }
            }
        }
    }

    let sig = Arc::new(sig);
    let mut theory = match Theory::new(sig.clone()) {
        Ok(t) => t,
        Err(e) => {
            diags.push(Diagnostic::error(Span::new(1, 1, 0), "empty-signature", e.to_string()));
            return conclude(None, diags);
        }
    };
    let mut schema: Option<Span> = None;
    for d in &decls {
        match d {
            TheoryDecl::Axiom { label, sort, pattern } => {
                let mut el = Elab::new(&sig);
                let declared = sig.sort(&sort.text);
                if declared.is_none() {
                    diags.push(Diagnostic::error(sort.span, "unknown-sort", format!("unknown sort `{}`", sort.text)));
                }
                let p = el.elab(pattern, &Context::empty(), &Context::empty(), declared);
                diags.append(&mut el.diags);
                let (Some(p), Some(declared)) = (p, declared) else { continue };
                if let Err(e) = theory.add_axiom(&label.text, declared, p) {
                    let (span, code) = match &e {
                        TheoryError::SortMismatch { .. } => (pattern.full, "sort-mismatch"),
                        TheoryError::DuplicateLabel(_) => (label.span, "duplicate-label"),
                        TheoryError::NotClosed(_) => (pattern.full, "not-closed"),
                        _ => (pattern.full, "ill-formed"),
                    };
                    diags.push(Diagnostic::error(span, code, e.to_string()));
                }
            }
            TheoryDecl::Schema(name) => {
                if name.text != "definedness" {
                    diags.push(Diagnostic::error(
                        name.span,
                        "unknown-schema",
                        format!("unknown schema `{}`; the only schema is `definedness`", name.text),
                    ));
                } else if schema.is_some() {
                    diags.push(Diagnostic::error(
                        name.span,
                        "duplicate-schema",
                        "schema `definedness` is already enabled",
                    ));
                } else {
                    schema = Some(name.span);
                }
            }
            _ => {}
        }
    }
    if let Some(span) = schema {
        if let Err(e) = theory.instantiate_definedness() {
            diags.push(Diagnostic::error(span, "duplicate-label", e.to_string()));
        }
    }
    conclude(Some(theory), diags)
}

enum ModelDecl {
    Name(Name),
    Carrier { sort: Name, elems: Vec<Name> },
    Interp { symbol: Name, args: Vec<Name>, args_span: Span, value: Vec<Name> },
}

fn name_set(p: &mut Parser) -> PResult<Vec<Name>> {
    p.expect(Tok::LBrace)?;
    let mut out = Vec::new();
    if !p.eat(&Tok::RBrace) {
        loop {
            out.push(p.ident("an element name")?);
            if p.eat(&Tok::RBrace) {
                break;
            }
            p.expect(Tok::Comma)?;
        }
    }
    Ok(out)
}

fn model_decl(p: &mut Parser) -> PResult<ModelDecl> {
    let kw = p.ident("a declaration (`model`, `carrier` or `interp`)")?;
    match kw.text.as_str() {
        "model" => Ok(ModelDecl::Name(p.ident("a model name")?)),
        "carrier" => {
            let sort = p.ident("a sort name")?;
            p.expect(Tok::Eq)?;
            Ok(ModelDecl::Carrier { sort, elems: name_set(p)? })
        }
        "interp" => {
            let symbol = p.ident("a symbol name")?;
            let open = p.expect(Tok::LParen)?;
            let mut args = Vec::new();
            if !p.eat(&Tok::RParen) {
                loop {
                    args.push(p.ident("an element name")?);
                    if p.eat(&Tok::RParen) {
                        break;
                    }
                    p.expect(Tok::Comma)?;
                }
            }
            let close = p.prev_span();
            let args_span = if close.line == open.line {
                Span::new(open.line, open.column, close.column + 1 - open.column)
            } else {
                open
            };
            p.expect(Tok::Eq)?;
            Ok(ModelDecl::Interp { symbol, args, args_span, value: name_set(p)? })
        }
        other => Err(p.error(
            kw.span,
            "unknown-declaration",
            format!("expected `model`, `carrier` or `interp`, found `{other}`"),
        )),
    }
}

/// Parse a model of `theory`'s signature. With `totality_lint`, every
/// argument tuple missing from an `interp` line yields a warning.
pub fn parse_model(text: &str, theory: &Theory, totality_lint: bool) -> Result<Parsed<FiniteModel>, Vec<Diagnostic>> {
    let (decls, mut diags, eof) = parse_decls(text, MODEL_KEYWORDS, model_decl);
    let sig = theory.signature();
    let mut b = FiniteModel::builder(sig.clone());

    let mut named: Option<Span> = None;
    for d in &decls {
        match d {
            ModelDecl::Name(n) => {
                if named.is_some() {
                    diags.push(Diagnostic::error(n.span, "duplicate-model-name", "the model is already named"));
                } else {
                    named = Some(n.span);
                    b.name(n.text.clone());
                }
            }
            ModelDecl::Carrier { sort, elems } => {
                let Some(s) = sig.sort(&sort.text) else {
                    diags.push(Diagnostic::error(sort.span, "unknown-sort", format!("unknown sort `{}`", sort.text)));
                    continue;
                };
                if let Err(e) = b.carrier(s, elems.iter().map(|e| e.text.as_str())) {
                    let (span, code) = match &e {
                        ModelError::EmptyCarrier(_) => (sort.span, "empty-carrier"),
                        ModelError::DuplicateCarrier(_) => (sort.span, "duplicate-carrier"),
                        ModelError::DuplicateElement { element, .. } => {
                            let at = elems.iter().filter(|n| &n.text == element).nth(1).map_or(sort.span, |n| n.span);
                            (at, "duplicate-element")
                        }
                        _ => (sort.span, "bad-carrier"),
                    };
                    diags.push(Diagnostic::error(span, code, e.to_string()));
                }
            }
            ModelDecl::Interp { .. } => {}
        }
    }

    let mut first_interp: HashMap<Symbol, Span> = HashMap::new();
    for d in &decls {
        let ModelDecl::Interp { symbol, args, args_span, value } = d else { continue };
        let Some(sym) = sig.symbol(&symbol.text) else {
            diags.push(Diagnostic::error(symbol.span, "unknown-symbol", format!("unknown symbol `{}`", symbol.text)));
            continue;
        };
        first_interp.entry(sym).or_insert(symbol.span);
        let decl = sig.symbol_decl(sym).expect("known symbol");
        let (params, result) = (&decl.params, decl.result);
        if params.len() != args.len() {
            diags.push(Diagnostic::error(
                *args_span,
                "bad-tuple",
                format!("`{}` takes {} argument(s), found {}", symbol.text, params.len(), args.len()),
            ));
            continue;
        }
        let mut tuple = Vec::with_capacity(args.len());
        for (i, (a, &ps)) in args.iter().zip(params).enumerate() {
            match b.elem(ps, &a.text) {
                Ok(e) => tuple.push(e),
                Err(_) => diags.push(Diagnostic::error(
                    a.span,
                    "bad-tuple",
                    format!(
                        "`{}` is not an element of `{}`, the sort of argument {} of `{}`",
                        a.text,
                        sig.sort_name(ps),
                        i + 1,
                        symbol.text
                    ),
                )),
            }
        }
        let Some(width) = b.carrier_size(result) else {
            diags.push(Diagnostic::error(
                symbol.span,
                "missing-carrier",
                format!("no carrier declared for `{}`, the result sort of `{}`", sig.sort_name(result), symbol.text),
            ));
            continue;
        };
        let mut set = CarrierSet::empty(result, width);
        for v in value {
            match b.elem(result, &v.text) {
                Ok(e) if set.contains(e) => {
                    diags.push(Diagnostic::error(v.span, "duplicate-element", format!("`{}` is listed twice", v.text)))
                }
                Ok(e) => set.insert(e),
                Err(e) => diags.push(Diagnostic::error(v.span, "unknown-element", e.to_string())),
            }
        }
        if tuple.len() != args.len() {
            continue;
        }
        if let Err(e) = b.interp(sym, &tuple, set) {
            let code = match e {
                ModelError::DuplicateInterp { .. } => "duplicate-interp",
                _ => "bad-tuple",
            };
            diags.push(Diagnostic::error(*args_span, code, e.to_string()));
        }
    }

    for s in sig.sorts() {
        let attempted =
            decls.iter().any(|d| matches!(d, ModelDecl::Carrier { sort, .. } if sort.text == sig.sort_name(s)));
        if b.carrier_size(s).is_none() && !attempted {
            let msg = format!("no carrier declared for sort `{}`", sig.sort_name(s));
            diags.push(Diagnostic::error(eof, "missing-carrier", msg));
        }
    }
    let Ok(model) = b.build() else {
        return conclude(None, diags);
    };
    if totality_lint {
        for (sym, _) in sig.symbols() {
            let missing = model.unlisted_tuples(sym, usize::MAX);
            if missing.is_empty() {
                continue;
            }
            let shown: Vec<String> = missing.iter().take(4).map(|t| format_tuple(&model, sym, t)).collect();
            let more = if missing.len() > 4 { format!(" and {} more", missing.len() - 4) } else { String::new() };
            diags.push(Diagnostic::warning(
                first_interp.get(&sym).copied().unwrap_or(eof),
                "unlisted-tuple",
                format!("{}{more} not listed; unlisted tuples denote the empty set", shown.join(", ")),
            ));
        }
    }
    conclude(Some(model), diags)
}

fn format_tuple(model: &FiniteModel, sym: Symbol, t: &[CarrierElem]) -> String {
    let args: Vec<&str> = t.iter().map(|&e| model.label(e)).collect();
    format!("{}({})", model.signature().symbol_name(sym), args.join(", "))
}
