//! Elaboration of the untyped syntax tree into checked patterns.
//!
//! The only sort that is not written in the source is the binder sort of
//! an unannotated `\mu`/`\nu`. It is taken from the body when the body
//! determines its own sort, and from the surrounding expectation otherwise.

use super::syntax::{Ast, Name, Node};
use super::{Diagnostic, Span};
use crate::kernel::{check_mu_positivity, derived, Binder, Context, KernelError, Pattern};
use crate::signature::{ElemVar, SetVar, Signature, Sort};

type BinaryCtor = fn(Pattern, Pattern) -> Result<Pattern, KernelError>;

pub(crate) struct Elab<'a> {
    pub sig: &'a Signature,
    pub diags: Vec<Diagnostic>,
}

impl<'a> Elab<'a> {
    pub fn new(sig: &'a Signature) -> Elab<'a> {
        Elab { sig, diags: Vec::new() }
    }

    fn err(&mut self, span: Span, code: &'static str, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(span, code, message));
    }

    fn sort(&mut self, name: &Name) -> Option<Sort> {
        let s = self.sig.sort(&name.text);
        if s.is_none() {
            self.err(name.span, "unknown-sort", format!("unknown sort `{}`", name.text));
        }
        s
    }

    fn kernel(&mut self, span: Span, e: KernelError) {
        self.diags.push(kernel_diagnostic(self.sig, span, &e));
    }

    fn sort_name(&self, s: Sort) -> &str {
        self.sig.sort_name(s)
    }

    fn same_sort(&mut self, what: &str, l: &Pattern, r: &Pattern, at: Span) -> bool {
        if l.sort() == r.sort() {
            return true;
        }
        let msg = format!(
            "operands of `{what}` have sorts `{}` and `{}`",
            self.sort_name(l.sort()),
            self.sort_name(r.sort())
        );
        self.err(at, "arg-sort-mismatch", msg);
        false
    }

    /// Elaborate `n` in contexts `ex`/`mu`. `expected` only guides the
    /// choice of unannotated fixpoint binder sorts; callers check sorts.
    pub fn elab(&mut self, n: &Node, ex: &Context, mu: &Context, expected: Option<Sort>) -> Option<Pattern> {
        match &n.ast {
            Ast::EVar(name, sort) => {
                let s = self.sort(sort)?;
                Some(Pattern::free_evar(ElemVar::new(name.text.as_str(), s), ex.clone(), mu.clone()))
            }
            Ast::SVar(name, sort) => {
                let s = self.sort(sort)?;
                Some(Pattern::free_svar(SetVar::new(name.text.as_str(), s), ex.clone(), mu.clone()))
            }
            Ast::BEVar(i) | Ast::BSVar(i) => {
                let (binder, letter, len) = match n.ast {
                    Ast::BEVar(_) => (Binder::Elem, 'b', ex.len()),
                    _ => (Binder::Set, 'B', mu.len()),
                };
                match i.filter(|&i| i < len) {
                    Some(i) => Some(Pattern::bound(binder, ex.clone(), mu.clone(), i).expect("index in scope")),
                    None => {
                        let kind = if binder == Binder::Elem { "element" } else { "set" };
                        self.err(
                            n.full,
                            "index-out-of-scope",
                            format!(
                                "dangling bound variable `{letter}{}`: {len} {kind} binder(s) in scope",
                                i.map_or("<overflow>".to_string(), |i| i.to_string())
                            ),
                        );
                        None
                    }
                }
            }
            Ast::App(name, args) => {
                let Some(sym) = self.sig.symbol(&name.text) else {
                    self.err(name.span, "unknown-symbol", format!("unknown symbol `{}`", name.text));
                    for a in args {
                        self.elab(a, ex, mu, None);
                    }
                    return None;
                };
                let params = self.sig.symbol_decl(sym).expect("known symbol").params.clone();
                if params.len() != args.len() {
                    self.err(
                        n.full,
                        "arity-mismatch",
                        format!("`{}` takes {} argument(s), found {}", name.text, params.len(), args.len()),
                    );
                    return None;
                }
                let mut out = Vec::with_capacity(args.len());
                let mut ok = true;
                for (i, (a, &ps)) in args.iter().zip(&params).enumerate() {
                    match self.elab(a, ex, mu, Some(ps)) {
                        Some(p) if p.sort() == ps => out.push(p),
                        Some(p) => {
                            let msg = format!(
                                "argument {} of `{}` has sort `{}`, expected `{}`",
                                i + 1,
                                name.text,
                                self.sort_name(p.sort()),
                                self.sort_name(ps)
                            );
                            self.err(a.full, "arg-sort-mismatch", msg);
                            ok = false;
                        }
                        None => ok = false,
                    }
                }
                if !ok {
                    return None;
                }
                self.finish(n.full, Pattern::app_in(self.sig, sym, out, ex.clone(), mu.clone()))
            }
            Ast::Not(b) => Some(Pattern::not(self.elab(b, ex, mu, expected)?)),
            Ast::And(l, r) | Ast::Or(l, r) | Ast::Implies(l, r) | Ast::Iff(l, r) => {
                let (what, f): (&str, BinaryCtor) = match &n.ast {
                    Ast::And(..) => ("\\and", Pattern::and),
                    Ast::Or(..) => ("\\or", derived::or),
                    Ast::Implies(..) => ("\\implies", derived::implies),
                    _ => ("\\iff", derived::iff),
                };
                let (lp, rp) = self.pair(l, r, ex, mu, expected)?;
                if !self.same_sort(what, &lp, &rp, r.full) {
                    return None;
                }
                self.finish(n.full, f(lp, rp))
            }
            Ast::Exists(sort, body) | Ast::Forall(sort, body) => {
                let s = self.sort(sort);
                let b = self.elab(body, &ex.push(s?), mu, expected)?;
                let r = if matches!(n.ast, Ast::Exists(..)) { Pattern::exists(s?, b) } else { derived::forall(s?, b) };
                self.finish(n.full, r)
            }
            Ast::Mu(annot, body) | Ast::Nu(annot, body) => {
                let s = match annot {
                    Some(a) => self.sort(a)?,
                    None => match infer_binder(self.sig, body, ex, &mu_env(mu)).or(expected) {
                        Some(s) => s,
                        None => {
                            let kw = if matches!(n.ast, Ast::Mu(..)) { "mu" } else { "nu" };
                            self.err(
                                n.head,
                                "cannot-infer-sort",
                                format!("cannot infer the binder sort; write `\\{kw}{{Sort}}`"),
                            );
                            return None;
                        }
                    },
                };
                let b = self.elab(body, ex, &mu.push(s), Some(s))?;
                if b.sort() != s {
                    let msg = format!(
                        "fixpoint binder has sort `{}` but its body has sort `{}`",
                        self.sort_name(s),
                        self.sort_name(b.sort())
                    );
                    self.err(body.full, "binder-sort-mismatch", msg);
                    return None;
                }
                let positive_body = {
                    let probe = Pattern::mu_binder(b.clone()).expect("sorts checked");
                    check_mu_positivity(&probe).verdicts.first().is_none_or(|v| v.positive)
                };
                if !positive_body {
                    self.diags.push(Diagnostic::warning(
                        n.head,
                        "non-positive-mu",
                        "the fixpoint variable `B0` occurs under an odd number of negations",
                    ));
                }
                let r = if matches!(n.ast, Ast::Mu(..)) { Pattern::mu_binder(b) } else { derived::nu(b) };
                self.finish(n.full, r)
            }
            Ast::Ceil(sort, body) | Ast::Floor(sort, body) => {
                let s = self.sort(sort);
                let b = self.elab(body, ex, mu, None)?;
                let s = s?;
                Some(if matches!(n.ast, Ast::Ceil(..)) { Pattern::defined(s, b) } else { derived::floor(s, b) })
            }
            Ast::Top(sort) => Some(derived::top(self.sort(sort)?, ex.clone(), mu.clone())),
            Ast::Bottom(sort) => Some(derived::bottom(self.sort(sort)?, ex.clone(), mu.clone())),
            Ast::Equals(sort, l, r) | Ast::Subseteq(sort, l, r) => {
                let s = self.sort(sort);
                let (lp, rp) = self.pair(l, r, ex, mu, None)?;
                let s = s?;
                let eq = matches!(n.ast, Ast::Equals(..));
                if !self.same_sort(if eq { "\\equals" } else { "\\subseteq" }, &lp, &rp, r.full) {
                    return None;
                }
                self.finish(n.full, if eq { derived::equals(s, lp, rp) } else { derived::subseteq(s, lp, rp) })
            }
        }
    }

    fn pair(
        &mut self,
        l: &Node,
        r: &Node,
        ex: &Context,
        mu: &Context,
        expected: Option<Sort>,
    ) -> Option<(Pattern, Pattern)> {
        // Each operand's sort is the best hint for the other.
        let hint =
            expected.or_else(|| infer(self.sig, l, ex, &mu_env(mu))).or_else(|| infer(self.sig, r, ex, &mu_env(mu)));
        let lp = self.elab(l, ex, mu, hint);
        let rp = self.elab(r, ex, mu, hint);
        Some((lp?, rp?))
    }

    fn finish(&mut self, span: Span, r: Result<Pattern, KernelError>) -> Option<Pattern> {
        r.map_err(|e| self.kernel(span, e)).ok()
    }
}

/// Set-binder sorts, innermost last. Inference marks a binder whose sort
/// is still unknown with `None`.
fn mu_env(mu: &Context) -> Vec<Option<Sort>> {
    mu.to_vec().into_iter().rev().map(Some).collect()
}

/// Sort of `n` if it is determined without expectations.
fn infer(sig: &Signature, n: &Node, ex: &Context, mu: &[Option<Sort>]) -> Option<Sort> {
    let lookup = |name: &Name| sig.sort(&name.text);
    match &n.ast {
        Ast::EVar(_, s) | Ast::SVar(_, s) => lookup(s),
        Ast::BEVar(i) => ex.get((*i)?),
        Ast::BSVar(i) => {
            let i = (*i)?;
            mu.len().checked_sub(i + 1).and_then(|k| mu[k])
        }
        Ast::App(name, _) => sig.symbol(&name.text).and_then(|s| Some(sig.symbol_decl(s).ok()?.result)),
        Ast::Not(b) => infer(sig, b, ex, mu),
        Ast::And(l, r) | Ast::Or(l, r) | Ast::Implies(l, r) | Ast::Iff(l, r) => {
            infer(sig, l, ex, mu).or_else(|| infer(sig, r, ex, mu))
        }
        Ast::Exists(s, b) | Ast::Forall(s, b) => infer(sig, b, &ex.push(lookup(s)?), mu),
        Ast::Mu(annot, b) | Ast::Nu(annot, b) => {
            if let Some(a) = annot {
                return lookup(a);
            }
            infer_binder(sig, b, ex, mu)
        }
        Ast::Ceil(s, _)
        | Ast::Floor(s, _)
        | Ast::Top(s)
        | Ast::Bottom(s)
        | Ast::Equals(s, ..)
        | Ast::Subseteq(s, ..) => lookup(s),
    }
}

/// Sort of an unannotated fixpoint whose body is `body`.
fn infer_binder(sig: &Signature, body: &Node, ex: &Context, mu: &[Option<Sort>]) -> Option<Sort> {
    let mut inner = mu.to_vec();
    inner.push(None);
    infer(sig, body, ex, &inner)
}

pub(crate) fn kernel_diagnostic(sig: &Signature, span: Span, e: &KernelError) -> Diagnostic {
    let code = match e {
        KernelError::IndexOutOfScope { .. } => "index-out-of-scope",
        KernelError::ArityMismatch { .. } => "arity-mismatch",
        KernelError::ArgSortMismatch { .. } | KernelError::SortMismatch { .. } => "arg-sort-mismatch",
        KernelError::ContextMismatch { .. } => "context-mismatch",
        KernelError::BinderSortMismatch { .. } => "binder-sort-mismatch",
        KernelError::UnknownSymbol(_) => "unknown-symbol",
        KernelError::NotClosed => "not-closed",
    };
    let message = match e {
        KernelError::ArgSortMismatch { symbol, index, expected, found } => format!(
            "argument {} of `{symbol}` has sort `{}`, expected `{}`",
            index + 1,
            sig.sort_name(*found),
            sig.sort_name(*expected)
        ),
        KernelError::SortMismatch { left, right } => {
            format!("operands have sorts `{}` and `{}`", sig.sort_name(*left), sig.sort_name(*right))
        }
        other => other.to_string(),
    };
    Diagnostic::error(span, code, message)
}
