//! Well-sorted, well-scoped patterns.
//!
//! Every [`Pattern`] node records its sort together with two sort contexts:
//! `ex` for dangling bound element variables and `mu` for dangling bound set
//! variables. The only way to obtain a pattern is through the checked
//! constructors below, so an ill-sorted or ill-scoped tree cannot be built.
//! A pattern is closed iff both contexts are empty.

mod context;
pub mod derived;
mod positivity;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::signature::{ElemVar, SetVar, Signature, Sort, Symbol};

pub use context::Context;
pub use positivity::{check_mu_positivity, MuVerdict, PositivityReport};

/// Which of the two bound-variable namespaces an operation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Binder {
    /// Element variables, bound by `\exists`, tracked by `ex`.
    Elem,
    /// Set variables, bound by `\mu`, tracked by `mu`.
    Set,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("bound {} variable {index} is out of scope (context has {len} entries)", binder_word(*.binder))]
    IndexOutOfScope { binder: Binder, index: usize, len: usize },
    #[error("symbol `{symbol}` expects {expected} argument(s), got {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("argument {index} of `{symbol}` has sort #{}, expected #{}", .found.id(), .expected.id())]
    ArgSortMismatch { symbol: String, index: usize, expected: Sort, found: Sort },
    #[error("operand {index} does not share the contexts of the enclosing node")]
    ContextMismatch { index: usize },
    #[error("operands have different sorts (#{} and #{})", .left.id(), .right.id())]
    SortMismatch { left: Sort, right: Sort },
    #[error("binder expects its body's context to start with sort {}", fmt_opt_sort(*.expected))]
    BinderSortMismatch { binder: Binder, expected: Option<Sort>, found: Option<Sort> },
    #[error("unknown symbol #{0}")]
    UnknownSymbol(usize),
    #[error("pattern is not closed")]
    NotClosed,
}

fn binder_word(b: Binder) -> &'static str {
    match b {
        Binder::Elem => "element",
        Binder::Set => "set",
    }
}

fn fmt_opt_sort(s: Option<Sort>) -> String {
    s.map_or_else(|| "<none>".to_string(), |s| format!("#{}", s.id()))
}

#[derive(Clone, Debug)]
pub enum PatternKind {
    FreeEVar(ElemVar),
    FreeSVar(SetVar),
    BoundEVar(usize),
    BoundSVar(usize),
    App(Symbol, Vec<Pattern>),
    Not(Pattern),
    And(Pattern, Pattern),
    /// Existential binder; the sort is the sort of the bound variable.
    Exists(Sort, Pattern),
    Mu(Pattern),
    /// Definedness; the node's own sort is independent of the body's.
    Defined(Pattern),
}

#[derive(Clone)]
pub struct Pattern(Arc<Node>);

struct Node {
    kind: PatternKind,
    sort: Sort,
    ex: Context,
    mu: Context,
}

impl Pattern {
    /// Assemble a node without checking the typing discipline. Callers in
    /// this crate must establish the per-node invariants themselves.
    pub(crate) fn raw(kind: PatternKind, sort: Sort, ex: Context, mu: Context) -> Pattern {
        Pattern(Arc::new(Node { kind, sort, ex, mu }))
    }

    pub fn kind(&self) -> &PatternKind {
        &self.0.kind
    }

    pub fn sort(&self) -> Sort {
        self.0.sort
    }

    pub fn ex(&self) -> &Context {
        &self.0.ex
    }

    pub fn mu(&self) -> &Context {
        &self.0.mu
    }

    pub fn context(&self, binder: Binder) -> &Context {
        match binder {
            Binder::Elem => self.ex(),
            Binder::Set => self.mu(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.ex().is_empty() && self.mu().is_empty()
    }

    pub fn children(&self) -> Vec<&Pattern> {
        match self.kind() {
            PatternKind::FreeEVar(_)
            | PatternKind::FreeSVar(_)
            | PatternKind::BoundEVar(_)
            | PatternKind::BoundSVar(_) => Vec::new(),
            PatternKind::App(_, args) => args.iter().collect(),
            PatternKind::Not(p) | PatternKind::Exists(_, p) | PatternKind::Mu(p) | PatternKind::Defined(p) => vec![p],
            PatternKind::And(l, r) => vec![l, r],
        }
    }

    // ---- constructors ----

    pub fn free_evar(var: ElemVar, ex: Context, mu: Context) -> Pattern {
        let sort = var.sort;
        Pattern::raw(PatternKind::FreeEVar(var), sort, ex, mu)
    }

    pub fn free_svar(var: SetVar, ex: Context, mu: Context) -> Pattern {
        let sort = var.sort;
        Pattern::raw(PatternKind::FreeSVar(var), sort, ex, mu)
    }

    /// Closed free element variable.
    pub fn evar(var: ElemVar) -> Pattern {
        Pattern::free_evar(var, Context::empty(), Context::empty())
    }

    /// Closed free set variable.
    pub fn svar(var: SetVar) -> Pattern {
        Pattern::free_svar(var, Context::empty(), Context::empty())
    }

    pub fn bound_evar(ex: Context, mu: Context, index: usize) -> Result<Pattern, KernelError> {
        let sort = ex.get(index).ok_or(KernelError::IndexOutOfScope { binder: Binder::Elem, index, len: ex.len() })?;
        Ok(Pattern::raw(PatternKind::BoundEVar(index), sort, ex, mu))
    }

    pub fn bound_svar(ex: Context, mu: Context, index: usize) -> Result<Pattern, KernelError> {
        let sort = mu.get(index).ok_or(KernelError::IndexOutOfScope { binder: Binder::Set, index, len: mu.len() })?;
        Ok(Pattern::raw(PatternKind::BoundSVar(index), sort, ex, mu))
    }

    pub fn bound(binder: Binder, ex: Context, mu: Context, index: usize) -> Result<Pattern, KernelError> {
        match binder {
            Binder::Elem => Pattern::bound_evar(ex, mu, index),
            Binder::Set => Pattern::bound_svar(ex, mu, index),
        }
    }

    /// Application. Contexts are taken from the arguments; a constant gets
    /// empty contexts (use [`Pattern::app_in`] to place it elsewhere).
    pub fn app(sig: &Signature, symbol: Symbol, args: Vec<Pattern>) -> Result<Pattern, KernelError> {
        let (ex, mu) = match args.first() {
            Some(a) => (a.ex().clone(), a.mu().clone()),
            None => (Context::empty(), Context::empty()),
        };
        Pattern::app_in(sig, symbol, args, ex, mu)
    }

    /// Application whose node lives in the given contexts; every argument
    /// must carry exactly these contexts.
    pub fn app_in(
        sig: &Signature,
        symbol: Symbol,
        args: Vec<Pattern>,
        ex: Context,
        mu: Context,
    ) -> Result<Pattern, KernelError> {
        let decl = sig.symbol_decl(symbol).map_err(|_| KernelError::UnknownSymbol(symbol.id()))?;
        if decl.params.len() != args.len() {
            return Err(KernelError::ArityMismatch {
                symbol: decl.name.to_string(),
                expected: decl.params.len(),
                found: args.len(),
            });
        }
        for (index, (arg, &expected)) in args.iter().zip(&decl.params).enumerate() {
            if arg.sort() != expected {
                return Err(KernelError::ArgSortMismatch {
                    symbol: decl.name.to_string(),
                    index,
                    expected,
                    found: arg.sort(),
                });
            }
            if *arg.ex() != ex || *arg.mu() != mu {
                return Err(KernelError::ContextMismatch { index });
            }
        }
        Ok(Pattern::raw(PatternKind::App(symbol, args), decl.result, ex, mu))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(body: Pattern) -> Pattern {
        let (sort, ex, mu) = (body.sort(), body.ex().clone(), body.mu().clone());
        Pattern::raw(PatternKind::Not(body), sort, ex, mu)
    }

    pub fn and(left: Pattern, right: Pattern) -> Result<Pattern, KernelError> {
        if left.sort() != right.sort() {
            return Err(KernelError::SortMismatch { left: left.sort(), right: right.sort() });
        }
        if left.ex() != right.ex() || left.mu() != right.mu() {
            return Err(KernelError::ContextMismatch { index: 1 });
        }
        let (sort, ex, mu) = (left.sort(), left.ex().clone(), left.mu().clone());
        Ok(Pattern::raw(PatternKind::And(left, right), sort, ex, mu))
    }

    /// `\exists{binder_sort} body`; the body's `ex` must start with `binder_sort`.
    pub fn exists(binder_sort: Sort, body: Pattern) -> Result<Pattern, KernelError> {
        let head = body.ex().head();
        if head != Some(binder_sort) {
            return Err(KernelError::BinderSortMismatch {
                binder: Binder::Elem,
                expected: Some(binder_sort),
                found: head,
            });
        }
        let (sort, ex, mu) = (body.sort(), body.ex().tail(), body.mu().clone());
        Ok(Pattern::raw(PatternKind::Exists(binder_sort, body), sort, ex, mu))
    }

    /// `\mu body`; the body's `mu` must start with the body's own sort.
    pub fn mu_binder(body: Pattern) -> Result<Pattern, KernelError> {
        let head = body.mu().head();
        if head != Some(body.sort()) {
            return Err(KernelError::BinderSortMismatch {
                binder: Binder::Set,
                expected: Some(body.sort()),
                found: head,
            });
        }
        let (sort, ex, mu) = (body.sort(), body.ex().clone(), body.mu().tail());
        Ok(Pattern::raw(PatternKind::Mu(body), sort, ex, mu))
    }

    /// `\ceil{result_sort}(body)`.
    pub fn defined(result_sort: Sort, body: Pattern) -> Pattern {
        let (ex, mu) = (body.ex().clone(), body.mu().clone());
        Pattern::raw(PatternKind::Defined(body), result_sort, ex, mu)
    }

    // ---- queries ----

    /// Node count of the syntax tree. An application counts once plus its
    /// arguments; the symbol itself is not a node.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Pattern::size).sum::<usize>()
    }

    pub fn free_vars(&self) -> (BTreeSet<ElemVar>, BTreeSet<SetVar>) {
        let mut evars = BTreeSet::new();
        let mut svars = BTreeSet::new();
        self.collect_free_vars(&mut evars, &mut svars);
        (evars, svars)
    }

    fn collect_free_vars(&self, evars: &mut BTreeSet<ElemVar>, svars: &mut BTreeSet<SetVar>) {
        match self.kind() {
            PatternKind::FreeEVar(x) => {
                evars.insert(x.clone());
            }
            PatternKind::FreeSVar(x) => {
                svars.insert(x.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_free_vars(evars, svars);
                }
            }
        }
    }

    /// Recheck every per-node invariant from scratch.
    pub fn validate(&self, sig: &Signature) -> Result<(), KernelError> {
        let (sort, ex, mu) = (self.sort(), self.ex(), self.mu());
        let same_ctx = |p: &Pattern| p.ex() == ex && p.mu() == mu;
        match self.kind() {
            PatternKind::FreeEVar(x) if x.sort != sort => Err(KernelError::SortMismatch { left: sort, right: x.sort }),
            PatternKind::FreeSVar(x) if x.sort != sort => Err(KernelError::SortMismatch { left: sort, right: x.sort }),
            PatternKind::FreeEVar(_) | PatternKind::FreeSVar(_) => Ok(()),
            PatternKind::BoundEVar(i) => check_bound(Binder::Elem, ex, *i, sort),
            PatternKind::BoundSVar(i) => check_bound(Binder::Set, mu, *i, sort),
            PatternKind::App(symbol, args) => {
                let expected = Pattern::app_in(sig, *symbol, args.clone(), ex.clone(), mu.clone())?;
                if expected.sort() != sort {
                    return Err(KernelError::SortMismatch { left: sort, right: expected.sort() });
                }
                args.iter().try_for_each(|a| a.validate(sig))
            }
            PatternKind::Not(body) => {
                if body.sort() != sort || !same_ctx(body) {
                    return Err(KernelError::ContextMismatch { index: 0 });
                }
                body.validate(sig)
            }
            PatternKind::And(l, r) => {
                if l.sort() != sort || r.sort() != sort {
                    return Err(KernelError::SortMismatch { left: l.sort(), right: r.sort() });
                }
                if !same_ctx(l) || !same_ctx(r) {
                    return Err(KernelError::ContextMismatch { index: 0 });
                }
                l.validate(sig)?;
                r.validate(sig)
            }
            PatternKind::Exists(s, body) => {
                if *body.ex() != ex.push(*s) || body.mu() != mu || body.sort() != sort {
                    return Err(KernelError::BinderSortMismatch {
                        binder: Binder::Elem,
                        expected: Some(*s),
                        found: body.ex().head(),
                    });
                }
                body.validate(sig)
            }
            PatternKind::Mu(body) => {
                if *body.mu() != mu.push(sort) || body.ex() != ex || body.sort() != sort {
                    return Err(KernelError::BinderSortMismatch {
                        binder: Binder::Set,
                        expected: Some(sort),
                        found: body.mu().head(),
                    });
                }
                body.validate(sig)
            }
            PatternKind::Defined(body) => {
                if !same_ctx(body) {
                    return Err(KernelError::ContextMismatch { index: 0 });
                }
                body.validate(sig)
            }
        }
    }
}

fn check_bound(binder: Binder, ctx: &Context, index: usize, sort: Sort) -> Result<(), KernelError> {
    match ctx.get(index) {
        None => Err(KernelError::IndexOutOfScope { binder, index, len: ctx.len() }),
        Some(s) if s != sort => Err(KernelError::SortMismatch { left: sort, right: s }),
        Some(_) => Ok(()),
    }
}

/// Identical kind trees, sorts, contexts, indices, symbols and variables.
pub fn structural_eq(p: &Pattern, q: &Pattern) -> bool {
    p == q
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Pattern) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.sort() != other.sort() || self.ex() != other.ex() || self.mu() != other.mu() {
            return false;
        }
        use PatternKind::*;
        match (self.kind(), other.kind()) {
            (FreeEVar(a), FreeEVar(b)) => a == b,
            (FreeSVar(a), FreeSVar(b)) => a == b,
            (BoundEVar(a), BoundEVar(b)) | (BoundSVar(a), BoundSVar(b)) => a == b,
            (App(f, xs), App(g, ys)) => f == g && xs == ys,
            (Not(a), Not(b)) | (Mu(a), Mu(b)) | (Defined(a), Defined(b)) => a == b,
            (And(a1, a2), And(b1, b2)) => a1 == b1 && a2 == b2,
            (Exists(s, a), Exists(t, b)) => s == t && a == b,
            _ => false,
        }
    }
}

impl Eq for Pattern {}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PatternKind::*;
        match self.kind() {
            FreeEVar(x) => write!(f, "{}:#{}", x.name, x.sort.id()),
            FreeSVar(x) => write!(f, "#{}:#{}", x.name, x.sort.id()),
            BoundEVar(i) => write!(f, "b{i}"),
            BoundSVar(i) => write!(f, "B{i}"),
            App(s, args) => {
                write!(f, "σ{}(", s.id())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a:?}")?;
                }
                write!(f, ")")
            }
            Not(p) => write!(f, "¬({p:?})"),
            And(l, r) => write!(f, "({l:?} ∧ {r:?})"),
            Exists(s, p) => write!(f, "∃#{}. {p:?}", s.id()),
            Mu(p) => write!(f, "μ. {p:?}"),
            Defined(p) => write!(f, "⌈{p:?}⌉#{}", self.sort().id()),
        }
    }
}
