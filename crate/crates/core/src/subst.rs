//! Context extension (weakening) and capture-avoiding substitution.
//!
//! Bound-variable substitution is structural recursion on the target
//! pattern; at each bound-variable leaf the index is resolved by
//! [`index_subst`], which re-extends the replacement's context on the way
//! back up instead of recursing on a non-structural argument.

use thiserror::Error;

use crate::kernel::{Binder, Context, Pattern, PatternKind};
use crate::signature::{ElemVar, SetVar, Sort};

/// Number of context entries kept before an insertion or removal site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitPoint(pub usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("split point {split} exceeds context length {len}")]
    BadSplit { split: usize, len: usize },
    #[error("no context slot at position {split} matches the replacement")]
    SlotNotFound { split: usize },
    #[error("replacement has sort #{}, variable has sort #{}", .found.id(), .expected.id())]
    SortMismatch { expected: Sort, found: Sort },
    #[error("replacement contexts are not suffixes of the target's")]
    ContextMismatch,
}

/// Insert `ex_insert` into `p.ex` after `ex_split` entries and `mu_insert`
/// into `p.mu` after `mu_split` entries, shifting every bound index at or
/// past the split.
pub fn extend_env(
    p: &Pattern,
    ex_split: SplitPoint,
    ex_insert: &[Sort],
    mu_split: SplitPoint,
    mu_insert: &[Sort],
) -> Result<Pattern, SubstError> {
    for (split, ctx) in [(ex_split, p.ex()), (mu_split, p.mu())] {
        if split.0 > ctx.len() {
            return Err(SubstError::BadSplit { split: split.0, len: ctx.len() });
        }
    }
    if ex_insert.is_empty() && mu_insert.is_empty() {
        return Ok(p.clone());
    }
    let ex = p.ex().insert_at(ex_split.0, ex_insert);
    let mu = p.mu().insert_at(mu_split.0, mu_insert);
    let shift = Shift { ex_split: ex_split.0, ex_by: ex_insert.len(), mu_split: mu_split.0, mu_by: mu_insert.len() };
    Ok(shift.apply(p, ex, mu))
}

/// Extend one context only.
pub(crate) fn weaken(p: &Pattern, binder: Binder, split: usize, insert: &[Sort]) -> Pattern {
    let (ex_split, ex_ins, mu_split, mu_ins) = match binder {
        Binder::Elem => (split, insert, 0, &[][..]),
        Binder::Set => (0, &[][..], split, insert),
    };
    extend_env(p, SplitPoint(ex_split), ex_ins, SplitPoint(mu_split), mu_ins).expect("weakening split within context")
}

#[derive(Clone, Copy)]
struct Shift {
    ex_split: usize,
    ex_by: usize,
    mu_split: usize,
    mu_by: usize,
}

impl Shift {
    fn apply(&self, p: &Pattern, ex: Context, mu: Context) -> Pattern {
        let sort = p.sort();
        let kind = match p.kind() {
            PatternKind::BoundEVar(i) => PatternKind::BoundEVar(if *i >= self.ex_split { i + self.ex_by } else { *i }),
            PatternKind::BoundSVar(i) => PatternKind::BoundSVar(if *i >= self.mu_split { i + self.mu_by } else { *i }),
            PatternKind::Exists(s, b) => {
                let inner = Shift { ex_split: self.ex_split + 1, ..*self };
                PatternKind::Exists(*s, inner.apply(b, ex.push(*s), mu.clone()))
            }
            PatternKind::Mu(b) => {
                let inner = Shift { mu_split: self.mu_split + 1, ..*self };
                PatternKind::Mu(inner.apply(b, ex.clone(), mu.push(sort)))
            }
            other => map_children(other, |c| self.apply(c, ex.clone(), mu.clone())),
        };
        Pattern::raw(kind, sort, ex, mu)
    }
}

/// Rebuild a non-binder kind with mapped children. Binders must be handled
/// by the caller, because their children live in different contexts.
fn map_children(kind: &PatternKind, mut f: impl FnMut(&Pattern) -> Pattern) -> PatternKind {
    match kind {
        PatternKind::FreeEVar(_) | PatternKind::FreeSVar(_) | PatternKind::BoundEVar(_) | PatternKind::BoundSVar(_) => {
            kind.clone()
        }
        PatternKind::App(s, args) => PatternKind::App(*s, args.iter().map(f).collect()),
        PatternKind::Not(b) => PatternKind::Not(f(b)),
        PatternKind::And(l, r) => {
            let l = f(l);
            PatternKind::And(l, f(r))
        }
        PatternKind::Defined(b) => PatternKind::Defined(f(b)),
        PatternKind::Exists(..) | PatternKind::Mu(_) => unreachable!("binders handled by caller"),
    }
}

/// Resolve bound variable `index` (of sort `sort`) living in
/// `target = pre ++ [s'] ++ post`, where `pre` has `split` entries, while
/// slot `split` is replaced by `psi`. The result lives in `pre ++ post`
/// (for `binder`) and `other` (for the other namespace).
///
/// `psi` must have context `post` for `binder` and a suffix of `other` for
/// the other namespace.
pub fn index_subst(
    binder: Binder,
    index: usize,
    sort: Sort,
    target: &Context,
    split: SplitPoint,
    other: &Context,
    psi: &Pattern,
) -> Result<Pattern, SubstError> {
    if split.0 >= target.len() {
        return Err(SubstError::BadSplit { split: split.0, len: target.len() });
    }
    let pre: Vec<Sort> = target.iter().take(split.0).collect();
    let post = target.skip(split.0 + 1);
    if *psi.context(binder) != post
        || !psi.context(other_binder(binder)).is_suffix_of(other)
        || target.get(split.0) != Some(psi.sort())
    {
        return Err(SubstError::SlotNotFound { split: split.0 });
    }
    if target.get(index) != Some(sort) {
        return Err(SubstError::SortMismatch { expected: target.get(index).unwrap_or(sort), found: sort });
    }
    Ok(resolve_index(binder, index, &pre, &post, other, psi))
}

fn resolve_index(
    binder: Binder,
    index: usize,
    pre: &[Sort],
    post: &Context,
    other: &Context,
    psi: &Pattern,
) -> Pattern {
    match (index, pre) {
        // The substituted slot itself.
        (0, []) => {
            let other_ns = other_binder(binder);
            let missing = other.len() - psi.context(other_ns).len();
            let prefix: Vec<Sort> = other.iter().take(missing).collect();
            weaken(psi, other_ns, 0, &prefix)
        }
        // Below the slot: the index is untouched.
        (0, [_, ..]) => {
            let ctx = prepend(pre, post);
            bound_in(binder, ctx, other.clone(), 0)
        }
        // Above the slot: one entry disappears.
        (n, []) => bound_in(binder, post.clone(), other.clone(), n - 1),
        (n, [head, rest @ ..]) => {
            let r = resolve_index(binder, n - 1, rest, post, other, psi);
            weaken(&r, binder, 0, &[*head])
        }
    }
}

fn prepend(pre: &[Sort], post: &Context) -> Context {
    pre.iter().rev().fold(post.clone(), |ctx, &s| ctx.push(s))
}

fn bound_in(binder: Binder, ctx: Context, other: Context, index: usize) -> Pattern {
    let (ex, mu) = match binder {
        Binder::Elem => (ctx, other),
        Binder::Set => (other, ctx),
    };
    Pattern::bound(binder, ex, mu, index).expect("index within rebuilt context")
}

fn other_binder(binder: Binder) -> Binder {
    match binder {
        Binder::Elem => Binder::Set,
        Binder::Set => Binder::Elem,
    }
}

/// Replace the bound element variable slot at `split` of `p.ex` by `psi`.
///
/// Requires `p.ex = pre ++ [psi.sort()] ++ psi.ex()` with `|pre| = split`
/// and `psi.mu()` a suffix of `p.mu()`. The result has `ex = pre ++ psi.ex()`.
pub fn bevar_subst(psi: &Pattern, p: &Pattern, split: SplitPoint) -> Result<Pattern, SubstError> {
    bound_subst(Binder::Elem, psi, p, split)
}

/// Set-variable counterpart of [`bevar_subst`], acting on `mu`.
pub fn bsvar_subst(psi: &Pattern, p: &Pattern, split: SplitPoint) -> Result<Pattern, SubstError> {
    bound_subst(Binder::Set, psi, p, split)
}

pub fn bound_subst(binder: Binder, psi: &Pattern, p: &Pattern, split: SplitPoint) -> Result<Pattern, SubstError> {
    let ctx = p.context(binder);
    let other = other_binder(binder);
    if split.0 >= ctx.len() || ctx.get(split.0) != Some(psi.sort()) || ctx.skip(split.0 + 1) != *psi.context(binder) {
        return Err(SubstError::SlotNotFound { split: split.0 });
    }
    if !psi.context(other).is_suffix_of(p.context(other)) {
        return Err(SubstError::ContextMismatch);
    }
    Ok(BoundSubst { binder, psi }.apply(p, split.0))
}

struct BoundSubst<'a> {
    binder: Binder,
    psi: &'a Pattern,
}

impl BoundSubst<'_> {
    fn apply(&self, p: &Pattern, split: usize) -> Pattern {
        let sort = p.sort();
        let target = p.context(self.binder);
        let (ex, mu) = match self.binder {
            Binder::Elem => (target.remove_at(split), p.mu().clone()),
            Binder::Set => (p.ex().clone(), target.remove_at(split)),
        };
        let kind = match (p.kind(), self.binder) {
            (PatternKind::BoundEVar(i), Binder::Elem) | (PatternKind::BoundSVar(i), Binder::Set) => {
                let other = p.context(other_binder(self.binder));
                let pre: Vec<Sort> = target.iter().take(split).collect();
                let post = target.skip(split + 1);
                return resolve_index(self.binder, *i, &pre, &post, other, self.psi);
            }
            (PatternKind::Exists(s, b), _) => {
                let inner_split = if self.binder == Binder::Elem { split + 1 } else { split };
                PatternKind::Exists(*s, self.apply(b, inner_split))
            }
            (PatternKind::Mu(b), _) => {
                let inner_split = if self.binder == Binder::Set { split + 1 } else { split };
                PatternKind::Mu(self.apply(b, inner_split))
            }
            (other, _) => map_children(other, |c| self.apply(c, split)),
        };
        Pattern::raw(kind, sort, ex, mu)
    }
}

/// Replace every free occurrence of `x` in `p` by `psi`, weakened to the
/// local contexts. `psi.ex()` and `psi.mu()` must be suffixes of `p`'s.
pub fn fevar_subst(psi: &Pattern, x: &ElemVar, p: &Pattern) -> Result<Pattern, SubstError> {
    free_subst(psi, &FreeVar::Elem(x), p, x.sort)
}

/// Set-variable counterpart of [`fevar_subst`].
pub fn fsvar_subst(psi: &Pattern, x: &SetVar, p: &Pattern) -> Result<Pattern, SubstError> {
    free_subst(psi, &FreeVar::Set(x), p, x.sort)
}

enum FreeVar<'a> {
    Elem(&'a ElemVar),
    Set(&'a SetVar),
}

fn free_subst(psi: &Pattern, x: &FreeVar<'_>, p: &Pattern, sort: Sort) -> Result<Pattern, SubstError> {
    if psi.sort() != sort {
        return Err(SubstError::SortMismatch { expected: sort, found: psi.sort() });
    }
    if !psi.ex().is_suffix_of(p.ex()) || !psi.mu().is_suffix_of(p.mu()) {
        return Err(SubstError::ContextMismatch);
    }
    Ok(free_apply(psi, x, p))
}

fn free_apply(psi: &Pattern, x: &FreeVar<'_>, p: &Pattern) -> Pattern {
    let hit = match (p.kind(), x) {
        (PatternKind::FreeEVar(y), FreeVar::Elem(x)) => y == *x,
        (PatternKind::FreeSVar(y), FreeVar::Set(x)) => y == *x,
        _ => false,
    };
    if hit {
        let ex_pre: Vec<Sort> = p.ex().iter().take(p.ex().len() - psi.ex().len()).collect();
        let mu_pre: Vec<Sort> = p.mu().iter().take(p.mu().len() - psi.mu().len()).collect();
        return extend_env(psi, SplitPoint(0), &ex_pre, SplitPoint(0), &mu_pre).expect("split 0 is always valid");
    }
    let kind = match p.kind() {
        PatternKind::Exists(s, b) => PatternKind::Exists(*s, free_apply(psi, x, b)),
        PatternKind::Mu(b) => PatternKind::Mu(free_apply(psi, x, b)),
        other => map_children(other, |c| free_apply(psi, x, c)),
    };
    Pattern::raw(kind, p.sort(), p.ex().clone(), p.mu().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;

    struct Sorts {
        sig: Signature,
        s0: Sort,
        s1: Sort,
        s2: Sort,
        s3: Sort,
    }

    fn sorts() -> Sorts {
        let mut sig = Signature::new();
        let s0 = sig.declare_sort("s0").unwrap();
        let s1 = sig.declare_sort("s1").unwrap();
        let s2 = sig.declare_sort("s2").unwrap();
        let s3 = sig.declare_sort("s3").unwrap();
        Sorts { sig, s0, s1, s2, s3 }
    }

    fn b(ex: &Context, i: usize) -> Pattern {
        Pattern::bound_evar(ex.clone(), Context::empty(), i).unwrap()
    }

    #[test]
    fn extension_shifts_indices_past_the_split() {
        let t = sorts();
        let ex = Context::from([t.s0, t.s1, t.s1]);
        let p = Pattern::and(b(&ex, 1), b(&ex, 2)).unwrap();
        let q = extend_env(&p, SplitPoint(2), &[t.s2, t.s3], SplitPoint(0), &[]).unwrap();
        let ex2 = Context::from([t.s0, t.s1, t.s2, t.s3, t.s1]);
        assert_eq!(q, Pattern::and(b(&ex2, 1), b(&ex2, 4)).unwrap());
        assert!(q.validate(&t.sig).is_ok());
    }

    #[test]
    fn empty_extension_is_identity() {
        let t = sorts();
        let ex = Context::from([t.s0]);
        let p = b(&ex, 0);
        assert_eq!(extend_env(&p, SplitPoint(1), &[], SplitPoint(0), &[]).unwrap(), p);
        assert_eq!(
            extend_env(&p, SplitPoint(0), &[t.s1], SplitPoint(0), &[]).unwrap(),
            b(&Context::from([t.s1, t.s0]), 1)
        );
        assert_eq!(
            extend_env(&p, SplitPoint(2), &[t.s1], SplitPoint(0), &[]).unwrap_err(),
            SubstError::BadSplit { split: 2, len: 1 }
        );
    }

    #[test]
    fn index_subst_cases() {
        let t = sorts();
        let post = Context::from([t.s2]);
        let psi = Pattern::free_evar(ElemVar::new("y", t.s1), post.clone(), Context::empty());
        let none = Context::empty();
        // (0, 0): the replacement itself.
        let full = post.push(t.s1);
        assert_eq!(index_subst(Binder::Elem, 0, t.s1, &full, SplitPoint(0), &none, &psi).unwrap(), psi);
        // (0, >0): index 0 below the slot survives.
        let full = Context::from([t.s0, t.s1, t.s2]);
        assert_eq!(
            index_subst(Binder::Elem, 0, t.s0, &full, SplitPoint(1), &none, &psi).unwrap(),
            b(&Context::from([t.s0, t.s2]), 0)
        );
        // (S n, 0): decrement.
        let full = Context::from([t.s1, t.s2, t.s3]);
        let psi2 = Pattern::free_evar(ElemVar::new("y", t.s1), Context::from([t.s2, t.s3]), Context::empty());
        assert_eq!(
            index_subst(Binder::Elem, 2, t.s3, &full, SplitPoint(0), &none, &psi2).unwrap(),
            b(&Context::from([t.s2, t.s3]), 1)
        );
        // (S n, S k): recurse and re-extend; the replacement is weakened by the prefix.
        let full = Context::from([t.s0, t.s1, t.s2]);
        assert_eq!(
            index_subst(Binder::Elem, 1, t.s1, &full, SplitPoint(1), &none, &psi).unwrap(),
            Pattern::free_evar(ElemVar::new("y", t.s1), Context::from([t.s0, t.s2]), Context::empty())
        );
    }

    #[test]
    fn bevar_subst_under_binder() {
        // (∃s0. b0 ∧ b1)[ψ/0] = ∃s0. b0 ∧ ψ′ for closed ψ of sort s0.
        let t = sorts();
        let psi = Pattern::evar(ElemVar::new("y", t.s0));
        let inner = Context::from([t.s0, t.s0]);
        let body = Pattern::and(b(&inner, 0), b(&inner, 1)).unwrap();
        let p = Pattern::exists(t.s0, body).unwrap();
        let q = bevar_subst(&psi, &p, SplitPoint(0)).unwrap();
        let ex1 = Context::from([t.s0]);
        let weak = Pattern::free_evar(ElemVar::new("y", t.s0), ex1.clone(), Context::empty());
        let expected = Pattern::exists(t.s0, Pattern::and(b(&ex1, 0), weak).unwrap()).unwrap();
        assert_eq!(q, expected);
        assert!(q.is_closed());
    }

    #[test]
    fn bevar_subst_leaves_free_variables() {
        let t = sorts();
        let x = Pattern::free_evar(ElemVar::new("x", t.s0), Context::from([t.s1]), Context::empty());
        let psi = Pattern::evar(ElemVar::new("y", t.s1));
        assert_eq!(bevar_subst(&psi, &x, SplitPoint(0)).unwrap(), Pattern::evar(ElemVar::new("x", t.s0)));
        let b0 = b(&Context::from([t.s1]), 0);
        assert_eq!(bevar_subst(&psi, &b0, SplitPoint(0)).unwrap(), psi);
        assert_eq!(bevar_subst(&psi, &b0, SplitPoint(1)).unwrap_err(), SubstError::SlotNotFound { split: 1 });
        let wrong = Pattern::evar(ElemVar::new("z", t.s2));
        assert!(bevar_subst(&wrong, &b0, SplitPoint(0)).is_err());
    }

    #[test]
    fn bsvar_subst_through_exists() {
        let t = sorts();
        // μ-context [s0], body ∃s1. B0: replacing B0 under the ∃.
        let body = Pattern::bound_svar(Context::from([t.s1]), Context::from([t.s0]), 0).unwrap();
        let p = Pattern::exists(t.s1, body).unwrap();
        let psi = Pattern::svar(SetVar::new("X", t.s0));
        let q = bsvar_subst(&psi, &p, SplitPoint(0)).unwrap();
        let weak = Pattern::free_svar(SetVar::new("X", t.s0), Context::from([t.s1]), Context::empty());
        assert_eq!(q, Pattern::exists(t.s1, weak).unwrap());
    }

    #[test]
    fn fevar_subst_cases() {
        let t = sorts();
        let x = ElemVar::new("x", t.s0);
        let psi = Pattern::evar(ElemVar::new("z", t.s0));
        let n = b(&Context::from([t.s0]), 0);
        assert_eq!(fevar_subst(&psi, &x, &n).unwrap(), n);
        let y = Pattern::evar(ElemVar::new("y", t.s0));
        assert_eq!(fevar_subst(&psi, &x, &y).unwrap(), y);
        let both = Pattern::and(Pattern::evar(x.clone()), y.clone()).unwrap();
        assert_eq!(fevar_subst(&psi, &x, &both).unwrap(), Pattern::and(psi.clone(), y).unwrap());
        // Under a binder the replacement is weakened.
        let under =
            Pattern::exists(t.s1, Pattern::free_evar(x.clone(), Context::from([t.s1]), Context::empty())).unwrap();
        let expected =
            Pattern::exists(t.s1, Pattern::free_evar(ElemVar::new("z", t.s0), Context::from([t.s1]), Context::empty()))
                .unwrap();
        assert_eq!(fevar_subst(&psi, &x, &under).unwrap(), expected);
        assert!(matches!(
            fevar_subst(&Pattern::evar(ElemVar::new("w", t.s1)), &x, &both),
            Err(SubstError::SortMismatch { .. })
        ));
    }
}
