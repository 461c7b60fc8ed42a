//! Derived connectives, expanded into core constructors.
//!
//! | notation            | expansion                     |
//! |---------------------|-------------------------------|
//! | `⊤s`                | `∃s. b0`                      |
//! | `⊥s`                | `¬⊤s`                         |
//! | `φ ∨ ψ`             | `¬(¬φ ∧ ¬ψ)`                  |
//! | `φ → ψ`             | `¬φ ∨ ψ`                      |
//! | `φ ↔ ψ`             | `(φ → ψ) ∧ (ψ → φ)`           |
//! | `∀s. φ`             | `¬∃s. ¬φ`                     |
//! | `ν. φ`              | `¬μ. ¬φ[¬B0/B0]`              |
//! | `⌊φ⌋s`              | `¬⌈¬φ⌉s`                      |
//! | `φ =s ψ`            | `⌊φ ↔ ψ⌋s`                    |
//! | `φ ⊆s ψ`            | `⌊φ → ψ⌋s`                    |

use super::{Context, KernelError, Pattern, PatternKind};
use crate::signature::Sort;

pub fn top(sort: Sort, ex: Context, mu: Context) -> Pattern {
    let body = Pattern::raw(PatternKind::BoundEVar(0), sort, ex.push(sort), mu);
    Pattern::exists(sort, body).expect("binder sort pushed above")
}

pub fn bottom(sort: Sort, ex: Context, mu: Context) -> Pattern {
    Pattern::not(top(sort, ex, mu))
}

pub fn or(left: Pattern, right: Pattern) -> Result<Pattern, KernelError> {
    Ok(Pattern::not(Pattern::and(Pattern::not(left), Pattern::not(right))?))
}

pub fn implies(left: Pattern, right: Pattern) -> Result<Pattern, KernelError> {
    or(Pattern::not(left), right)
}

pub fn iff(left: Pattern, right: Pattern) -> Result<Pattern, KernelError> {
    let forward = implies(left.clone(), right.clone())?;
    let backward = implies(right, left)?;
    Pattern::and(forward, backward)
}

pub fn forall(binder_sort: Sort, body: Pattern) -> Result<Pattern, KernelError> {
    Ok(Pattern::not(Pattern::exists(binder_sort, Pattern::not(body))?))
}

/// Greatest fixpoint. `body.mu` must start with `body.sort()`, as for `\mu`.
pub fn nu(body: Pattern) -> Result<Pattern, KernelError> {
    let negated = negate_bound_svar(&body, 0);
    Ok(Pattern::not(Pattern::mu_binder(Pattern::not(negated))?))
}

pub fn floor(result_sort: Sort, body: Pattern) -> Pattern {
    Pattern::not(Pattern::defined(result_sort, Pattern::not(body)))
}

pub fn equals(result_sort: Sort, left: Pattern, right: Pattern) -> Result<Pattern, KernelError> {
    Ok(floor(result_sort, iff(left, right)?))
}

pub fn subseteq(result_sort: Sort, left: Pattern, right: Pattern) -> Result<Pattern, KernelError> {
    Ok(floor(result_sort, implies(left, right)?))
}

/// Replace every occurrence of the set variable bound `level` binders above
/// `p` by its negation. Contexts are untouched.
pub fn negate_bound_svar(p: &Pattern, level: usize) -> Pattern {
    let (sort, ex, mu) = (p.sort(), p.ex().clone(), p.mu().clone());
    let kind = match p.kind() {
        PatternKind::BoundSVar(i) if *i == level => return Pattern::not(p.clone()),
        PatternKind::FreeEVar(_) | PatternKind::FreeSVar(_) | PatternKind::BoundEVar(_) | PatternKind::BoundSVar(_) => {
            return p.clone()
        }
        PatternKind::App(s, args) => PatternKind::App(*s, args.iter().map(|a| negate_bound_svar(a, level)).collect()),
        PatternKind::Not(b) => PatternKind::Not(negate_bound_svar(b, level)),
        PatternKind::And(l, r) => PatternKind::And(negate_bound_svar(l, level), negate_bound_svar(r, level)),
        PatternKind::Exists(s, b) => PatternKind::Exists(*s, negate_bound_svar(b, level)),
        PatternKind::Mu(b) => PatternKind::Mu(negate_bound_svar(b, level + 1)),
        PatternKind::Defined(b) => PatternKind::Defined(negate_bound_svar(b, level)),
    };
    Pattern::raw(kind, sort, ex, mu)
}
