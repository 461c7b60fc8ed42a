//! Valuations and pattern evaluation over finite models.
//!
//! Evaluation recurses on pattern size. The binder cases instantiate their
//! bound variable with a single fresh free variable, which leaves the size
//! of the body unchanged, so every recursive call is on a strictly smaller
//! pattern.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{check_mu_positivity, Pattern, PatternKind};
use crate::model::{singleton_fastpath, CarrierElem, CarrierSet, FiniteModel, ModelError};
use crate::signature::{ElemVar, SetVar, Signature};
use crate::subst::{bevar_subst, bsvar_subst, SplitPoint, SubstError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("pattern is not closed")]
    NotClosed,
    #[error("unbound free variable {0}")]
    UnboundFreeVariable(String),
    #[error("value for {0} has the wrong sort")]
    SortMismatch(String),
    #[error("least fixpoint by iteration needs a positive body (use the pre-fixpoint engine)")]
    NonPositiveMu,
    #[error("carrier of sort `{sort}` has {size} elements, above the pre-fixpoint cap of {cap}")]
    CarrierTooLarge { sort: String, size: usize, cap: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Subst(#[from] SubstError),
}

/// Per-sort assignment of carrier elements to element variables and carrier
/// subsets to set variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    evars: BTreeMap<ElemVar, CarrierElem>,
    svars: BTreeMap<SetVar, CarrierSet>,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn update_evar(&self, x: &ElemVar, value: CarrierElem) -> Result<Valuation, EvalError> {
        let mut out = self.clone();
        out.set_evar(x, value)?;
        Ok(out)
    }

    pub fn update_svar(&self, x: &SetVar, value: CarrierSet) -> Result<Valuation, EvalError> {
        let mut out = self.clone();
        out.set_svar(x, value)?;
        Ok(out)
    }

    pub fn set_evar(&mut self, x: &ElemVar, value: CarrierElem) -> Result<(), EvalError> {
        if value.sort != x.sort {
            return Err(EvalError::SortMismatch(x.name.to_string()));
        }
        self.evars.insert(x.clone(), value);
        Ok(())
    }

    pub fn set_svar(&mut self, x: &SetVar, value: CarrierSet) -> Result<(), EvalError> {
        if value.sort() != x.sort {
            return Err(EvalError::SortMismatch(format!("#{}", x.name)));
        }
        self.svars.insert(x.clone(), value);
        Ok(())
    }

    pub fn evar(&self, x: &ElemVar) -> Option<CarrierElem> {
        self.evars.get(x).copied()
    }

    pub fn svar(&self, x: &SetVar) -> Option<&CarrierSet> {
        self.svars.get(x)
    }

    pub fn evars(&self) -> impl Iterator<Item = (&ElemVar, CarrierElem)> {
        self.evars.iter().map(|(k, v)| (k, *v))
    }

    pub fn svars(&self) -> impl Iterator<Item = (&SetVar, &CarrierSet)> {
        self.svars.iter()
    }
}

/// Generator of variable names that cannot clash with user variables.
///
/// Names have the form `<prefix>'<n>`, which the text formats reject, and
/// additionally skip any name registered with [`FreshNameSource::avoid`].
#[derive(Clone, Debug, Default)]
pub struct FreshNameSource {
    counter: u64,
    avoid: HashSet<Arc<str>>,
}

impl FreshNameSource {
    pub fn new() -> FreshNameSource {
        FreshNameSource::default()
    }

    pub fn starting_at(counter: u64) -> FreshNameSource {
        FreshNameSource { counter, avoid: HashSet::new() }
    }

    pub fn avoid(&mut self, name: Arc<str>) {
        self.avoid.insert(name);
    }

    pub fn next_name(&mut self, prefix: &str) -> Arc<str> {
        loop {
            let name: Arc<str> = format!("{prefix}'{}", self.counter).into();
            self.counter += 1;
            if !self.avoid.contains(&name) {
                return name;
            }
        }
    }
}

/// Least-fixpoint engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LfpMode {
    /// Kleene iteration from the empty set; requires positive bodies.
    #[default]
    Iterate,
    /// Intersection of all pre-fixpoints; exponential in the carrier size.
    Prefix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub lfp: LfpMode,
    /// Largest carrier the pre-fixpoint engine will enumerate subsets of.
    pub prefix_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> EvalOptions {
        EvalOptions { lfp: LfpMode::Iterate, prefix_cap: 20 }
    }
}

/// Least fixpoint of `step` by iteration from the empty set.
///
/// For a monotone `step` the chain stabilizes within `width + 1` steps;
/// anything longer means `step` is not monotone.
pub fn lfp_iterate(
    empty: CarrierSet,
    mut step: impl FnMut(&CarrierSet) -> Result<CarrierSet, EvalError>,
) -> Result<CarrierSet, EvalError> {
    let mut current = empty;
    for _ in 0..=current.width() + 1 {
        let next = step(&current)?;
        if next == current {
            return Ok(current);
        }
        current = next;
    }
    Err(EvalError::NonPositiveMu)
}

/// Least fixpoint as the intersection of every `A` with `step(A) ⊆ A`.
/// Defined for any `step`; `full` is always a pre-fixpoint.
pub fn lfp_prefixpoints(
    full: CarrierSet,
    cap: usize,
    sort_name: &str,
    mut step: impl FnMut(&CarrierSet) -> Result<CarrierSet, EvalError>,
) -> Result<CarrierSet, EvalError> {
    let width = full.width();
    if width > cap.min(63) {
        return Err(EvalError::CarrierTooLarge { sort: sort_name.to_string(), size: width, cap });
    }
    let mut result = full.clone();
    for mask in 0u64..(1u64 << width) {
        let candidate = CarrierSet::from_ordinals(full.sort(), width, (0..width).filter(|i| mask >> i & 1 == 1));
        if result.is_subset(&candidate) {
            continue;
        }
        if step(&candidate)?.is_subset(&candidate) {
            result = result.intersection(&candidate);
        }
    }
    Ok(result)
}

/// Evaluate a closed pattern with default options.
pub fn eval(model: &FiniteModel, rho: &Valuation, p: &Pattern) -> Result<CarrierSet, EvalError> {
    Evaluator::new(model, EvalOptions::default()).eval(rho, p)
}

pub struct Evaluator<'m> {
    model: &'m FiniteModel,
    options: EvalOptions,
    fresh: FreshNameSource,
    warnings: Vec<String>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m FiniteModel, options: EvalOptions) -> Evaluator<'m> {
        Evaluator::with_fresh(model, options, FreshNameSource::new())
    }

    pub fn with_fresh(model: &'m FiniteModel, options: EvalOptions, fresh: FreshNameSource) -> Evaluator<'m> {
        Evaluator { model, options, fresh, warnings: Vec::new() }
    }

    /// Warnings collected so far, e.g. pre-fixpoint results for
    /// non-positive bodies.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn eval(&mut self, rho: &Valuation, p: &Pattern) -> Result<CarrierSet, EvalError> {
        if !p.is_closed() {
            return Err(EvalError::NotClosed);
        }
        let positivity = check_mu_positivity(p);
        if !positivity.is_positive() {
            match self.options.lfp {
                LfpMode::Iterate => return Err(EvalError::NonPositiveMu),
                LfpMode::Prefix => self
                    .warnings
                    .push("non-positive \\mu body: the pre-fixpoint intersection need not be a fixpoint".to_string()),
            }
        }
        let (evars, svars) = p.free_vars();
        for name in evars.iter().map(|v| &v.name).chain(svars.iter().map(|v| &v.name)) {
            self.fresh.avoid(name.clone());
        }
        for name in rho.evars.keys().map(|v| &v.name).chain(rho.svars.keys().map(|v| &v.name)) {
            self.fresh.avoid(name.clone());
        }
        self.eval_closed(rho, p)
    }

    fn sig(&self) -> &Signature {
        self.model.signature()
    }

    fn eval_closed(&mut self, rho: &Valuation, p: &Pattern) -> Result<CarrierSet, EvalError> {
        let model = self.model;
        match p.kind() {
            PatternKind::FreeEVar(x) => match rho.evar(x) {
                Some(e) => Ok(model.singleton(e)),
                None => Err(EvalError::UnboundFreeVariable(self.sig().display_evar(x).to_string())),
            },
            PatternKind::FreeSVar(x) => match rho.svar(x) {
                Some(s) => Ok(s.clone()),
                None => Err(EvalError::UnboundFreeVariable(self.sig().display_svar(x).to_string())),
            },
            PatternKind::BoundEVar(_) | PatternKind::BoundSVar(_) => Err(EvalError::NotClosed),
            PatternKind::Not(b) => Ok(self.eval_closed(rho, b)?.complement()),
            PatternKind::And(l, r) => {
                let l = self.eval_closed(rho, l)?;
                if l.is_empty() {
                    return Ok(l);
                }
                Ok(l.intersection(&self.eval_closed(rho, r)?))
            }
            PatternKind::App(symbol, args) => {
                let sets = args.iter().map(|a| self.eval_closed(rho, a)).collect::<Result<Vec<_>, _>>()?;
                match singleton_fastpath(&sets) {
                    Some(tuple) => Ok(model.interpret_symbol(*symbol, &tuple)?),
                    None => Ok(model.extended_app(*symbol, &sets)?),
                }
            }
            PatternKind::Defined(b) => {
                let inner = self.eval_closed(rho, b)?;
                Ok(model.definedness_sem(p.sort(), &inner))
            }
            PatternKind::Exists(s, body) => {
                let x = ElemVar::new(self.fresh.next_name("x"), *s);
                let inst = bevar_subst(&Pattern::evar(x.clone()), body, SplitPoint(0))?;
                let mut rho = rho.clone();
                let mut out = model.empty_set(p.sort());
                for m in model.elems(*s) {
                    rho.set_evar(&x, m)?;
                    out.union_with(&self.eval_closed(&rho, &inst)?);
                    if out.is_full() {
                        break;
                    }
                }
                Ok(out)
            }
            PatternKind::Mu(body) => {
                let sort = p.sort();
                let options = self.options;
                let x = SetVar::new(self.fresh.next_name("X"), sort);
                let inst = bsvar_subst(&Pattern::svar(x.clone()), body, SplitPoint(0))?;
                let mut rho = rho.clone();
                let mut step = |a: &CarrierSet| -> Result<CarrierSet, EvalError> {
                    rho.set_svar(&x, a.clone())?;
                    self.eval_closed(&rho, &inst)
                };
                match options.lfp {
                    LfpMode::Iterate => lfp_iterate(model.empty_set(sort), step),
                    LfpMode::Prefix => {
                        let name = model.signature().sort_name(sort).to_string();
                        lfp_prefixpoints(model.carrier(sort), options.prefix_cap, &name, &mut step)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{derived, Context};
    use crate::signature::{Sort, Symbol};

    struct Std {
        model: FiniteModel,
        nat: Sort,
        bool_: Sort,
        zero: Symbol,
        succ: Symbol,
        is_zero: Symbol,
    }

    fn std_model() -> Std {
        let mut sig = Signature::new();
        let bool_ = sig.declare_sort("Bool").unwrap();
        let nat = sig.declare_sort("Nat").unwrap();
        let zero = sig.declare_symbol("O", &[], nat).unwrap();
        let succ = sig.declare_symbol("S", &[nat], nat).unwrap();
        let is_zero = sig.declare_symbol("isZero", &[nat], bool_).unwrap();
        let mut b = FiniteModel::builder(Arc::new(sig));
        b.carrier(bool_, ["t", "f"]).unwrap();
        b.carrier(nat, ["0", "1", "2", "3"]).unwrap();
        let n = |i| CarrierElem { sort: nat, ordinal: i };
        b.interp(zero, &[], CarrierSet::singleton(n(0), 4)).unwrap();
        for i in 0..4 {
            if i < 3 {
                b.interp(succ, &[n(i)], CarrierSet::singleton(n(i + 1), 4)).unwrap();
            }
            let v = CarrierElem { sort: bool_, ordinal: if i == 0 { 0 } else { 1 } };
            b.interp(is_zero, &[n(i)], CarrierSet::singleton(v, 2)).unwrap();
        }
        Std { model: b.build().unwrap(), nat, bool_, zero, succ, is_zero }
    }

    fn nat_domain(s: &Std) -> Pattern {
        let sig = s.model.signature();
        let mu = Context::from([s.nat]);
        let o = Pattern::app_in(sig, s.zero, vec![], Context::empty(), mu.clone()).unwrap();
        let b0 = Pattern::bound_svar(Context::empty(), mu, 0).unwrap();
        let sb = Pattern::app(sig, s.succ, vec![b0]).unwrap();
        Pattern::mu_binder(derived::or(o, sb).unwrap()).unwrap()
    }

    #[test]
    fn valuation_updates() {
        let s = std_model();
        let x = ElemVar::new("x", s.nat);
        let y = ElemVar::new("y", s.nat);
        let two = s.model.elem(s.nat, "2").unwrap();
        let one = s.model.elem(s.nat, "1").unwrap();
        let rho = Valuation::new().update_evar(&y, one).unwrap();
        let rho2 = rho.update_evar(&x, two).unwrap();
        assert_eq!(rho2.evar(&x), Some(two));
        assert_eq!(rho2.evar(&y), Some(one));
        let t = s.model.elem(s.bool_, "t").unwrap();
        assert!(matches!(rho.update_evar(&x, t), Err(EvalError::SortMismatch(_))));
    }

    #[test]
    fn is_zero_of_one_is_false() {
        let s = std_model();
        let sig = s.model.signature();
        let o = Pattern::app(sig, s.zero, vec![]).unwrap();
        let so = Pattern::app(sig, s.succ, vec![o]).unwrap();
        let p = Pattern::app(sig, s.is_zero, vec![so]).unwrap();
        let r = eval(&s.model, &Valuation::new(), &p).unwrap();
        assert_eq!(s.model.format_set(&r), "{ f }");
    }

    #[test]
    fn top_is_full_and_bottom_empty() {
        let s = std_model();
        let top = derived::top(s.nat, Context::empty(), Context::empty());
        assert!(eval(&s.model, &Valuation::new(), &top).unwrap().is_full());
        let bot = derived::bottom(s.nat, Context::empty(), Context::empty());
        assert!(eval(&s.model, &Valuation::new(), &bot).unwrap().is_empty());
    }

    #[test]
    fn nat_domain_is_full_in_both_engines() {
        let s = std_model();
        let p = nat_domain(&s);
        for lfp in [LfpMode::Iterate, LfpMode::Prefix] {
            let mut ev = Evaluator::new(&s.model, EvalOptions { lfp, prefix_cap: 20 });
            assert!(ev.eval(&Valuation::new(), &p).unwrap().is_full(), "{lfp:?}");
        }
    }

    #[test]
    fn lfp_engines_on_plain_transformers() {
        let s = std_model();
        let empty = s.model.empty_set(s.nat);
        let full = s.model.carrier(s.nat);
        let id = |a: &CarrierSet| Ok(a.clone());
        assert!(lfp_iterate(empty.clone(), id).unwrap().is_empty());
        assert!(lfp_prefixpoints(full.clone(), 20, "Nat", id).unwrap().is_empty());
        let c = CarrierSet::from_ordinals(s.nat, 4, [1, 2]);
        let konst = |_: &CarrierSet| Ok(c.clone());
        assert_eq!(lfp_iterate(empty.clone(), konst).unwrap(), c);
        assert_eq!(lfp_prefixpoints(full.clone(), 20, "Nat", konst).unwrap(), c);
        // {0} ∪ succ(A), succ capped at 3.
        let succ = |a: &CarrierSet| {
            Ok(CarrierSet::from_ordinals(
                s.nat,
                4,
                std::iter::once(0).chain(a.iter().map(|e| e.ordinal + 1).filter(|&o| o < 4)),
            ))
        };
        assert!(lfp_iterate(empty, succ).unwrap().is_full());
        assert!(lfp_prefixpoints(full.clone(), 20, "Nat", succ).unwrap().is_full());
        assert!(matches!(
            lfp_prefixpoints(full, 3, "Nat", id),
            Err(EvalError::CarrierTooLarge { size: 4, cap: 3, .. })
        ));
    }

    #[test]
    fn non_positive_mu_needs_prefix_mode() {
        let s = std_model();
        let b0 = Pattern::bound_svar(Context::empty(), Context::from([s.nat]), 0).unwrap();
        let p = Pattern::mu_binder(Pattern::not(b0)).unwrap();
        assert_eq!(eval(&s.model, &Valuation::new(), &p), Err(EvalError::NonPositiveMu));
        let mut ev = Evaluator::new(&s.model, EvalOptions { lfp: LfpMode::Prefix, prefix_cap: 20 });
        // Pre-fixpoints of A ↦ ¬A are the sets containing their complement:
        // only the full carrier.
        assert!(ev.eval(&Valuation::new(), &p).unwrap().is_full());
        assert_eq!(ev.warnings().len(), 1);
    }

    #[test]
    fn errors_for_open_and_unbound() {
        let s = std_model();
        let x = Pattern::evar(ElemVar::new("x", s.nat));
        assert_eq!(eval(&s.model, &Valuation::new(), &x), Err(EvalError::UnboundFreeVariable("x:Nat".into())));
        let b0 = Pattern::bound_evar(Context::from([s.nat]), Context::empty(), 0).unwrap();
        assert_eq!(eval(&s.model, &Valuation::new(), &b0), Err(EvalError::NotClosed));
    }

    #[test]
    fn fresh_names_avoid_user_variables() {
        let mut f = FreshNameSource::new();
        f.avoid("x'0".into());
        assert_eq!(&*f.next_name("x"), "x'1");
        assert_eq!(&*f.next_name("x"), "x'2");
    }

    #[test]
    fn exists_binds_a_name_that_clashes_with_nothing() {
        // ∃Nat. (b0 ∧ x'0) where x'0 is a user variable bound to 2: the
        // fresh binder variable must not capture it.
        let s = std_model();
        let user = ElemVar::new("x'0", s.nat);
        let ex = Context::from([s.nat]);
        let b0 = Pattern::bound_evar(ex.clone(), Context::empty(), 0).unwrap();
        let free = Pattern::free_evar(user.clone(), ex, Context::empty());
        let p = Pattern::exists(s.nat, Pattern::and(b0, free).unwrap()).unwrap();
        let two = s.model.elem(s.nat, "2").unwrap();
        let rho = Valuation::new().update_evar(&user, two).unwrap();
        assert_eq!(eval(&s.model, &rho, &p).unwrap(), s.model.singleton(two));
    }
}
