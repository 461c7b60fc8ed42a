//! Theories as labeled `(sort, closed pattern)` axioms, and satisfaction of
//! a theory by a finite model.
//!
//! A model satisfies an axiom when the axiom evaluates to the full carrier
//! of its sort under every valuation of the axiom's free variables.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::kernel::{KernelError, Pattern};
use crate::model::{CarrierSet, FiniteModel};
use crate::semantics::{EvalError, EvalOptions, Evaluator, Valuation};
use crate::signature::{ElemVar, SetVar, Signature, Sort};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoryError {
    #[error("a theory needs at least one sort")]
    EmptySignature,
    #[error("axiom `{0}` is not closed")]
    NotClosed(String),
    #[error("axiom `{label}` is declared at sort `{declared}` but its pattern has sort `{found}`")]
    SortMismatch { label: String, declared: String, found: String },
    #[error("axiom label `{0}` is already used")]
    DuplicateLabel(String),
    #[error("axiom `{label}` is ill-formed: {source}")]
    IllFormed { label: String, source: KernelError },
    #[error("axiom `{label}` has {count} valuations, above the cap of {cap}")]
    StateSpaceTooLarge { label: String, count: String, cap: u64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug)]
pub struct Axiom {
    pub label: String,
    pub sort: Sort,
    pub pattern: Pattern,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TheoryOptions {
    /// The definedness schema `⌈x:s⌉` at every sort pair has been added.
    pub definedness_schema: bool,
}

#[derive(Clone, Debug)]
pub struct Theory {
    sig: Arc<Signature>,
    axioms: Vec<Axiom>,
    labels: HashSet<String>,
    options: TheoryOptions,
}

/// Name of the element variable used by the definedness schema.
pub const DEFINEDNESS_VAR: &str = "x";

impl Theory {
    pub fn new(sig: Arc<Signature>) -> Result<Theory, TheoryError> {
        if sig.sort_count() == 0 {
            return Err(TheoryError::EmptySignature);
        }
        Ok(Theory { sig, axioms: Vec::new(), labels: HashSet::new(), options: TheoryOptions::default() })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn axiom(&self, label: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.label == label)
    }

    pub fn options(&self) -> TheoryOptions {
        self.options
    }

    pub fn add_axiom(&mut self, label: &str, sort: Sort, pattern: Pattern) -> Result<(), TheoryError> {
        if !pattern.is_closed() {
            return Err(TheoryError::NotClosed(label.to_string()));
        }
        if pattern.sort() != sort {
            return Err(TheoryError::SortMismatch {
                label: label.to_string(),
                declared: self.sig.sort_name(sort).to_string(),
                found: self.sig.sort_name(pattern.sort()).to_string(),
            });
        }
        pattern.validate(&self.sig).map_err(|source| TheoryError::IllFormed { label: label.to_string(), source })?;
        if !self.labels.insert(label.to_string()) {
            return Err(TheoryError::DuplicateLabel(label.to_string()));
        }
        self.axioms.push(Axiom { label: label.to_string(), sort, pattern });
        Ok(())
    }

    /// Append `⌈x:s⌉` at sort `s′` for every ordered sort pair, labeled
    /// `definedness/s/s′`.
    pub fn instantiate_definedness(&mut self) -> Result<(), TheoryError> {
        let sig = self.sig.clone();
        for s in sig.sorts() {
            for target in sig.sorts() {
                let label = format!("definedness/{}/{}", sig.sort_name(s), sig.sort_name(target));
                let x = Pattern::evar(ElemVar::new(DEFINEDNESS_VAR, s));
                self.add_axiom(&label, target, Pattern::defined(target, x))?;
            }
        }
        self.options.definedness_schema = true;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub eval: EvalOptions,
    /// Largest number of valuations enumerated for a single axiom.
    pub state_cap: u64,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions { eval: EvalOptions::default(), state_cap: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated { witness: Valuation, obtained: CarrierSet },
    Error(String),
}

impl Verdict {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Verdict::Satisfied)
    }

    fn word(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated { .. } => "violated",
            Verdict::Error(_) => "error",
        }
    }
}

/// Check one axiom against every valuation of its free variables.
pub fn check_axiom(model: &FiniteModel, axiom: &Axiom, options: &CheckOptions) -> Result<Verdict, TheoryError> {
    let (evars, svars) = axiom.pattern.free_vars();
    let evars: Vec<ElemVar> = evars.into_iter().collect();
    let svars: Vec<SetVar> = svars.into_iter().collect();

    // Radix of each enumeration position: carrier size for element
    // variables, 2^size for set variables.
    let mut radix: Vec<u64> = Vec::new();
    let mut count: u128 = 1;
    for v in &evars {
        let n = model.carrier_size(v.sort) as u128;
        count = count.saturating_mul(n);
        radix.push(n as u64);
    }
    for v in &svars {
        let n = model.carrier_size(v.sort) as u32;
        let subsets = if n >= 64 { u128::MAX } else { 1u128 << n };
        count = count.saturating_mul(subsets);
        radix.push(subsets.min(u64::MAX as u128) as u64);
    }
    if count > options.state_cap as u128 {
        let count = if count == u128::MAX { "too many".to_string() } else { count.to_string() };
        return Err(TheoryError::StateSpaceTooLarge { label: axiom.label.clone(), count, cap: options.state_cap });
    }

    let expected = model.carrier(axiom.sort);
    let mut ev = Evaluator::new(model, options.eval);
    let mut digits = vec![0u64; radix.len()];
    loop {
        let mut rho = Valuation::new();
        for (v, &d) in evars.iter().zip(&digits) {
            rho.set_evar(v, crate::model::CarrierElem { sort: v.sort, ordinal: d as usize })?;
        }
        for (v, &mask) in svars.iter().zip(&digits[evars.len()..]) {
            let width = model.carrier_size(v.sort);
            let set = CarrierSet::from_ordinals(v.sort, width, (0..width).filter(|i| mask >> i & 1 == 1));
            rho.set_svar(v, set)?;
        }
        let obtained = ev.eval(&rho, &axiom.pattern)?;
        if obtained != expected {
            return Ok(Verdict::Violated { witness: rho, obtained });
        }
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return Ok(Verdict::Satisfied);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radix[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

#[derive(Clone, Debug)]
pub struct AxiomResult {
    pub label: String,
    pub sort: Sort,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default)]
pub struct SatisfactionReport {
    pub results: Vec<AxiomResult>,
}

impl SatisfactionReport {
    pub fn all_satisfied(&self) -> bool {
        self.results.iter().all(|r| r.verdict.is_satisfied())
    }

    pub fn to_text(&self, model: &FiniteModel) -> String {
        let sig = model.signature();
        let mut out = String::new();
        let (mut sat, mut vio, mut err) = (0, 0, 0);
        for r in &self.results {
            let head = format!("{:<9} {} [{}]", r.verdict.word(), r.label, sig.sort_name(r.sort));
            match &r.verdict {
                Verdict::Satisfied => {
                    sat += 1;
                    let _ = writeln!(out, "{head}");
                }
                Verdict::Violated { witness, obtained } => {
                    vio += 1;
                    let _ = writeln!(
                        out,
                        "{head}: obtained {}, expected {}",
                        model.format_set(obtained),
                        model.format_set(&model.carrier(r.sort))
                    );
                    let bindings = witness_bindings(model, witness);
                    let list: Vec<String> = bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    let shown = if list.is_empty() { "the empty valuation".to_string() } else { list.join(", ") };
                    let _ = writeln!(out, "          witness: {shown}");
                }
                Verdict::Error(msg) => {
                    err += 1;
                    let _ = writeln!(out, "{head}: {msg}");
                }
            }
        }
        let _ = writeln!(out, "summary: {sat} satisfied, {vio} violated, {err} error(s)");
        out
    }

    /// One record per axiom: label, sort, verdict, witness bindings,
    /// obtained set and expected carrier.
    pub fn to_json(&self, model: &FiniteModel) -> Value {
        let sig = model.signature();
        let labels = |set: &CarrierSet| -> Vec<String> { set.iter().map(|e| model.label(e).to_string()).collect() };
        let records: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                let mut rec = Map::new();
                rec.insert("label".into(), json!(r.label));
                rec.insert("sort".into(), json!(sig.sort_name(r.sort)));
                rec.insert("verdict".into(), json!(r.verdict.word()));
                rec.insert("expected".into(), json!(labels(&model.carrier(r.sort))));
                match &r.verdict {
                    Verdict::Satisfied => {}
                    Verdict::Violated { witness, obtained } => {
                        let mut w = Map::new();
                        for (k, v) in witness_bindings(model, witness) {
                            w.insert(k, json!(v));
                        }
                        rec.insert("witness".into(), Value::Object(w));
                        rec.insert("obtained".into(), json!(labels(obtained)));
                    }
                    Verdict::Error(msg) => {
                        rec.insert("message".into(), json!(msg));
                    }
                }
                Value::Object(rec)
            })
            .collect();
        json!({
            "model": model.name(),
            "satisfied": self.all_satisfied(),
            "axioms": records,
        })
    }
}

/// `(variable, value)` pairs of a witness, rendered with model labels.
pub fn witness_bindings(model: &FiniteModel, witness: &Valuation) -> Vec<(String, String)> {
    let sig = model.signature();
    let mut out: Vec<(String, String)> =
        witness.evars().map(|(v, e)| (sig.display_evar(v).to_string(), model.label(e).to_string())).collect();
    out.extend(witness.svars().map(|(v, s)| (sig.display_svar(v).to_string(), model.format_set(s))));
    out
}

/// Check every axiom, or only those whose label is in `filter`, in
/// declaration order. Errors are recorded per axiom.
pub fn satisfies(
    model: &FiniteModel,
    theory: &Theory,
    options: &CheckOptions,
    filter: Option<&[String]>,
) -> SatisfactionReport {
    let results = theory
        .axioms()
        .iter()
        .filter(|a| filter.is_none_or(|f| f.contains(&a.label)))
        .map(|a| AxiomResult {
            label: a.label.clone(),
            sort: a.sort,
            verdict: check_axiom(model, a, options).unwrap_or_else(|e| Verdict::Error(e.to_string())),
        })
        .collect();
    SatisfactionReport { results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{derived, Context};
    use crate::model::CarrierElem;
    use crate::semantics::eval;
    use crate::signature::Symbol;

    struct Fix {
        theory: Theory,
        model: FiniteModel,
        bool_: Sort,
        nat: Sort,
        tt: Symbol,
        ff: Symbol,
    }

    fn fix() -> Fix {
        let mut sig = Signature::new();
        let bool_ = sig.declare_sort("Bool").unwrap();
        let nat = sig.declare_sort("Nat").unwrap();
        let tt = sig.declare_symbol("true", &[], bool_).unwrap();
        let ff = sig.declare_symbol("false", &[], bool_).unwrap();
        let sig = Arc::new(sig);
        let mut b = FiniteModel::builder(sig.clone());
        b.carrier(bool_, ["t", "f"]).unwrap();
        b.carrier(nat, ["0", "1", "2", "3"]).unwrap();
        let t = b.elem(bool_, "t").unwrap();
        let f = b.elem(bool_, "f").unwrap();
        b.interp(tt, &[], CarrierSet::singleton(t, 2)).unwrap();
        b.interp(ff, &[], CarrierSet::singleton(f, 2)).unwrap();
        Fix { theory: Theory::new(sig).unwrap(), model: b.build().unwrap(), bool_, nat, tt, ff }
    }

    #[test]
    fn add_axiom_checks() {
        let mut f = fix();
        let sig = f.theory.signature().clone();
        let dom =
            derived::or(Pattern::app(&sig, f.ff, vec![]).unwrap(), Pattern::app(&sig, f.tt, vec![]).unwrap()).unwrap();
        f.theory.add_axiom("bool-domain", f.bool_, dom.clone()).unwrap();
        assert_eq!(
            f.theory.add_axiom("bool-domain", f.bool_, dom.clone()).unwrap_err(),
            TheoryError::DuplicateLabel("bool-domain".into())
        );
        let open = Pattern::bound_evar(Context::from([f.bool_]), Context::empty(), 0).unwrap();
        assert_eq!(f.theory.add_axiom("bad", f.bool_, open).unwrap_err(), TheoryError::NotClosed("bad".into()));
        assert!(matches!(f.theory.add_axiom("wrong", f.nat, dom), Err(TheoryError::SortMismatch { .. })));
        assert_eq!(f.theory.axioms().len(), 1);
        assert!(Theory::new(Arc::new(Signature::new())).is_err());
    }

    #[test]
    fn definedness_schema_instances() {
        let mut f = fix();
        f.theory.instantiate_definedness().unwrap();
        let labels: Vec<&str> = f.theory.axioms().iter().map(|a| a.label.as_str()).collect();
        assert_eq!(
            labels,
            ["definedness/Bool/Bool", "definedness/Bool/Nat", "definedness/Nat/Bool", "definedness/Nat/Nat"]
        );
        assert!(matches!(f.theory.instantiate_definedness(), Err(TheoryError::DuplicateLabel(_))));
        let report = satisfies(&f.model, &f.theory, &CheckOptions::default(), None);
        assert!(report.all_satisfied());
    }

    #[test]
    fn bottom_is_violated_with_witness() {
        let mut f = fix();
        let x = Pattern::evar(ElemVar::new("x", f.nat));
        let bot = Pattern::and(x, derived::bottom(f.nat, Context::empty(), Context::empty())).unwrap();
        f.theory.add_axiom("bot", f.nat, bot.clone()).unwrap();
        let top = derived::top(f.bool_, Context::empty(), Context::empty());
        f.theory.add_axiom("top", f.bool_, top).unwrap();
        let report = satisfies(&f.model, &f.theory, &CheckOptions::default(), None);
        assert!(!report.all_satisfied());
        let Verdict::Violated { witness, obtained } = &report.results[0].verdict else {
            panic!("expected a violation")
        };
        assert!(obtained.is_empty());
        assert_eq!(witness.evar(&ElemVar::new("x", f.nat)), Some(CarrierElem { sort: f.nat, ordinal: 0 }));
        assert_ne!(eval(&f.model, witness, &bot).unwrap(), f.model.carrier(f.nat));
        assert!(report.results[1].verdict.is_satisfied());
        let text = report.to_text(&f.model);
        assert!(text.contains("violated  bot [Nat]: obtained { }, expected { 0, 1, 2, 3 }"), "{text}");
        assert!(text.contains("witness: x:Nat = 0"), "{text}");
        let js = report.to_json(&f.model);
        assert_eq!(js["axioms"][0]["witness"]["x:Nat"], "0");
        assert_eq!(js["axioms"][1]["verdict"], "satisfied");
        assert_eq!(js["satisfied"], false);
    }

    #[test]
    fn set_variables_range_over_all_subsets() {
        // X ∨ ¬X holds for every X; X alone fails at X = ∅.
        let mut f = fix();
        let x = Pattern::svar(SetVar::new("X", f.nat));
        let lem = derived::or(x.clone(), Pattern::not(x.clone())).unwrap();
        f.theory.add_axiom("lem", f.nat, lem).unwrap();
        f.theory.add_axiom("x", f.nat, x).unwrap();
        let report = satisfies(&f.model, &f.theory, &CheckOptions::default(), None);
        assert!(report.results[0].verdict.is_satisfied());
        let Verdict::Violated { witness, .. } = &report.results[1].verdict else { panic!() };
        assert!(witness.svar(&SetVar::new("X", f.nat)).unwrap().is_empty());
    }

    #[test]
    fn state_space_cap_is_reported() {
        let mut f = fix();
        let x = Pattern::svar(SetVar::new("X", f.nat));
        let y = Pattern::svar(SetVar::new("Y", f.nat));
        f.theory.add_axiom("big", f.nat, Pattern::and(x, y).unwrap()).unwrap();
        let opts = CheckOptions { state_cap: 100, ..CheckOptions::default() };
        assert!(matches!(
            check_axiom(&f.model, &f.theory.axioms()[0], &opts),
            Err(TheoryError::StateSpaceTooLarge { .. })
        ));
        let report = satisfies(&f.model, &f.theory, &opts, None);
        assert!(matches!(report.results[0].verdict, Verdict::Error(_)));
    }

    #[test]
    fn filter_selects_axioms() {
        let mut f = fix();
        f.theory.instantiate_definedness().unwrap();
        let only = vec!["definedness/Nat/Bool".to_string()];
        let report = satisfies(&f.model, &f.theory, &CheckOptions::default(), Some(&only));
        assert_eq!(report.results.len(), 1);
        assert_eq!(report.results[0].label, "definedness/Nat/Bool");
    }
}
