use std::sync::Arc;

use mucheck_core::kernel::structural_eq;
use mucheck_core::semantics::FreshNameSource;
use mucheck_core::subst::{bevar_subst, extend_env, fevar_subst};
use mucheck_core::testgen::{gen_model, gen_set, gen_signature, gen_valuation, PatternGen};
use mucheck_core::{
    check_axiom, parse_pattern, print_pattern, CarrierElem, CheckOptions, Context, ElemVar, EvalOptions, Evaluator,
    FiniteModel, LfpMode, Pattern, SetVar, Signature, Sort, SplitPoint, Theory, Verdict,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Case {
    sig: Arc<Signature>,
    rng: StdRng,
}

fn case(seed: u64) -> Case {
    let mut rng = StdRng::seed_from_u64(seed);
    let sig = Arc::new(gen_signature(&mut rng, 3, 4, 3));
    Case { sig, rng }
}

impl Case {
    fn sort(&mut self) -> Sort {
        Sort::from_id(self.rng.gen_range(0..self.sig.sort_count()))
    }

    fn context(&mut self, max: usize) -> Context {
        let n = self.rng.gen_range(0..=max);
        let sorts: Vec<Sort> = (0..n).map(|_| self.sort()).collect();
        Context::from_sorts(&sorts)
    }

    fn pattern(&mut self, ex: &Context, mu: &Context, sort: Sort) -> Pattern {
        PatternGen::default().generate(&mut self.rng, &self.sig, ex, mu, sort)
    }

    fn closed(&mut self) -> Pattern {
        let s = self.sort();
        self.pattern(&Context::empty(), &Context::empty(), s)
    }

    fn model(&mut self) -> FiniteModel {
        gen_model(&mut self.rng, self.sig.clone(), 4)
    }
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 256, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn generated_patterns_validate(seed in any::<u64>()) {
        let mut c = case(seed);
        let ex = c.context(3);
        let mu = c.context(2);
        let s = c.sort();
        let p = c.pattern(&ex, &mu, s);
        prop_assert!(p.validate(&c.sig).is_ok());
        prop_assert_eq!(p.sort(), s);
        prop_assert_eq!(p.ex(), &ex);
        prop_assert_eq!(p.mu(), &mu);
        for child in p.children() {
            prop_assert!(child.size() < p.size());
        }
    }

    #[test]
    fn structural_eq_is_an_equivalence(seed in any::<u64>()) {
        let mut c = case(seed);
        let p = c.closed();
        let q = c.closed();
        prop_assert!(structural_eq(&p, &p));
        prop_assert_eq!(structural_eq(&p, &q), structural_eq(&q, &p));
        let reparsed = parse_pattern(&print_pattern(&c.sig, &p), &c.sig, p.ex(), p.mu()).unwrap().value;
        prop_assert!(structural_eq(&p, &reparsed));
        prop_assert!(structural_eq(&reparsed, &p));
    }

    #[test]
    fn weakening_preserves_size_and_validity(seed in any::<u64>()) {
        let mut c = case(seed);
        let ex = c.context(3);
        let mu = c.context(2);
        let s = c.sort();
        let p = c.pattern(&ex, &mu, s);
        let ex_split = c.rng.gen_range(0..=ex.len());
        let mu_split = c.rng.gen_range(0..=mu.len());
        let ins_ex = c.context(2).to_vec();
        let ins_mu = c.context(2).to_vec();
        let q = extend_env(&p, SplitPoint(ex_split), &ins_ex, SplitPoint(mu_split), &ins_mu).unwrap();
        prop_assert_eq!(q.size(), p.size());
        prop_assert_eq!(q.sort(), p.sort());
        prop_assert!(q.validate(&c.sig).is_ok());
        prop_assert_eq!(q.ex(), &ex.insert_at(ex_split, &ins_ex));
        prop_assert_eq!(q.mu(), &mu.insert_at(mu_split, &ins_mu));
        prop_assert_eq!(p.free_vars(), q.free_vars());
    }

    #[test]
    fn substituting_into_an_unused_slot_restores_the_pattern(seed in any::<u64>()) {
        let mut c = case(seed);
        let ex = c.context(3);
        let mu = c.context(2);
        let s = c.sort();
        let p = c.pattern(&ex, &mu, s);
        let split = c.rng.gen_range(0..=ex.len());
        let slot = c.sort();
        let weak = extend_env(&p, SplitPoint(split), &[slot], SplitPoint(0), &[]).unwrap();
        let psi = c.pattern(&ex.skip(split), &mu, slot);
        let back = bevar_subst(&psi, &weak, SplitPoint(split)).unwrap();
        prop_assert!(structural_eq(&back, &p));
    }

    #[test]
    fn free_variable_replacement_preserves_size(seed in any::<u64>()) {
        let mut c = case(seed);
        let mut ex = c.context(3);
        if ex.is_empty() {
            ex = ex.push(c.sort());
        }
        let mu = c.context(2);
        let s = c.sort();
        let p = c.pattern(&ex, &mu, s);
        let split = c.rng.gen_range(0..ex.len());
        let slot = ex.get(split).unwrap();
        let psi = Pattern::free_evar(ElemVar::new("fresh", slot), ex.skip(split + 1), mu.clone());
        let q = bevar_subst(&psi, &p, SplitPoint(split)).unwrap();
        prop_assert_eq!(q.size(), p.size());
        prop_assert!(q.validate(&c.sig).is_ok());
        prop_assert_eq!(q.ex(), &ex.remove_at(split));
    }

    #[test]
    fn free_substitution_of_a_variable_by_itself_is_identity(seed in any::<u64>()) {
        let mut c = case(seed);
        let ex = c.context(3);
        let mu = c.context(2);
        let s = c.sort();
        let p = c.pattern(&ex, &mu, s);
        for x in p.free_vars().0 {
            let q = fevar_subst(&Pattern::evar(x.clone()), &x, &p).unwrap();
            prop_assert!(structural_eq(&p, &q));
        }
        let fresh = ElemVar::new("unused", s);
        let q = fevar_subst(&c.pattern(&Context::empty(), &Context::empty(), s), &fresh, &p).unwrap();
        prop_assert!(structural_eq(&p, &q));
    }

    #[test]
    fn evaluation_only_sees_free_variables(seed in any::<u64>()) {
        let mut c = case(seed);
        let m = c.model();
        let p = c.closed();
        let rho = gen_valuation(&mut c.rng, &m, &p);
        let mut padded = rho.clone();
        for s in c.sig.sorts() {
            padded.set_evar(&ElemVar::new("unrelated", s), CarrierElem { sort: s, ordinal: 0 }).unwrap();
            let set = gen_set(&mut c.rng, s, m.carrier_size(s));
            padded.set_svar(&SetVar::new("Unrelated", s), set).unwrap();
        }
        let opts = EvalOptions { lfp: LfpMode::Prefix, ..EvalOptions::default() };
        let a = Evaluator::new(&m, opts).eval(&rho, &p).unwrap();
        let b = Evaluator::new(&m, opts).eval(&padded, &p).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.sort(), p.sort());
        prop_assert_eq!(a.width(), m.carrier_size(p.sort()));
    }

    #[test]
    fn fresh_names_do_not_affect_results(seed in any::<u64>(), start in 0u64..1000) {
        let mut c = case(seed);
        let m = c.model();
        let p = c.closed();
        let rho = gen_valuation(&mut c.rng, &m, &p);
        let opts = EvalOptions { lfp: LfpMode::Prefix, ..EvalOptions::default() };
        let a = Evaluator::new(&m, opts).eval(&rho, &p).unwrap();
        let b = Evaluator::with_fresh(&m, opts, FreshNameSource::starting_at(start)).eval(&rho, &p).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn extended_application_is_monotone(seed in any::<u64>()) {
        let mut c = case(seed);
        let m = c.model();
        for (sym, decl) in c.sig.symbols() {
            let small: Vec<_> = decl.params.iter().map(|&s| gen_set(&mut c.rng, s, m.carrier_size(s))).collect();
            let large: Vec<_> = small
                .iter()
                .map(|a| a.union(&gen_set(&mut c.rng, a.sort(), a.width())))
                .collect();
            let lo = m.extended_app(sym, &small).unwrap();
            let hi = m.extended_app(sym, &large).unwrap();
            prop_assert!(lo.is_subset(&hi));
        }
    }

    #[test]
    fn carrier_set_algebra(seed in any::<u64>(), width in 1usize..70) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = Sort::from_id(0);
        let a = gen_set(&mut rng, s, width);
        let b = gen_set(&mut rng, s, width);
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersection(&b.complement()));
        prop_assert_eq!(a.intersection(&b).complement(), a.complement().union(&b.complement()));
        prop_assert_eq!(a.difference(&b), a.intersection(&b.complement()));
        prop_assert!(a.intersection(&b).is_subset(&a));
        prop_assert!(a.is_subset(&a.union(&b)));
        prop_assert_eq!(a.union(&a.complement()).len(), width);
        prop_assert!(a.intersection(&a.complement()).is_empty());
    }

    #[test]
    fn witnesses_reproduce_violations(seed in any::<u64>()) {
        let mut c = case(seed);
        let m = c.model();
        let s = c.sort();
        let gen = PatternGen { max_size: 12, ..PatternGen::default() };
        let p = gen.generate(&mut c.rng, &c.sig, &Context::empty(), &Context::empty(), s);
        let mut t = Theory::new(c.sig.clone()).unwrap();
        t.add_axiom("a", s, p.clone()).unwrap();
        let opts = CheckOptions { eval: EvalOptions { lfp: LfpMode::Prefix, ..EvalOptions::default() }, state_cap: 4096 };
        if let Ok(Verdict::Violated { witness, obtained }) = check_axiom(&m, &t.axioms()[0], &opts) {
            let again = Evaluator::new(&m, opts.eval).eval(&witness, &p).unwrap();
            prop_assert_eq!(&again, &obtained);
            prop_assert!(!again.is_full());
        }
    }

    #[test]
    fn parser_is_total(text in "[a-zA-Z0-9_ \\\\{}()\\[\\],:#=>'\n-]{0,80}") {
        let mut sig = Signature::new();
        let s = sig.declare_sort("S").unwrap();
        sig.declare_symbol("f", &[s], s).unwrap();
        let _ = parse_pattern(&text, &sig, &Context::empty(), &Context::empty());
        let _ = mucheck_core::parse_theory(&text);
    }
}

#[test]
fn deep_nesting_up_to_the_limit_parses() {
    let mut sig = Signature::new();
    let s = sig.declare_sort("S").unwrap();
    sig.declare_symbol("c", &[], s).unwrap();
    let text = format!("{}c(){}", "\\not(".repeat(150), ")".repeat(150));
    let p = parse_pattern(&text, &sig, &Context::empty(), &Context::empty()).unwrap().value;
    assert_eq!(p.size(), 151);
    assert_eq!(print_pattern(&sig, &p), text);
}
