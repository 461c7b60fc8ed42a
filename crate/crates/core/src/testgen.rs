//! Random well-formed signatures, models, patterns and valuations.
//!
//! Everything here is driven by a caller-supplied RNG, so a seeded
//! `StdRng` gives reproducible test corpora.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kernel::{Context, Pattern};
use crate::model::{CarrierElem, CarrierSet, FiniteModel};
use crate::semantics::Valuation;
use crate::signature::{ElemVar, SetVar, Signature, Sort, Symbol};

pub const EVAR_NAMES: &[&str] = &["x", "y", "z"];
pub const SVAR_NAMES: &[&str] = &["X", "Y"];

/// Signature with sorts `S0..` and symbols `f0..` of arity at most
/// `max_arity`. Every sort gets at least one constant.
pub fn gen_signature<R: Rng>(rng: &mut R, max_sorts: usize, max_symbols: usize, max_arity: usize) -> Signature {
    let mut sig = Signature::new();
    let n = rng.gen_range(1..=max_sorts.max(1));
    let sorts: Vec<Sort> = (0..n).map(|i| sig.declare_sort(&format!("S{i}")).expect("fresh sort")).collect();
    for (i, &s) in sorts.iter().enumerate() {
        sig.declare_symbol(&format!("c{i}"), &[], s).expect("fresh symbol");
    }
    for i in 0..rng.gen_range(0..=max_symbols) {
        let arity = rng.gen_range(1..=max_arity.max(1));
        let params: Vec<Sort> = (0..arity).map(|_| *sorts.choose(rng).expect("a sort")).collect();
        let result = *sorts.choose(rng).expect("a sort");
        sig.declare_symbol(&format!("f{i}"), &params, result).expect("fresh symbol");
    }
    sig
}

/// Random subset of a carrier of `width` elements.
pub fn gen_set<R: Rng>(rng: &mut R, sort: Sort, width: usize) -> CarrierSet {
    match rng.gen_range(0..4) {
        0 => CarrierSet::empty(sort, width),
        1 => CarrierSet::singleton(CarrierElem { sort, ordinal: rng.gen_range(0..width) }, width),
        _ => CarrierSet::from_ordinals(sort, width, (0..width).filter(|_| rng.gen_bool(0.5))),
    }
}

/// Model with carriers of 1..=`max_carrier` elements labeled `e0..` and a
/// random value for every argument tuple, some of them left unlisted.
pub fn gen_model<R: Rng>(rng: &mut R, sig: Arc<Signature>, max_carrier: usize) -> FiniteModel {
    let mut b = FiniteModel::builder(sig.clone());
    for s in sig.sorts() {
        let n = rng.gen_range(1..=max_carrier.max(1));
        b.carrier(s, (0..n).map(|i| format!("e{i}"))).expect("fresh carrier");
    }
    for (sym, decl) in sig.symbols() {
        let sizes: Vec<usize> = decl.params.iter().map(|&s| b.carrier_size(s).expect("declared")).collect();
        let width = b.carrier_size(decl.result).expect("declared");
        let mut tuple = vec![0usize; sizes.len()];
        loop {
            if rng.gen_bool(0.85) {
                let elems: Vec<CarrierElem> =
                    tuple.iter().zip(&decl.params).map(|(&ordinal, &sort)| CarrierElem { sort, ordinal }).collect();
                let value = gen_set(rng, decl.result, width);
                b.interp(sym, &elems, value).expect("well-sorted tuple");
            }
            if !advance(&mut tuple, &sizes) {
                break;
            }
        }
    }
    b.build().expect("all carriers declared")
}

/// Odometer step; false once every tuple has been visited.
fn advance(tuple: &mut [usize], sizes: &[usize]) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < sizes[i] {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

/// Pattern generator parameters.
#[derive(Clone, Copy, Debug)]
pub struct PatternGen {
    /// Upper bound on `Pattern::size`, provided every sort has a constant
    /// or free variables are enabled.
    pub max_size: usize,
    /// Allow free element and set variables.
    pub free_vars: bool,
    /// Only emit set-variable occurrences under an even number of
    /// negations counted from their binder.
    pub positive: bool,
    /// Largest number of `\exists`/`\mu` binders on any root-to-leaf path.
    /// Evaluation cost grows exponentially in it.
    pub max_binder_depth: usize,
}

impl Default for PatternGen {
    fn default() -> PatternGen {
        PatternGen { max_size: 30, free_vars: true, positive: false, max_binder_depth: 3 }
    }
}

struct State<'a> {
    sig: &'a Signature,
    cfg: PatternGen,
    /// Negation parity per set binder, innermost last.
    parity: Vec<bool>,
    binders: usize,
}

impl PatternGen {
    /// A pattern of sort `sort` valid in `ex`/`mu` with size at most
    /// `max_size`. Outer set binders in `mu` count as positive.
    pub fn generate<R: Rng>(&self, rng: &mut R, sig: &Signature, ex: &Context, mu: &Context, sort: Sort) -> Pattern {
        let mut st = State { sig, cfg: *self, parity: vec![false; mu.len()], binders: 0 };
        let budget = rng.gen_range(1..=self.max_size.max(1));
        st.gen(rng, ex, mu, sort, budget)
    }
}

impl State<'_> {
    fn leaf<R: Rng>(&self, rng: &mut R, ex: &Context, mu: &Context, sort: Sort) -> Option<Pattern> {
        let mut options: Vec<Pattern> = Vec::new();
        if self.cfg.free_vars {
            let x = *EVAR_NAMES.choose(rng).expect("names");
            options.push(Pattern::free_evar(ElemVar::new(x, sort), ex.clone(), mu.clone()));
            let x = *SVAR_NAMES.choose(rng).expect("names");
            options.push(Pattern::free_svar(SetVar::new(x, sort), ex.clone(), mu.clone()));
        }
        for (i, s) in ex.iter().enumerate() {
            if s == sort {
                options.push(Pattern::bound_evar(ex.clone(), mu.clone(), i).expect("in scope"));
            }
        }
        for (i, s) in mu.iter().enumerate() {
            let even = !self.parity[self.parity.len() - 1 - i];
            if s == sort && (even || !self.cfg.positive) {
                // Weight set variables up so fixpoints are not vacuous.
                for _ in 0..2 {
                    options.push(Pattern::bound_svar(ex.clone(), mu.clone(), i).expect("in scope"));
                }
            }
        }
        for (sym, decl) in self.sig.symbols() {
            if decl.params.is_empty() && decl.result == sort {
                options.push(Pattern::app_in(self.sig, sym, vec![], ex.clone(), mu.clone()).expect("constant"));
            }
        }
        options.choose(rng).cloned()
    }

    fn gen<R: Rng>(&mut self, rng: &mut R, ex: &Context, mu: &Context, sort: Sort, budget: usize) -> Pattern {
        if budget <= 1 || rng.gen_bool(0.15) {
            if let Some(p) = self.leaf(rng, ex, mu, sort) {
                return p;
            }
        }
        let apps: Vec<Symbol> = self
            .sig
            .symbols()
            .filter(|(_, d)| d.result == sort && !d.params.is_empty() && d.params.len() < budget)
            .map(|(s, _)| s)
            .collect();
        let bind = self.binders < self.cfg.max_binder_depth;
        loop {
            let choice = rng.gen_range(0..7);
            match choice {
                0 if budget >= 2 => {
                    for p in self.parity.iter_mut() {
                        *p = !*p;
                    }
                    let b = self.gen(rng, ex, mu, sort, budget - 1);
                    for p in self.parity.iter_mut() {
                        *p = !*p;
                    }
                    return Pattern::not(b);
                }
                1 if budget >= 3 => {
                    let left = rng.gen_range(1..budget - 1);
                    let l = self.gen(rng, ex, mu, sort, left);
                    let r = self.gen(rng, ex, mu, sort, budget - 1 - left);
                    return Pattern::and(l, r).expect("same sort and contexts");
                }
                2 if budget >= 2 && bind => {
                    let s = self.random_sort(rng);
                    self.binders += 1;
                    let b = self.gen(rng, &ex.push(s), mu, sort, budget - 1);
                    self.binders -= 1;
                    return Pattern::exists(s, b).expect("binder matches body");
                }
                3 if budget >= 2 && bind => {
                    self.parity.push(false);
                    self.binders += 1;
                    let b = self.gen(rng, ex, &mu.push(sort), sort, budget - 1);
                    self.binders -= 1;
                    self.parity.pop();
                    return Pattern::mu_binder(b).expect("binder matches body");
                }
                4 if budget >= 2 => {
                    let s = self.random_sort(rng);
                    let b = self.gen(rng, ex, mu, s, budget - 1);
                    return Pattern::defined(sort, b);
                }
                5 | 6 if !apps.is_empty() => {
                    let sym = *apps.choose(rng).expect("nonempty");
                    let params = self.sig.symbol_decl(sym).expect("known").params.clone();
                    let mut rest = budget - 1 - params.len();
                    let mut args = Vec::with_capacity(params.len());
                    for &ps in &params {
                        let extra = if rest > 0 { rng.gen_range(0..=rest) } else { 0 };
                        rest -= extra;
                        args.push(self.gen(rng, ex, mu, ps, 1 + extra));
                    }
                    return Pattern::app_in(self.sig, sym, args, ex.clone(), mu.clone()).expect("well-sorted");
                }
                _ if budget <= 1 => {
                    // No leaf of this sort exists without free variables:
                    // fall back to the smallest closed pattern of `sort`.
                    return Pattern::not(Pattern::exists(sort, self.top_body(ex, mu, sort)).expect("binder matches"));
                }
                _ => {}
            }
        }
    }

    fn top_body(&self, ex: &Context, mu: &Context, sort: Sort) -> Pattern {
        Pattern::bound_evar(ex.push(sort), mu.clone(), 0).expect("fresh binder")
    }

    fn random_sort<R: Rng>(&self, rng: &mut R) -> Sort {
        let n = self.sig.sort_count();
        Sort::from_id(rng.gen_range(0..n))
    }
}

/// Random values for every free variable of `p`.
pub fn gen_valuation<R: Rng>(rng: &mut R, model: &FiniteModel, p: &Pattern) -> Valuation {
    let (evars, svars) = p.free_vars();
    let mut rho = Valuation::new();
    for x in evars {
        let ordinal = rng.gen_range(0..model.carrier_size(x.sort));
        rho.set_evar(&x, CarrierElem { sort: x.sort, ordinal }).expect("sorted value");
    }
    for x in svars {
        let set = gen_set(rng, x.sort, model.carrier_size(x.sort));
        rho.set_svar(&x, set).expect("sorted value");
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_mu_positivity;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_patterns_are_valid_and_bounded() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let sig = gen_signature(&mut rng, 3, 4, 3);
            let sort = Sort::from_id(rng.gen_range(0..sig.sort_count()));
            let cfg = PatternGen { free_vars: rng.gen_bool(0.5), positive: rng.gen_bool(0.5), ..PatternGen::default() };
            let p = cfg.generate(&mut rng, &sig, &Context::empty(), &Context::empty(), sort);
            p.validate(&sig).unwrap();
            assert!(p.size() <= 30, "{}", p.size());
            assert_eq!(p.sort(), sort);
            assert!(p.is_closed());
            if cfg.positive {
                assert!(check_mu_positivity(&p).is_positive());
            }
        }
    }

    #[test]
    fn generated_models_are_total_on_carriers() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let sig = Arc::new(gen_signature(&mut rng, 3, 4, 3));
            let m = gen_model(&mut rng, sig.clone(), 4);
            for s in sig.sorts() {
                assert!((1..=4).contains(&m.carrier_size(s)));
            }
        }
    }
}
