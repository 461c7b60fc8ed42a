//! Finite models: a nonempty carrier per sort and, per symbol, a table from
//! argument tuples to carrier subsets. Tuples absent from a table denote the
//! empty set.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::signature::{Signature, Sort, Symbol};

/// An element of the carrier of `sort`, identified by its position in the
/// declared carrier enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CarrierElem {
    pub sort: Sort,
    pub ordinal: usize,
}

/// A subset of one sort's carrier, as a bit vector over its enumeration.
///
/// Binary operations require both operands to have the same sort.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CarrierSet {
    sort: Sort,
    bits: FixedBitSet,
}

impl CarrierSet {
    pub fn empty(sort: Sort, width: usize) -> CarrierSet {
        CarrierSet { sort, bits: FixedBitSet::with_capacity(width) }
    }

    pub fn full(sort: Sort, width: usize) -> CarrierSet {
        let mut set = CarrierSet::empty(sort, width);
        set.bits.insert_range(..);
        set
    }

    pub fn singleton(elem: CarrierElem, width: usize) -> CarrierSet {
        let mut set = CarrierSet::empty(elem.sort, width);
        set.bits.insert(elem.ordinal);
        set
    }

    pub fn from_ordinals(sort: Sort, width: usize, ordinals: impl IntoIterator<Item = usize>) -> CarrierSet {
        let mut set = CarrierSet::empty(sort, width);
        for o in ordinals {
            set.bits.insert(o);
        }
        set
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    pub fn contains(&self, elem: CarrierElem) -> bool {
        elem.sort == self.sort && self.bits.contains(elem.ordinal)
    }

    pub fn insert(&mut self, elem: CarrierElem) {
        assert_eq!(elem.sort, self.sort, "element of a different sort");
        self.bits.insert(elem.ordinal);
    }

    pub fn iter(&self) -> impl Iterator<Item = CarrierElem> + '_ {
        let sort = self.sort;
        self.bits.ones().map(move |ordinal| CarrierElem { sort, ordinal })
    }

    /// The member of a singleton set.
    pub fn only_member(&self) -> Option<CarrierElem> {
        let mut it = self.bits.ones();
        let first = it.next()?;
        it.next().is_none().then_some(CarrierElem { sort: self.sort, ordinal: first })
    }

    fn check(&self, other: &CarrierSet) {
        assert_eq!(self.sort, other.sort, "carrier sets of different sorts");
        assert_eq!(self.width(), other.width(), "carrier sets of different widths");
    }

    pub fn union(&self, other: &CarrierSet) -> CarrierSet {
        self.check(other);
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn union_with(&mut self, other: &CarrierSet) {
        self.check(other);
        self.bits.union_with(&other.bits);
    }

    pub fn intersection(&self, other: &CarrierSet) -> CarrierSet {
        self.check(other);
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &CarrierSet) -> CarrierSet {
        self.check(other);
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    /// Complement within the sort's full carrier.
    pub fn complement(&self) -> CarrierSet {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    pub fn is_subset(&self, other: &CarrierSet) -> bool {
        self.check(other);
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for CarrierSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.sort.id())?;
        f.debug_set().entries(self.bits.ones()).finish()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("carrier of sort `{0}` is empty")]
    EmptyCarrier(String),
    #[error("no carrier declared for sort `{0}`")]
    MissingCarrier(String),
    #[error("carrier of sort `{0}` is declared twice")]
    DuplicateCarrier(String),
    #[error("element `{element}` appears twice in the carrier of `{sort}`")]
    DuplicateElement { sort: String, element: String },
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{element}` is not an element of sort `{sort}`")]
    UnknownElement { sort: String, element: String },
    #[error("bad argument tuple for `{symbol}`: {reason}")]
    BadTuple { symbol: String, reason: String },
    #[error("value of `{symbol}` must be a subset of `{expected}`")]
    BadValueSort { symbol: String, expected: String },
    #[error("`{symbol}` is interpreted twice on the same tuple")]
    DuplicateInterp { symbol: String },
}

#[derive(Clone, Debug)]
pub struct FiniteModel {
    sig: Arc<Signature>,
    name: Option<String>,
    labels: Vec<Vec<Arc<str>>>,
    label_index: Vec<HashMap<Arc<str>, usize>>,
    tables: Vec<HashMap<Vec<usize>, CarrierSet>>,
}

impl FiniteModel {
    pub fn builder(sig: Arc<Signature>) -> ModelBuilder {
        ModelBuilder::new(sig)
    }

    /// Validate and assemble a model in one step.
    pub fn build(
        sig: Arc<Signature>,
        carriers: Vec<(Sort, Vec<String>)>,
        interps: Vec<(Symbol, Vec<CarrierElem>, CarrierSet)>,
    ) -> Result<FiniteModel, ModelError> {
        let mut b = ModelBuilder::new(sig);
        for (sort, labels) in carriers {
            b.carrier(sort, labels)?;
        }
        for (symbol, tuple, value) in interps {
            b.interp(symbol, &tuple, value)?;
        }
        b.build()
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn carrier_size(&self, sort: Sort) -> usize {
        self.labels[sort.id()].len()
    }

    pub fn carrier(&self, sort: Sort) -> CarrierSet {
        CarrierSet::full(sort, self.carrier_size(sort))
    }

    pub fn empty_set(&self, sort: Sort) -> CarrierSet {
        CarrierSet::empty(sort, self.carrier_size(sort))
    }

    pub fn singleton(&self, elem: CarrierElem) -> CarrierSet {
        CarrierSet::singleton(elem, self.carrier_size(elem.sort))
    }

    pub fn elems(&self, sort: Sort) -> impl Iterator<Item = CarrierElem> {
        (0..self.carrier_size(sort)).map(move |ordinal| CarrierElem { sort, ordinal })
    }

    pub fn elem(&self, sort: Sort, label: &str) -> Option<CarrierElem> {
        let ordinal = *self.label_index.get(sort.id())?.get(label)?;
        Some(CarrierElem { sort, ordinal })
    }

    pub fn label(&self, elem: CarrierElem) -> &str {
        &self.labels[elem.sort.id()][elem.ordinal]
    }

    /// Labels of a set's members in declaration order, e.g. `{ t, f }`.
    pub fn format_set(&self, set: &CarrierSet) -> String {
        let labels: Vec<&str> = set.iter().map(|e| self.label(e)).collect();
        if labels.is_empty() {
            "{ }".to_string()
        } else {
            format!("{{ {} }}", labels.join(", "))
        }
    }

    fn check_tuple(&self, symbol: Symbol, sorts: impl ExactSizeIterator<Item = Sort>) -> Result<(), ModelError> {
        check_tuple(&self.sig, symbol, sorts)
    }

    /// The stored interpretation of `symbol` at `tuple`; empty if unlisted.
    pub fn interpret_symbol(&self, symbol: Symbol, tuple: &[CarrierElem]) -> Result<CarrierSet, ModelError> {
        self.check_tuple(symbol, tuple.iter().map(|e| e.sort))?;
        Ok(self.lookup(symbol, tuple.iter().map(|e| e.ordinal).collect()))
    }

    fn lookup(&self, symbol: Symbol, key: Vec<usize>) -> CarrierSet {
        match self.tables[symbol.id()].get(&key) {
            Some(set) => set.clone(),
            None => self.empty_set(self.result_sort(symbol)),
        }
    }

    fn result_sort(&self, symbol: Symbol) -> Sort {
        self.sig.symbol_decl(symbol).expect("checked symbol").result
    }

    /// Pointwise lift of `symbol` to argument sets: the union of the
    /// interpretation over every tuple drawn from the argument sets.
    pub fn extended_app(&self, symbol: Symbol, args: &[CarrierSet]) -> Result<CarrierSet, ModelError> {
        self.check_tuple(symbol, args.iter().map(|a| a.sort()))?;
        let mut out = self.empty_set(self.result_sort(symbol));
        let members: Vec<Vec<usize>> = args.iter().map(|a| a.iter().map(|e| e.ordinal).collect()).collect();
        if members.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        let mut cursor = vec![0usize; members.len()];
        loop {
            let key: Vec<usize> = cursor.iter().zip(&members).map(|(&c, m)| m[c]).collect();
            if let Some(set) = self.tables[symbol.id()].get(&key) {
                out.union_with(set);
            }
            // Odometer step, last position fastest.
            let mut pos = members.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                cursor[pos] += 1;
                if cursor[pos] < members[pos].len() {
                    break;
                }
                cursor[pos] = 0;
            }
        }
    }

    /// Definedness: empty if `arg` is empty, the full carrier of
    /// `result_sort` otherwise.
    pub fn definedness_sem(&self, result_sort: Sort, arg: &CarrierSet) -> CarrierSet {
        if arg.is_empty() {
            self.empty_set(result_sort)
        } else {
            self.carrier(result_sort)
        }
    }

    /// Argument tuples missing from the table of `symbol`, in declaration
    /// order, up to `limit` entries.
    pub fn unlisted_tuples(&self, symbol: Symbol, limit: usize) -> Vec<Vec<CarrierElem>> {
        let Ok(decl) = self.sig.symbol_decl(symbol) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut tuple: Vec<usize> = vec![0; decl.params.len()];
        if decl.params.iter().any(|&s| self.carrier_size(s) == 0) {
            return out;
        }
        loop {
            if !self.tables[symbol.id()].contains_key(&tuple) {
                out.push(
                    tuple.iter().zip(&decl.params).map(|(&ordinal, &sort)| CarrierElem { sort, ordinal }).collect(),
                );
                if out.len() >= limit {
                    return out;
                }
            }
            let mut pos = tuple.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < self.carrier_size(decl.params[pos]) {
                    break;
                }
                tuple[pos] = 0;
            }
        }
    }
}

fn check_tuple(sig: &Signature, symbol: Symbol, sorts: impl ExactSizeIterator<Item = Sort>) -> Result<(), ModelError> {
    let decl = sig.symbol_decl(symbol).map_err(|_| ModelError::UnknownSymbol(format!("#{}", symbol.id())))?;
    if sorts.len() != decl.params.len() {
        return Err(ModelError::BadTuple {
            symbol: decl.name.to_string(),
            reason: format!("expected {} argument(s), got {}", decl.params.len(), sorts.len()),
        });
    }
    for (i, (found, &expected)) in sorts.zip(&decl.params).enumerate() {
        if found != expected {
            return Err(ModelError::BadTuple {
                symbol: decl.name.to_string(),
                reason: format!(
                    "argument {} must be of sort `{}`, not `{}`",
                    i,
                    sig.sort_name(expected),
                    sig.sort_name(found)
                ),
            });
        }
    }
    Ok(())
}

/// The element tuple of an all-singleton argument list. Vacuously the
/// empty tuple for no arguments.
pub fn singleton_fastpath(args: &[CarrierSet]) -> Option<Vec<CarrierElem>> {
    args.iter().map(CarrierSet::only_member).collect()
}

/// Incremental, validating model construction.
#[derive(Debug)]
pub struct ModelBuilder {
    sig: Arc<Signature>,
    name: Option<String>,
    labels: Vec<Option<Vec<Arc<str>>>>,
    label_index: Vec<HashMap<Arc<str>, usize>>,
    tables: Vec<HashMap<Vec<usize>, CarrierSet>>,
}

impl ModelBuilder {
    pub fn new(sig: Arc<Signature>) -> ModelBuilder {
        let sorts = sig.sort_count();
        let symbols = sig.symbol_count();
        ModelBuilder {
            sig,
            name: None,
            labels: vec![None; sorts],
            label_index: vec![HashMap::new(); sorts],
            tables: vec![HashMap::new(); symbols],
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn name(&mut self, name: impl Into<String>) {
        self.name = Some(name.into());
    }

    pub fn carrier<S: AsRef<str>>(
        &mut self,
        sort: Sort,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<(), ModelError> {
        if !self.sig.has_sort(sort) {
            return Err(ModelError::UnknownSort(format!("#{}", sort.id())));
        }
        let sort_name = self.sig.sort_name(sort).to_string();
        if self.labels[sort.id()].is_some() {
            return Err(ModelError::DuplicateCarrier(sort_name));
        }
        let mut list: Vec<Arc<str>> = Vec::new();
        let mut index = HashMap::new();
        for label in labels {
            let label: Arc<str> = label.as_ref().into();
            if index.insert(label.clone(), list.len()).is_some() {
                return Err(ModelError::DuplicateElement { sort: sort_name, element: label.to_string() });
            }
            list.push(label);
        }
        if list.is_empty() {
            return Err(ModelError::EmptyCarrier(sort_name));
        }
        self.labels[sort.id()] = Some(list);
        self.label_index[sort.id()] = index;
        Ok(())
    }

    pub fn carrier_size(&self, sort: Sort) -> Option<usize> {
        self.labels.get(sort.id())?.as_ref().map(Vec::len)
    }

    pub fn elem(&self, sort: Sort, label: &str) -> Result<CarrierElem, ModelError> {
        let unknown =
            || ModelError::UnknownElement { sort: self.sig.sort_name(sort).to_string(), element: label.to_string() };
        let ordinal = *self.label_index.get(sort.id()).ok_or_else(unknown)?.get(label).ok_or_else(unknown)?;
        Ok(CarrierElem { sort, ordinal })
    }

    /// Set `symbol(tuple) = value`. Carriers of the involved sorts must
    /// already be declared.
    pub fn interp(&mut self, symbol: Symbol, tuple: &[CarrierElem], value: CarrierSet) -> Result<(), ModelError> {
        check_tuple(&self.sig, symbol, tuple.iter().map(|e| e.sort))?;
        let decl = self.sig.symbol_decl(symbol).expect("checked symbol");
        for e in tuple {
            match self.carrier_size(e.sort) {
                Some(n) if e.ordinal < n => {}
                _ => {
                    return Err(ModelError::BadTuple {
                        symbol: decl.name.to_string(),
                        reason: format!(
                            "element #{} outside the carrier of `{}`",
                            e.ordinal,
                            self.sig.sort_name(e.sort)
                        ),
                    })
                }
            }
        }
        if value.sort() != decl.result || Some(value.width()) != self.carrier_size(decl.result) {
            return Err(ModelError::BadValueSort {
                symbol: decl.name.to_string(),
                expected: self.sig.sort_name(decl.result).to_string(),
            });
        }
        let key: Vec<usize> = tuple.iter().map(|e| e.ordinal).collect();
        if self.tables[symbol.id()].insert(key, value).is_some() {
            return Err(ModelError::DuplicateInterp { symbol: decl.name.to_string() });
        }
        Ok(())
    }

    pub fn build(self) -> Result<FiniteModel, ModelError> {
        let mut labels = Vec::with_capacity(self.labels.len());
        for (i, l) in self.labels.into_iter().enumerate() {
            let name = self.sig.sort_name(Sort::from_id(i)).to_string();
            labels.push(l.ok_or(ModelError::MissingCarrier(name))?);
        }
        Ok(FiniteModel { sig: self.sig, name: self.name, labels, label_index: self.label_index, tables: self.tables })
    }
}
