//! Sorts, many-sorted symbols and variables.
//!
//! A [`Signature`] interns sorts and symbols to dense integer handles in
//! declaration order. Signatures are append-only: patterns, models and
//! theories hold handles into them, so nothing is ever removed.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Handle of a declared sort. The id equals the declaration position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(u32);

impl Sort {
    pub fn id(self) -> usize {
        self.0 as usize
    }

    /// Build a handle from a raw id. The handle is only meaningful for a
    /// signature that declared at least `id + 1` sorts.
    pub fn from_id(id: usize) -> Sort {
        Sort(id as u32)
    }
}

/// Handle of a declared symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u32);

impl Symbol {
    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub fn from_id(id: usize) -> Symbol {
        Symbol(id as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: Arc<str>,
    pub params: Vec<Sort>,
    pub result: Sort,
}

/// An element variable. Identity is the `(name, sort)` pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemVar {
    pub name: Arc<str>,
    pub sort: Sort,
}

/// A set variable. Identity is the `(name, sort)` pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetVar {
    pub name: Arc<str>,
    pub sort: Sort,
}

impl ElemVar {
    pub fn new(name: impl Into<Arc<str>>, sort: Sort) -> ElemVar {
        ElemVar { name: name.into(), sort }
    }
}

impl SetVar {
    pub fn new(name: impl Into<Arc<str>>, sort: Sort) -> SetVar {
        SetVar { name: name.into(), sort }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("sort name must not be empty")]
    EmptyName,
    #[error("sort `{0}` is already declared")]
    DuplicateSort(String),
    #[error("symbol `{0}` is already declared")]
    DuplicateSymbol(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

#[derive(Clone, Debug, Default)]
pub struct Signature {
    sorts: Vec<Arc<str>>,
    sort_index: HashMap<Arc<str>, Sort>,
    symbols: Vec<SymbolDecl>,
    symbol_index: HashMap<Arc<str>, Symbol>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare_sort(&mut self, name: &str) -> Result<Sort, SignatureError> {
        if name.is_empty() {
            return Err(SignatureError::EmptyName);
        }
        if self.sort_index.contains_key(name) {
            return Err(SignatureError::DuplicateSort(name.to_string()));
        }
        let sort = Sort(self.sorts.len() as u32);
        let name: Arc<str> = name.into();
        self.sorts.push(name.clone());
        self.sort_index.insert(name, sort);
        Ok(sort)
    }

    pub fn declare_symbol(&mut self, name: &str, params: &[Sort], result: Sort) -> Result<Symbol, SignatureError> {
        if name.is_empty() {
            return Err(SignatureError::EmptyName);
        }
        if self.symbol_index.contains_key(name) {
            return Err(SignatureError::DuplicateSymbol(name.to_string()));
        }
        for &s in params.iter().chain(std::iter::once(&result)) {
            if !self.has_sort(s) {
                return Err(SignatureError::UnknownSort(format!("#{}", s.id())));
            }
        }
        let symbol = Symbol(self.symbols.len() as u32);
        let name: Arc<str> = name.into();
        self.symbols.push(SymbolDecl { name: name.clone(), params: params.to_vec(), result });
        self.symbol_index.insert(name, symbol);
        Ok(symbol)
    }

    /// Declared parameter sorts and result sort of `symbol`.
    pub fn symbol_signature(&self, symbol: Symbol) -> Result<(&[Sort], Sort), SignatureError> {
        let decl = self.symbol_decl(symbol)?;
        Ok((&decl.params, decl.result))
    }

    pub fn symbol_decl(&self, symbol: Symbol) -> Result<&SymbolDecl, SignatureError> {
        self.symbols.get(symbol.id()).ok_or_else(|| SignatureError::UnknownSymbol(format!("#{}", symbol.id())))
    }

    pub fn has_sort(&self, sort: Sort) -> bool {
        sort.id() < self.sorts.len()
    }

    pub fn sort(&self, name: &str) -> Option<Sort> {
        self.sort_index.get(name).copied()
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.symbol_index.get(name).copied()
    }

    /// Name of a sort, or `?<id>` for a handle foreign to this signature.
    pub fn sort_name(&self, sort: Sort) -> &str {
        self.sorts.get(sort.id()).map(|s| &**s).unwrap_or("?")
    }

    pub fn symbol_name(&self, symbol: Symbol) -> &str {
        self.symbols.get(symbol.id()).map(|d| &*d.name).unwrap_or("?")
    }

    pub fn sorts(&self) -> impl ExactSizeIterator<Item = Sort> + '_ {
        (0..self.sorts.len()).map(|i| Sort(i as u32))
    }

    pub fn symbols(&self) -> impl ExactSizeIterator<Item = (Symbol, &SymbolDecl)> + '_ {
        self.symbols.iter().enumerate().map(|(i, d)| (Symbol(i as u32), d))
    }

    pub fn sort_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn display_evar<'a>(&'a self, var: &'a ElemVar) -> impl fmt::Display + 'a {
        DisplayVar { sig: self, prefix: "", name: &var.name, sort: var.sort }
    }

    pub fn display_svar<'a>(&'a self, var: &'a SetVar) -> impl fmt::Display + 'a {
        DisplayVar { sig: self, prefix: "#", name: &var.name, sort: var.sort }
    }
}

struct DisplayVar<'a> {
    sig: &'a Signature,
    prefix: &'static str,
    name: &'a str,
    sort: Sort,
}

impl fmt::Display for DisplayVar<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}:{}", self.prefix, self.name, self.sig.sort_name(self.sort))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat_bool() -> (Signature, Sort, Sort) {
        let mut sig = Signature::new();
        let nat = sig.declare_sort("Nat").unwrap();
        let bool_ = sig.declare_sort("Bool").unwrap();
        (sig, nat, bool_)
    }

    #[test]
    fn sort_ids_follow_declaration_order() {
        let (sig, nat, bool_) = nat_bool();
        assert_eq!(nat.id(), 0);
        assert_eq!(bool_.id(), 1);
        assert_eq!(sig.sort("Nat"), Some(nat));
        assert_eq!(sig.sort_name(bool_), "Bool");
    }

    #[test]
    fn duplicate_and_empty_sorts_rejected() {
        let (mut sig, _, _) = nat_bool();
        assert_eq!(sig.declare_sort("Nat"), Err(SignatureError::DuplicateSort("Nat".into())));
        assert_eq!(sig.declare_sort(""), Err(SignatureError::EmptyName));
        assert_eq!(sig.sort_count(), 2);
    }

    #[test]
    fn symbol_signature_round_trips() {
        let (mut sig, nat, bool_) = nat_bool();
        let is_zero = sig.declare_symbol("isZero", &[nat], bool_).unwrap();
        let zero = sig.declare_symbol("O", &[], nat).unwrap();
        assert_eq!(sig.symbol_signature(is_zero).unwrap(), (&[nat][..], bool_));
        assert_eq!(sig.symbol_signature(zero).unwrap(), (&[][..], nat));
        assert!(matches!(sig.symbol_signature(Symbol::from_id(9)), Err(SignatureError::UnknownSymbol(_))));
        assert_eq!(sig.declare_symbol("O", &[], bool_), Err(SignatureError::DuplicateSymbol("O".into())));
    }

    #[test]
    fn symbols_over_undeclared_sorts_rejected() {
        let (mut sig, nat, _) = nat_bool();
        let bogus = Sort::from_id(7);
        assert!(matches!(sig.declare_symbol("f", &[bogus], nat), Err(SignatureError::UnknownSort(_))));
        assert!(matches!(sig.declare_symbol("g", &[], bogus), Err(SignatureError::UnknownSort(_))));
        assert_eq!(sig.symbol_count(), 0);
    }

    #[test]
    fn variables_are_sorted() {
        let (_, nat, bool_) = nat_bool();
        assert_ne!(ElemVar::new("x", nat), ElemVar::new("x", bool_));
        assert_eq!(ElemVar::new("x", nat), ElemVar::new("x", nat));
    }
}
