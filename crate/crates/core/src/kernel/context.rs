use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::signature::Sort;

/// Sorts of the dangling bound variables of a pattern, innermost binder
/// first: index `i` of the context is the sort of bound variable `i`.
///
/// Persistent cons list, so pushing a binder sort and taking the tail are
/// O(1) and share structure with the parent context.
#[derive(Clone, Default)]
pub struct Context(Option<Arc<Cell>>);

struct Cell {
    head: Sort,
    tail: Context,
    len: usize,
}

impl Context {
    pub fn empty() -> Context {
        Context(None)
    }

    pub fn from_sorts(sorts: &[Sort]) -> Context {
        sorts.iter().rev().fold(Context::empty(), |ctx, &s| ctx.push(s))
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |c| c.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    /// New context with `sort` at index 0.
    pub fn push(&self, sort: Sort) -> Context {
        Context(Some(Arc::new(Cell { head: sort, tail: self.clone(), len: self.len() + 1 })))
    }

    pub fn head(&self) -> Option<Sort> {
        self.0.as_ref().map(|c| c.head)
    }

    /// The context without its head; the empty context for the empty context.
    pub fn tail(&self) -> Context {
        self.0.as_ref().map_or_else(Context::empty, |c| c.tail.clone())
    }

    pub fn get(&self, index: usize) -> Option<Sort> {
        self.iter().nth(index)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter(self.0.as_deref())
    }

    pub fn to_vec(&self) -> Vec<Sort> {
        self.iter().collect()
    }

    /// Drop the first `n` entries. Panics if `n > len`.
    pub fn skip(&self, n: usize) -> Context {
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.0.as_ref().expect("skip past end of context").tail.clone();
        }
        cur
    }

    /// `self[..at] ++ inserted ++ self[at..]`. Panics if `at > len`.
    pub fn insert_at(&self, at: usize, inserted: &[Sort]) -> Context {
        let prefix: Vec<Sort> = self.iter().take(at).collect();
        assert_eq!(prefix.len(), at, "insertion point past end of context");
        let base = inserted.iter().rev().fold(self.skip(at), |ctx, &s| ctx.push(s));
        prefix.iter().rev().fold(base, |ctx, &s| ctx.push(s))
    }

    /// `self[..at] ++ self[at + 1..]`. Panics if `at >= len`.
    pub fn remove_at(&self, at: usize) -> Context {
        let prefix: Vec<Sort> = self.iter().take(at).collect();
        assert_eq!(prefix.len(), at, "removal point past end of context");
        prefix.iter().rev().fold(self.skip(at + 1), |ctx, &s| ctx.push(s))
    }

    /// Whether `self` is a suffix of `other`.
    pub fn is_suffix_of(&self, other: &Context) -> bool {
        other.len() >= self.len() && other.skip(other.len() - self.len()) == *self
    }

    fn ptr_eq(&self, other: &Context) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

pub struct Iter<'a>(Option<&'a Cell>);

impl Iterator for Iter<'_> {
    type Item = Sort;

    fn next(&mut self) -> Option<Sort> {
        let cell = self.0?;
        self.0 = cell.tail.0.as_deref();
        Some(cell.head)
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Context) -> bool {
        if self.len() != other.len() {
            return false;
        }
        // Shared tails are common, so compare cell by cell and stop at the
        // first physically shared suffix.
        let (mut a, mut b) = (self.clone(), other.clone());
        while !a.ptr_eq(&b) {
            match (&a.0, &b.0) {
                (Some(x), Some(y)) if x.head == y.head => {
                    let (na, nb) = (x.tail.clone(), y.tail.clone());
                    a = na;
                    b = nb;
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Context {}

impl Hash for Context {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len().hash(state);
        for s in self.iter() {
            s.hash(state);
        }
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter().map(|s| s.id())).finish()
    }
}

impl From<&[Sort]> for Context {
    fn from(sorts: &[Sort]) -> Context {
        Context::from_sorts(sorts)
    }
}

impl<const N: usize> From<[Sort; N]> for Context {
    fn from(sorts: [Sort; N]) -> Context {
        Context::from_sorts(&sorts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: usize) -> Sort {
        Sort::from_id(i)
    }

    #[test]
    fn indexing_and_tail() {
        let ctx = Context::from([s(0), s(1), s(2)]);
        assert_eq!(ctx.len(), 3);
        assert_eq!(ctx.get(0), Some(s(0)));
        assert_eq!(ctx.get(2), Some(s(2)));
        assert_eq!(ctx.get(3), None);
        assert_eq!(ctx.tail().to_vec(), vec![s(1), s(2)]);
        assert_eq!(ctx.push(s(5)).to_vec(), vec![s(5), s(0), s(1), s(2)]);
    }

    #[test]
    fn insert_and_remove() {
        let ctx = Context::from([s(0), s(1), s(1)]);
        assert_eq!(ctx.insert_at(2, &[s(2), s(3)]).to_vec(), vec![s(0), s(1), s(2), s(3), s(1)]);
        assert_eq!(ctx.insert_at(3, &[s(4)]).to_vec(), vec![s(0), s(1), s(1), s(4)]);
        assert_eq!(ctx.insert_at(1, &[]), ctx);
        assert_eq!(ctx.remove_at(0).to_vec(), vec![s(1), s(1)]);
        assert_eq!(ctx.remove_at(2).to_vec(), vec![s(0), s(1)]);
    }

    #[test]
    fn suffixes() {
        let ctx = Context::from([s(0), s(1), s(2)]);
        assert!(Context::empty().is_suffix_of(&ctx));
        assert!(Context::from([s(1), s(2)]).is_suffix_of(&ctx));
        assert!(ctx.is_suffix_of(&ctx));
        assert!(!Context::from([s(0), s(1)]).is_suffix_of(&ctx));
        assert!(!ctx.push(s(0)).is_suffix_of(&ctx));
    }

    #[test]
    fn structural_equality_ignores_sharing() {
        let a = Context::from([s(0), s(1)]);
        let b = Context::from([s(0), s(1)]);
        assert_eq!(a, b);
        assert_ne!(a, Context::from([s(1), s(0)]));
    }
}
