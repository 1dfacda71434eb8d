use std::fmt;
use std::sync::Arc;

use crate::error::{RelicError, Result};

/// Largest carrier the bit-row representation supports.
pub const MAX_SPACE: usize = 64;

/// Name reserved for the fail element when a space is extended.
pub const FAIL_NAME: &str = "0";

/// A finite carrier, optionally containing a distinguished fail element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSpace {
    names: Vec<String>,
    fail: Option<usize>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, fail: Option<usize>) -> Result<Arc<Self>> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(RelicError::Invalid("a state space needs at least one element".into()));
        }
        if names.len() > MAX_SPACE {
            return Err(RelicError::Invalid(format!(
                "state spaces are limited to {MAX_SPACE} elements, got {}",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(RelicError::Invalid(format!("duplicate element name `{n}`")));
            }
        }
        if let Some(f) = fail {
            if f >= names.len() {
                return Err(RelicError::Invalid(format!("fail index {f} out of range")));
            }
        }
        Ok(Arc::new(StateSpace { names, fail }))
    }

    /// The carrier `{1, ..., n}`, optionally followed by the fail element `0`.
    pub fn numbered(n: usize, with_fail: bool) -> Result<Arc<Self>> {
        let mut names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let fail = if with_fail {
            names.push(FAIL_NAME.to_string());
            Some(n)
        } else {
            None
        };
        StateSpace::new(names, fail)
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn fail(&self) -> Option<usize> {
        self.fail
    }

    pub fn require_fail(&self) -> Result<usize> {
        self.fail.ok_or(RelicError::MissingFail)
    }

    /// Every element.
    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.size())
    }

    /// The proper states, i.e. every element except the fail element.
    pub fn states(&self) -> ElemSet {
        let mut s = self.all();
        if let Some(f) = self.fail {
            s.remove(f);
        }
        s
    }

    /// `X₀`: this space with a fresh fail element named `0` appended.
    pub fn with_fail(&self) -> Result<Arc<Self>> {
        if self.fail.is_some() {
            return Err(RelicError::Invalid("space already has a fail element".into()));
        }
        if self.index_of(FAIL_NAME).is_some() {
            return Err(RelicError::Invalid(format!(
                "element name `{FAIL_NAME}` is reserved for the fail element"
            )));
        }
        let mut names = self.names.clone();
        names.push(FAIL_NAME.to_string());
        StateSpace::new(names, Some(self.size()))
    }

    /// `X`: drop the fail element. Indices of the remaining elements are unchanged
    /// when the fail element is last, which every constructor here guarantees.
    pub fn without_fail(&self) -> Result<Arc<Self>> {
        let f = self.require_fail()?;
        if f != self.size() - 1 {
            return Err(RelicError::Invalid("fail element must be the last element".into()));
        }
        StateSpace::new(self.names[..f].to_vec(), None)
    }

    pub fn format_set(&self, set: ElemSet) -> String {
        let parts: Vec<&str> = set.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let proper: Vec<&str> = (0..self.size())
            .filter(|&i| Some(i) != self.fail)
            .map(|i| self.name(i))
            .collect();
        write!(f, "space X = {{{}}}", proper.join(","))?;
        if let Some(i) = self.fail {
            write!(f, " fail {}", self.name(i))?;
        }
        Ok(())
    }
}

pub(crate) fn same_space(a: &Arc<StateSpace>, b: &Arc<StateSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(RelicError::SpaceMismatch(format!("`{a}` vs `{b}`")))
    }
}

/// A subset of a carrier with at most [`MAX_SPACE`] elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElemSet(pub u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        ElemSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & other.0)
    }

    pub fn difference(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names_and_bad_fail() {
        assert!(StateSpace::new(["a", "a"], None).is_err());
        assert!(StateSpace::new(["a"], Some(1)).is_err());
        assert!(StateSpace::new(Vec::<String>::new(), None).is_err());
    }

    #[test]
    fn fail_extension_round_trips() {
        let x = StateSpace::numbered(2, false).unwrap();
        let x0 = x.with_fail().unwrap();
        assert_eq!(x0.size(), 3);
        assert_eq!(x0.fail(), Some(2));
        assert_eq!(x0.name(2), "0");
        assert_eq!(*x0.without_fail().unwrap(), *x);
        let clash = StateSpace::new(["0", "1"], None).unwrap();
        assert!(clash.with_fail().is_err());
    }

    #[test]
    fn elem_set_basics() {
        let s: ElemSet = [0, 3, 5].into_iter().collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 5]);
        assert_eq!(s.len(), 3);
        assert!(ElemSet::singleton(3).is_subset(s));
        assert_eq!(ElemSet::full(64).len(), 64);
    }

    #[test]
    fn display_puts_fail_clause_last() {
        let x0 = StateSpace::numbered(3, true).unwrap();
        assert_eq!(x0.to_string(), "space X = {1,2,3} fail 0");
    }
}
