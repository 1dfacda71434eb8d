//! Finite ordered algebras with possibly partial products.
//!
//! File format, one declaration per line:
//!
//! ```text
//! elements 0 a
//! order 0<=a
//! prod 0 0 = 0
//! prod 0 a = 0
//! prod a 0 = 0
//! prod a a = a
//! zero 0
//! ```

mod check;
pub mod concrete;
mod enumerate;
mod extend;
mod parse;

use std::fmt;

use crate::error::{RelicError, Result};

pub use check::{ClassReport, ClassTag, Violation};
pub use enumerate::{enumerate_small, MAX_ENUMERATION_SIZE};
pub use extend::IdentityPolicy;
pub use parse::parse_algebra;

/// A finite carrier with a (partial) product table, a partial order and optional constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedAlgebra {
    names: Vec<String>,
    product: Vec<Option<usize>>,
    leq: Vec<u64>,
    identity: Option<usize>,
    zero: Option<usize>,
}

impl OrderedAlgebra {
    /// `product[a*n+b]` is `a·b`; `leq[a]` has bit `b` set when `a ≤ b`.
    pub fn new(
        names: Vec<String>,
        product: Vec<Option<usize>>,
        leq: Vec<u64>,
        identity: Option<usize>,
        zero: Option<usize>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 || n > 64 {
            return Err(RelicError::Invalid(format!("algebras need 1..=64 elements, got {n}")));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(RelicError::Invalid(format!("duplicate element `{a}`")));
            }
        }
        if product.len() != n * n || leq.len() != n {
            return Err(RelicError::Invalid("table dimensions do not match the carrier".into()));
        }
        if product.iter().flatten().any(|&c| c >= n) {
            return Err(RelicError::Invalid("product value out of range".into()));
        }
        for c in [identity, zero].into_iter().flatten() {
            if c >= n {
                return Err(RelicError::Invalid("constant out of range".into()));
            }
        }
        let alg = OrderedAlgebra {
            names,
            product,
            leq,
            identity,
            zero,
        };
        alg.validate_order()?;
        alg.validate_identity()?;
        Ok(alg)
    }

    fn validate_order(&self) -> Result<()> {
        let n = self.size();
        for a in 0..n {
            if self.leq[a] >> n != 0 && n < 64 {
                return Err(RelicError::Invalid("order row out of range".into()));
            }
            if !self.leq(a, a) {
                return Err(RelicError::Invalid(format!("order is not reflexive at {}", self.name(a))));
            }
            for b in 0..n {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return Err(RelicError::Invalid(format!(
                        "order is not antisymmetric: {} and {}",
                        self.name(a),
                        self.name(b)
                    )));
                }
                for c in 0..n {
                    if self.leq(a, b) && self.leq(b, c) && !self.leq(a, c) {
                        return Err(RelicError::Invalid(format!(
                            "order is not transitive: {}<={}<={} but not {}<={}",
                            self.name(a),
                            self.name(b),
                            self.name(c),
                            self.name(a),
                            self.name(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_identity(&self) -> Result<()> {
        if let Some(e) = self.identity {
            for a in 0..self.size() {
                if self.mul(e, a) != Some(a) || self.mul(a, e) != Some(a) {
                    return Err(RelicError::Invalid(format!(
                        "`{}` is not an identity: fails at {}",
                        self.name(e),
                        self.name(a)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn mul(&self, a: usize, b: usize) -> Option<usize> {
        self.product[a * self.size() + b]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a] >> b & 1 == 1
    }

    pub fn leq_rows(&self) -> &[u64] {
        &self.leq
    }

    pub fn product_table(&self) -> &[Option<usize>] {
        &self.product
    }

    pub fn identity(&self) -> Option<usize> {
        self.identity
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn is_total(&self) -> bool {
        self.product.iter().all(Option::is_some)
    }

    /// The order is equality.
    pub fn is_discrete(&self) -> bool {
        (0..self.size()).all(|a| self.leq[a] == 1 << a)
    }

    /// Least upper bound of `a` and `b`, if it exists.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let ub = self.leq[a] & self.leq[b];
        (0..self.size()).find(|&u| ub >> u & 1 == 1 && ub & !self.leq[u] == 0)
    }

    /// Relabel: element `a` becomes `perm[a]`.
    pub fn permuted(&self, perm: &[usize], names: Vec<String>) -> Result<Self> {
        let n = self.size();
        let mut product = vec![None; n * n];
        let mut leq = vec![0u64; n];
        for a in 0..n {
            for b in 0..n {
                product[perm[a] * n + perm[b]] = self.mul(a, b).map(|c| perm[c]);
                if self.leq(a, b) {
                    leq[perm[a]] |= 1 << perm[b];
                }
            }
        }
        OrderedAlgebra::new(
            names,
            product,
            leq,
            self.identity.map(|e| perm[e]),
            self.zero.map(|z| perm[z]),
        )
    }

    /// Remove one element, which must not occur as a product of the remaining ones.
    pub fn without_element(&self, x: usize) -> Result<Self> {
        let n = self.size();
        if n == 1 {
            return Err(RelicError::Invalid("cannot remove the only element".into()));
        }
        let keep: Vec<usize> = (0..n).filter(|&a| a != x).collect();
        let new_index = |a: usize| if a < x { a } else { a - 1 };
        let mut product = Vec::with_capacity((n - 1) * (n - 1));
        let mut leq = Vec::with_capacity(n - 1);
        for &a in &keep {
            let mut row = 0u64;
            for &b in &keep {
                let cell = match self.mul(a, b) {
                    Some(c) if c == x => {
                        return Err(RelicError::Invalid(format!(
                            "{}·{} = {} so the remaining elements are not closed",
                            self.name(a),
                            self.name(b),
                            self.name(x)
                        )))
                    }
                    other => other.map(new_index),
                };
                product.push(cell);
                if self.leq(a, b) {
                    row |= 1 << new_index(b);
                }
            }
            leq.push(row);
        }
        let fix = |c: Option<usize>| c.filter(|&c| c != x).map(new_index);
        OrderedAlgebra::new(
            keep.iter().map(|&a| self.names[a].clone()).collect(),
            product,
            leq,
            fix(self.identity),
            fix(self.zero),
        )
    }
}

impl fmt::Display for OrderedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.size();
        writeln!(f, "elements {}", self.names.join(" "))?;
        let pairs: Vec<String> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && self.leq(a, b))
            .map(|(a, b)| format!("{}<={}", self.name(a), self.name(b)))
            .collect();
        if !pairs.is_empty() {
            writeln!(f, "order {}", pairs.join(" "))?;
        }
        for a in 0..n {
            for b in 0..n {
                let v = self.mul(a, b).map_or("undef", |c| self.name(c));
                writeln!(f, "prod {} {} = {}", self.name(a), self.name(b), v)?;
            }
        }
        if let Some(e) = self.identity {
            writeln!(f, "identity {}", self.name(e))?;
        }
        if let Some(z) = self.zero {
            writeln!(f, "zero {}", self.name(z))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn chain2() -> OrderedAlgebra {
        parse_algebra("elements 0 a\norder 0<=a\nprod 0 0 = 0\nprod 0 a = 0\nprod a 0 = 0\nprod a a = a\nzero 0\n").unwrap()
    }

    #[test]
    fn rejects_bad_orders_and_identities() {
        let names = vec!["a".to_string(), "b".to_string()];
        let prod = vec![Some(0); 4];
        assert!(OrderedAlgebra::new(names.clone(), prod.clone(), vec![0b11, 0b11], None, None).is_err());
        assert!(OrderedAlgebra::new(names.clone(), prod.clone(), vec![0b00, 0b10], None, None).is_err());
        assert!(OrderedAlgebra::new(names.clone(), prod.clone(), vec![0b01, 0b10], Some(1), None).is_err());
        assert!(OrderedAlgebra::new(names, prod, vec![0b01, 0b10], None, None).is_ok());
    }

    #[test]
    fn joins() {
        let a = chain2();
        assert_eq!(a.join(0, 1), Some(1));
        assert_eq!(a.join(0, 0), Some(0));
    }

    #[test]
    fn remove_and_permute() {
        let a = chain2();
        let b = a.permuted(&[1, 0], vec!["a".into(), "0".into()]).unwrap();
        assert_eq!(b.zero(), Some(1));
        assert_eq!(b.mul(0, 0), Some(0));
        let c = a.without_element(0).unwrap();
        assert_eq!(c.size(), 1);
        assert_eq!(c.zero(), None);
        assert!(a.without_element(1).is_ok());
    }

    #[test]
    fn display_round_trips() {
        let a = chain2();
        assert_eq!(parse_algebra(&a.to_string()).unwrap(), a);
    }
}
