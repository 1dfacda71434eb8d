use std::fmt;
use std::str::FromStr;

use crate::error::{RelicError, Result};

use super::{ClassTag, OrderedAlgebra};

/// Name given to an adjoined identity.
pub const IDENTITY_NAME: &str = "1'";
/// Name given to an adjoined zero.
pub const ZERO_NAME: &str = "0";

/// How an adjoined identity is placed in the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdentityPolicy {
    /// `1'` is comparable only to itself.
    #[default]
    Isolated,
    /// `0 < 1'`, and everything below `0` is below `1'`.
    AboveZero,
    /// `1' < 0`, and everything above `0` is above `1'`.
    BelowZero,
}

impl fmt::Display for IdentityPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentityPolicy::Isolated => "isolated",
            IdentityPolicy::AboveZero => "above_zero",
            IdentityPolicy::BelowZero => "below_zero",
        })
    }
}

impl FromStr for IdentityPolicy {
    type Err = RelicError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isolated" => Ok(IdentityPolicy::Isolated),
            "above_zero" => Ok(IdentityPolicy::AboveZero),
            "below_zero" => Ok(IdentityPolicy::BelowZero),
            _ => Err(RelicError::UnknownName(format!("identity policy `{s}`"))),
        }
    }
}

fn fresh_name(alg: &OrderedAlgebra, name: &str) -> Result<String> {
    if alg.index_of(name).is_some() {
        Err(RelicError::Invalid(format!("element name `{name}` is reserved for an adjoined element")))
    } else {
        Ok(name.to_string())
    }
}

/// Grow the carrier by one element (the new last index) with the given table entries.
fn extend_by_one(
    alg: &OrderedAlgebra,
    name: String,
    new_cell: impl Fn(usize, usize) -> Option<usize>,
    new_leq: impl Fn(usize, usize) -> bool,
    identity: Option<usize>,
    zero: Option<usize>,
) -> Result<OrderedAlgebra> {
    let n = alg.size();
    let m = n + 1;
    let mut names = alg.names().to_vec();
    names.push(name);
    let mut product = Vec::with_capacity(m * m);
    let mut leq = vec![0u64; m];
    for (a, row) in leq.iter_mut().enumerate() {
        for b in 0..m {
            product.push(if a < n && b < n { alg.mul(a, b) } else { new_cell(a, b) });
            let le = if a < n && b < n { alg.leq(a, b) } else { new_leq(a, b) };
            if le {
                *row |= 1 << b;
            }
        }
    }
    OrderedAlgebra::new(names, product, leq, identity, zero)
}

impl OrderedAlgebra {
    /// `A^{1'}`: a fresh identity placed by `policy`, validated for compatibility.
    pub fn adjoin_identity(&self, policy: IdentityPolicy) -> Result<OrderedAlgebra> {
        let report = self.check_class(ClassTag::OrderedSemigroup);
        if let Some(v) = report.violations.first() {
            let w: Vec<&str> = v.witness.iter().map(|&i| self.name(i)).collect();
            return Err(RelicError::Invalid(format!(
                "adjoining an identity needs an ordered semigroup; {} fails at ({})",
                v.law,
                w.join(", ")
            )));
        }
        let name = fresh_name(self, IDENTITY_NAME)?;
        let e = self.size();
        let z = match policy {
            IdentityPolicy::Isolated => None,
            _ => Some(self.zero().ok_or_else(|| {
                RelicError::Invalid(format!("policy {policy} needs a declared zero"))
            })?),
        };
        let out = extend_by_one(
            self,
            name,
            |a, b| Some(if a == e { b } else { a }),
            |a, b| {
                a == b
                    || match (policy, z) {
                        (IdentityPolicy::AboveZero, Some(z)) => b == e && self.leq(a, z),
                        (IdentityPolicy::BelowZero, Some(z)) => a == e && self.leq(z, b),
                        _ => false,
                    }
            },
            Some(e),
            self.zero(),
        )?;
        out.check_compatible(e)?;
        Ok(out)
    }

    /// The compatibility conditions `a≥1' ⇒ (ab≥b ∧ ba≥b)` and `a≤1' ⇒ (ab≤b ∧ ba≤b)`.
    fn check_compatible(&self, e: usize) -> Result<()> {
        let n = self.size();
        for a in 0..n {
            for b in 0..n {
                let (ab, ba) = (self.mul(a, b).unwrap(), self.mul(b, a).unwrap());
                if self.leq(e, a) && !(self.leq(b, ab) && self.leq(b, ba)) {
                    return Err(RelicError::Invalid(format!(
                        "incompatible identity: {} >= 1' but not ({}·{} >= {} and {}·{} >= {})",
                        self.name(a),
                        self.name(a),
                        self.name(b),
                        self.name(b),
                        self.name(b),
                        self.name(a),
                        self.name(b)
                    )));
                }
                if self.leq(a, e) && !(self.leq(ab, b) && self.leq(ba, b)) {
                    return Err(RelicError::Invalid(format!(
                        "incompatible identity: {} <= 1' but not ({}·{} <= {} and {}·{} <= {})",
                        self.name(a),
                        self.name(a),
                        self.name(b),
                        self.name(b),
                        self.name(b),
                        self.name(a),
                        self.name(b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Adjoin a fresh absorbing `0` below every element.
    pub fn adjoin_zero(&self) -> Result<OrderedAlgebra> {
        let name = fresh_name(self, ZERO_NAME)?;
        let z = self.size();
        extend_by_one(
            self,
            name,
            |_, _| Some(z),
            |a, b| a == z || a == b,
            self.identity(),
            Some(z),
        )
    }

    /// `P⁰`: a fresh least `0` with `0·s = 0` for every `s` and `s·0` undefined for `s ≠ 0`.
    pub fn adjoin_constellation_zero(&self) -> Result<OrderedAlgebra> {
        let name = fresh_name(self, ZERO_NAME)?;
        let z = self.size();
        extend_by_one(
            self,
            name,
            |a, _| if a == z { Some(z) } else { None },
            |a, b| a == z || a == b,
            None,
            Some(z),
        )
    }

    /// Inverse of [`OrderedAlgebra::adjoin_constellation_zero`].
    pub fn strip_zero(&self) -> Result<OrderedAlgebra> {
        let z = self.zero().ok_or(RelicError::Invalid("no zero to strip".into()))?;
        self.without_element(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_algebra;

    fn chain2() -> OrderedAlgebra {
        parse_algebra("elements 0 a\norder 0<=a\nprod 0 0 = 0\nprod 0 a = 0\nprod a 0 = 0\nprod a a = a\nzero 0\n").unwrap()
    }

    #[test]
    fn isolated_identity() {
        let a = chain2().adjoin_identity(IdentityPolicy::Isolated).unwrap();
        assert_eq!(a.size(), 3);
        assert_eq!(a.identity(), Some(2));
        assert!(a.check_class(ClassTag::OrderedSemigroup).is_member());
        assert!(!a.leq(0, 2) && !a.leq(2, 1));
    }

    #[test]
    fn identity_above_zero() {
        let a = chain2().adjoin_identity(IdentityPolicy::AboveZero).unwrap();
        assert!(a.leq(0, 2));
        assert!(!a.leq(1, 2) && !a.leq(2, 1));
        assert!(a.check_class(ClassTag::OrderedSemigroup).is_member());
    }

    #[test]
    fn identity_below_zero_rejects_incompatible() {
        // With 1' < 0 and 0 least, 0 >= 1' needs 0·a >= a, which fails for a.
        match chain2().adjoin_identity(IdentityPolicy::BelowZero) {
            Err(RelicError::Invalid(msg)) => assert!(msg.contains("0·a >= a"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let dual = parse_algebra("elements a 0\norder a<=0\nprod 0 0 = 0\nprod 0 a = 0\nprod a 0 = 0\nprod a a = a\nzero 0\n").unwrap();
        let ext = dual.adjoin_identity(IdentityPolicy::BelowZero).unwrap();
        assert!(ext.leq(2, 1));
        assert!(ext.check_class(ClassTag::OrderedSemigroup).is_member());
    }

    #[test]
    fn zero_adjunction() {
        let one = parse_algebra("elements e\nprod e e = e\nidentity e\n").unwrap();
        let z = one.adjoin_zero().unwrap();
        assert!(z.check_class(ClassTag::Zero).is_member());
        assert!(z.check_class(ClassTag::WeakZero).is_member());
        assert_eq!(z.mul(0, 0), Some(0));
        assert!(z.leq(1, 0));
    }

    #[test]
    fn constellation_zero_round_trip() {
        let p = parse_algebra("elements a b\nprod a a = a\nprod a b = undef\nprod b a = undef\nprod b b = b\n").unwrap();
        let p0 = p.adjoin_constellation_zero().unwrap();
        let r = p0.check_class(ClassTag::PreconstellationZero);
        assert!(r.is_member(), "{}", r.render(&p0));
        assert_eq!(p0.strip_zero().unwrap(), p);
    }

    #[test]
    fn reserved_names() {
        assert!(chain2().adjoin_zero().is_err());
    }
}
