//! Concrete relational representations of finite ordered algebras, and a checker that
//! a map from an algebra to relations is an embedding for a given signature.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{ClassTag, IdentityPolicy, OrderedAlgebra};
use crate::error::{RelicError, Result};
use crate::program::{psi2_inverse, ProgramRelation};
use crate::relation::Relation;
use crate::space::StateSpace;

/// Name of the extra base point of the pre-constellation representation.
pub const EXTRA_POINT: &str = "e";

/// Symbols a representation may preserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Symbol {
    /// `;`
    Angelic,
    /// `∗`
    Demonic,
    /// `·`
    Constellation,
    /// `∪`, matched against joins in the algebra's order.
    Union,
    /// `⊔⊔`, matched against joins in the algebra's order.
    DemonicJoin,
    /// `⊆`
    Inclusion,
    /// `⊑`
    Refinement,
    /// `1'` mapped to the diagonal.
    Identity,
    /// The zero mapped to `∅`.
    ZeroEmpty,
    /// The zero mapped to `∇`.
    ZeroFull,
    /// The zero mapped to `𝟘`.
    ZeroAbort,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Angelic => ";",
            Symbol::Demonic => "*",
            Symbol::Constellation => ".",
            Symbol::Union => "cup",
            Symbol::DemonicJoin => "dj",
            Symbol::Inclusion => "<=",
            Symbol::Refinement => "ref<=",
            Symbol::Identity => "1'",
            Symbol::ZeroEmpty => "0=empty",
            Symbol::ZeroFull => "0=nabla",
            Symbol::ZeroAbort => "0=abort",
        })
    }
}

/// A map from the elements of `source` to relations on `base`.
#[derive(Debug, Clone)]
pub struct Representation {
    pub source: OrderedAlgebra,
    pub base: Arc<StateSpace>,
    pub images: Vec<Relation>,
    pub signature: Vec<Symbol>,
}

impl Representation {
    pub fn image(&self, a: usize) -> &Relation {
        &self.images[a]
    }

    /// The base declaration followed by one `name = {...}` line per element.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.base);
        for (a, r) in self.images.iter().enumerate() {
            out.push_str(&format!("{} = {}\n", self.source.name(a), r));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EmbeddingViolation {
    pub check: String,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub violations: Vec<EmbeddingViolation>,
}

impl EmbeddingReport {
    pub fn is_embedding(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render(&self, alg: &OrderedAlgebra) -> String {
        if self.is_embedding() {
            return "embedding verified\n".into();
        }
        let mut out = String::from("not an embedding\n");
        for v in &self.violations {
            let w: Vec<&str> = v.witness.iter().map(|&i| alg.name(i)).collect();
            out.push_str(&format!("  {} at ({})\n", v.check, w.join(", ")));
        }
        out
    }
}

fn require_class(alg: &OrderedAlgebra, tag: ClassTag) -> Result<()> {
    let report = alg.check_class(tag);
    if report.is_member() {
        Ok(())
    } else {
        Err(RelicError::Invalid(format!("algebra is not in class {tag}:\n{}", report.render(alg))))
    }
}

/// `{(x,y) : y ≤ x·s}` over the elements of `ext` listed in `order`.
fn down_image(ext: &OrderedAlgebra, order: &[usize], base: &Arc<StateSpace>, s: usize) -> Result<Relation> {
    let mut r = Relation::empty(base);
    for (i, &x) in order.iter().enumerate() {
        let Some(xs) = ext.mul(x, s) else { continue };
        for (j, &y) in order.iter().enumerate() {
            if ext.leq(y, xs) {
                r.insert(i, j);
            }
        }
    }
    Ok(r)
}

fn space_of(ext: &OrderedAlgebra, order: &[usize], fail_last: bool) -> Result<Arc<StateSpace>> {
    let names: Vec<String> = order.iter().map(|&i| ext.name(i).to_string()).collect();
    let fail = fail_last.then(|| names.len() - 1);
    StateSpace::new(names, fail)
}

/// `a ↦ ρ_a = {(x,y) : y ≤ x·a}`. A monoid is represented over itself; otherwise an
/// isolated identity is adjoined first and the base is `A^{1'}`.
pub fn zareckii(alg: &OrderedAlgebra) -> Result<Representation> {
    require_class(alg, ClassTag::OrderedSemigroup)?;
    let ext = match alg.identity() {
        Some(_) => alg.clone(),
        None => alg.adjoin_identity(IdentityPolicy::Isolated)?,
    };
    let order: Vec<usize> = (0..ext.size()).collect();
    let base = space_of(&ext, &order, false)?;
    let images = (0..alg.size())
        .map(|a| down_image(&ext, &order, &base, a))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(images.iter().all(|r| r.classify().is_left_total));
    Ok(Representation {
        source: alg.clone(),
        base,
        images,
        signature: vec![Symbol::Angelic, Symbol::Inclusion],
    })
}

/// Elements of `ext` with the zero moved to the end.
fn zero_last(ext: &OrderedAlgebra, z: usize) -> Vec<usize> {
    (0..ext.size()).filter(|&i| i != z).chain(std::iter::once(z)).collect()
}

fn ltrel0_images(alg: &OrderedAlgebra, policy: IdentityPolicy) -> Result<(Arc<StateSpace>, Vec<Relation>)> {
    let z = alg.zero().ok_or(RelicError::Invalid("a zero must be declared".into()))?;
    let ext = alg.adjoin_identity(policy)?;
    let order = zero_last(&ext, z);
    let base = space_of(&ext, &order, true)?;
    let images = (0..alg.size())
        .map(|a| down_image(&ext, &order, &base, a))
        .collect::<Result<Vec<_>>>()?;
    for r in &images {
        if !r.is_in_ltrel0()? {
            return Err(RelicError::Consistency(format!("{r} is not in Ltrel0")));
        }
    }
    Ok((base, images))
}

/// Ordered semigroups with weak zero inside `(Ltrel₀(X), ;, 𝟘, ⊆)`, with the algebra's own
/// zero as the fail element.
pub fn represent_weak_zero(alg: &OrderedAlgebra) -> Result<Representation> {
    require_class(alg, ClassTag::WeakZero)?;
    let (base, images) = ltrel0_images(alg, IdentityPolicy::Isolated)?;
    Ok(Representation {
        source: alg.clone(),
        base,
        images,
        signature: vec![Symbol::Angelic, Symbol::Inclusion, Symbol::ZeroAbort],
    })
}

/// Ordered semigroups with zero inside `(Rel(X), ;, ∅, ⊆)`: the weak-zero construction with
/// `0 < 1'`, followed by angelic restriction.
pub fn represent_zero_angelic(alg: &OrderedAlgebra) -> Result<Representation> {
    require_class(alg, ClassTag::Zero)?;
    let (_, images) = ltrel0_images(alg, IdentityPolicy::AboveZero)?;
    let images = images
        .into_iter()
        .map(|r| Ok(ProgramRelation::new(r)?.restrict_angelic()))
        .collect::<Result<Vec<_>>>()?;
    let base = images[0].space().clone();
    Ok(Representation {
        source: alg.clone(),
        base,
        images,
        signature: vec![Symbol::Angelic, Symbol::Inclusion, Symbol::ZeroEmpty],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualZeroMode {
    /// Total relations under `;` and `⊆`, zero as `∇`.
    TotalAngelic,
    /// Relations under `∗` and `⊑`, zero as `∅`.
    Demonic,
}

/// Dual ordered semigroups with zero, as total relations or, through `ψ2⁻¹`, demonically.
pub fn represent_dual_zero(alg: &OrderedAlgebra, mode: DualZeroMode) -> Result<Representation> {
    require_class(alg, ClassTag::DualZero)?;
    let z = alg.zero().expect("checked by the class");
    let ext = alg.adjoin_identity(IdentityPolicy::BelowZero)?;
    let order = zero_last(&ext, z);
    match mode {
        DualZeroMode::TotalAngelic => {
            let base = space_of(&ext, &order, false)?;
            let images = (0..alg.size())
                .map(|a| down_image(&ext, &order, &base, a))
                .collect::<Result<Vec<_>>>()?;
            debug_assert!(images.iter().all(|r| r.classify().is_total));
            Ok(Representation {
                source: alg.clone(),
                base,
                images,
                signature: vec![Symbol::Angelic, Symbol::Inclusion, Symbol::ZeroFull],
            })
        }
        DualZeroMode::Demonic => {
            let x = space_of(&ext, &order[..order.len() - 1], false)?;
            let x0 = x.with_fail()?;
            let mut images = Vec::with_capacity(alg.size());
            for a in 0..alg.size() {
                let total = down_image(&ext, &order, &x0, a)?;
                let r = psi2_inverse(&total)?.ok_or_else(|| {
                    RelicError::Consistency(format!("image of {} is not in the range of psi2", alg.name(a)))
                })?;
                images.push(r);
            }
            Ok(Representation {
                source: alg.clone(),
                base: x,
                images,
                signature: vec![Symbol::Demonic, Symbol::Refinement, Symbol::ZeroEmpty],
            })
        }
    }
}

/// Ordered pre-constellations on `P ∪ {e}`:
/// `ρ_p = {(x,y) : x·p defined, y ≤ x·p} ∪ {(e,y) : y ≤ p}`.
/// With a declared zero, the zero is stripped, the rest represented, and `0 ↦ ∅`.
pub fn represent_preconstellation(alg: &OrderedAlgebra) -> Result<Representation> {
    if let Some(z) = alg.zero() {
        require_class(alg, ClassTag::PreconstellationZero)?;
        let (base, rest) = if alg.size() == 1 {
            (StateSpace::new([EXTRA_POINT], None)?, Vec::new())
        } else {
            let q = alg.strip_zero()?;
            let rep = represent_preconstellation(&q)?;
            (rep.base, rep.images)
        };
        let mut rest = rest.into_iter();
        let images = (0..alg.size())
            .map(|a| if a == z { Relation::empty(&base) } else { rest.next().expect("one image per element") })
            .collect();
        return Ok(Representation {
            source: alg.clone(),
            base,
            images,
            signature: vec![Symbol::Constellation, Symbol::Inclusion, Symbol::ZeroEmpty],
        });
    }
    require_class(alg, ClassTag::OrderedPreconstellation)?;
    if alg.index_of(EXTRA_POINT).is_some() {
        return Err(RelicError::Invalid(format!("element name `{EXTRA_POINT}` is reserved for the extra base point")));
    }
    let n = alg.size();
    let mut names: Vec<String> = alg.names().to_vec();
    names.push(EXTRA_POINT.into());
    let base = StateSpace::new(names, None)?;
    let order: Vec<usize> = (0..n).collect();
    let mut images = Vec::with_capacity(n);
    for p in 0..n {
        let mut r = down_image(alg, &order, &base, p)?;
        for y in (0..n).filter(|&y| alg.leq(y, p)) {
            r.insert(n, y);
        }
        images.push(r);
    }
    Ok(Representation {
        source: alg.clone(),
        base,
        images,
        signature: vec![Symbol::Constellation, Symbol::Inclusion],
    })
}

fn binary_checks(rep: &Representation, a: usize, out: &mut Vec<EmbeddingViolation>) -> Result<()> {
    let alg = &rep.source;
    let n = alg.size();
    let ra = &rep.images[a];
    let mut push = |check: String, w: Vec<usize>| out.push(EmbeddingViolation { check, witness: w });
    for b in 0..n {
        let rb = &rep.images[b];
        if a < b && ra == rb {
            push("injective".into(), vec![a, b]);
        }
        for &sym in &rep.signature {
            match sym {
                Symbol::Angelic | Symbol::Demonic => {
                    let got = if sym == Symbol::Angelic { ra.compose(rb)? } else { ra.compose_demonic(rb)? };
                    match alg.mul(a, b) {
                        Some(c) if rep.images[c] == got => {}
                        Some(_) => push(format!("preserves {sym}"), vec![a, b]),
                        None => push(format!("{sym} defined"), vec![a, b]),
                    }
                }
                Symbol::Constellation => match (alg.mul(a, b), ra.product_constellation(rb)?) {
                    (Some(c), Some(got)) if rep.images[c] == got => {}
                    (Some(_), Some(_)) => push("preserves .".into(), vec![a, b]),
                    (Some(_), None) | (None, Some(_)) => push("definedness of .".into(), vec![a, b]),
                    (None, None) => {}
                },
                Symbol::Union | Symbol::DemonicJoin => {
                    let got = if sym == Symbol::Union { ra.union(rb)? } else { ra.join_demonic(rb)? };
                    match alg.join(a, b) {
                        Some(c) if rep.images[c] == got => {}
                        _ => push(format!("preserves {sym}"), vec![a, b]),
                    }
                }
                Symbol::Inclusion | Symbol::Refinement => {
                    let got = if sym == Symbol::Inclusion { ra.includes_in(rb)? } else { ra.refines_demonic(rb)? };
                    if got != alg.leq(a, b) {
                        let what = if got { "reflects" } else { "preserves" };
                        push(format!("{what} {sym}"), vec![a, b]);
                    }
                }
                _ => {}
            }
        }
    }
    Ok(())
}

/// Check injectivity, every operation and order in the signature on all pairs, and the
/// images of constants.
pub fn verify_embedding(rep: &Representation) -> Result<EmbeddingReport> {
    let alg = &rep.source;
    let n = alg.size();
    if rep.images.len() != n {
        return Err(RelicError::Invalid("one image per element is required".into()));
    }
    let mut violations = Vec::new();
    for (a, r) in rep.images.iter().enumerate() {
        if r.space() != &rep.base && **r.space() != *rep.base {
            violations.push(EmbeddingViolation {
                check: "image lives on the base".into(),
                witness: vec![a],
            });
        }
    }
    if !violations.is_empty() {
        return Ok(EmbeddingReport { violations });
    }
    let per_row: Vec<Result<Vec<EmbeddingViolation>>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            binary_checks(rep, a, &mut out)?;
            Ok(out)
        })
        .collect();
    for row in per_row {
        violations.extend(row?);
    }
    for &sym in &rep.signature {
        let (constant, expected) = match sym {
            Symbol::Identity => (alg.identity(), Some(Relation::diagonal(&rep.base))),
            Symbol::ZeroEmpty => (alg.zero(), Some(Relation::empty(&rep.base))),
            Symbol::ZeroFull => (alg.zero(), Some(Relation::full(&rep.base))),
            Symbol::ZeroAbort => (
                alg.zero(),
                ProgramRelation::abort(&rep.base).ok().map(ProgramRelation::into_relation),
            ),
            _ => continue,
        };
        match (constant, expected) {
            (Some(c), Some(e)) if rep.images[c] == e => {}
            (Some(c), _) => violations.push(EmbeddingViolation {
                check: format!("constant {sym}"),
                witness: vec![c],
            }),
            (None, _) => violations.push(EmbeddingViolation {
                check: format!("constant {sym} declared"),
                witness: vec![],
            }),
        }
    }
    violations.sort();
    Ok(EmbeddingReport { violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_small, parse_algebra};
    use crate::program::psi2;

    fn monoid_1a() -> OrderedAlgebra {
        parse_algebra("elements 1' a\nprod 1' 1' = 1'\nprod 1' a = a\nprod a 1' = a\nprod a a = a\nidentity 1'\n").unwrap()
    }

    fn chain2() -> OrderedAlgebra {
        parse_algebra("elements 0 a\norder 0<=a\nprod 0 0 = 0\nprod 0 a = 0\nprod a 0 = 0\nprod a a = a\nzero 0\n").unwrap()
    }

    fn dual_chain2() -> OrderedAlgebra {
        parse_algebra("elements a 0\norder a<=0\nprod 0 0 = 0\nprod 0 a = 0\nprod a 0 = 0\nprod a a = a\nzero 0\n").unwrap()
    }

    #[test]
    fn zareckii_on_a_two_element_monoid() {
        let rep = zareckii(&monoid_1a()).unwrap();
        assert_eq!(rep.image(1).to_string(), "{(1',a),(a,a)}");
        assert_eq!(rep.image(0).to_string(), "{(1',1'),(a,a)}");
        let ra = rep.image(1);
        assert_eq!(&ra.compose(ra).unwrap(), ra);
        assert!(verify_embedding(&rep).unwrap().is_embedding());
        assert_eq!(rep.render(), "space X = {1',a}\n1' = {(1',1'),(a,a)}\na = {(1',a),(a,a)}\n");
    }

    #[test]
    fn zareckii_one_point() {
        let one = parse_algebra("elements u\nprod u u = u\nidentity u\n").unwrap();
        let rep = zareckii(&one).unwrap();
        assert_eq!(rep.image(0), &Relation::diagonal(&rep.base));
    }

    #[test]
    fn weak_zero_chain() {
        let rep = represent_weak_zero(&chain2()).unwrap();
        assert_eq!(rep.base.to_string(), "space X = {a,1'} fail 0");
        assert_eq!(rep.image(0), ProgramRelation::abort(&rep.base).unwrap().relation());
        assert!(verify_embedding(&rep).unwrap().is_embedding());
    }

    #[test]
    fn zero_chain() {
        let rep = represent_zero_angelic(&chain2()).unwrap();
        assert!(rep.image(0).is_empty());
        assert!(verify_embedding(&rep).unwrap().is_embedding());
    }

    #[test]
    fn dual_zero_modes() {
        let total = represent_dual_zero(&dual_chain2(), DualZeroMode::TotalAngelic).unwrap();
        assert_eq!(total.base.size(), 3);
        assert_eq!(total.image(1), &Relation::full(&total.base));
        assert!(verify_embedding(&total).unwrap().is_embedding());

        let dem = represent_dual_zero(&dual_chain2(), DualZeroMode::Demonic).unwrap();
        assert!(dem.image(1).is_empty());
        for r in &dem.images {
            assert!(r.refines_demonic(dem.image(1)).unwrap());
        }
        assert!(verify_embedding(&dem).unwrap().is_embedding());
        for (d, t) in dem.images.iter().zip(&total.images) {
            let back = psi2(d).unwrap();
            assert_eq!(back, t.transport(back.space()).unwrap());
        }
    }

    /// a·b = b, everything else undefined except the idempotents a·a = a and c·c = c:
    /// realized by {(1,1)}, {(1,2)}, {(2,2)}.
    fn brandt() -> OrderedAlgebra {
        let mut text = String::from("elements a b c\n");
        let table = [("a", "a", "a"), ("a", "b", "b"), ("b", "c", "b"), ("c", "c", "c")];
        for x in ["a", "b", "c"] {
            for y in ["a", "b", "c"] {
                let v = table.iter().find(|t| t.0 == x && t.1 == y).map_or("undef", |t| t.2);
                text.push_str(&format!("prod {x} {y} = {v}\n"));
            }
        }
        parse_algebra(&text).unwrap()
    }

    #[test]
    fn preconstellation_definedness_agrees() {
        let alg = brandt();
        assert!(alg.check_class(ClassTag::OrderedPreconstellation).is_member());
        let rep = represent_preconstellation(&alg).unwrap();
        for a in 0..3 {
            assert!(rep.image(a).is_functional());
            for b in 0..3 {
                let defined = rep.image(a).product_constellation(rep.image(b)).unwrap().is_some();
                assert_eq!(defined, alg.mul(a, b).is_some(), "{a} {b}");
            }
        }
        assert!(verify_embedding(&rep).unwrap().is_embedding());
    }

    #[test]
    fn preconstellation_zero_variant() {
        let p0 = brandt().adjoin_constellation_zero().unwrap();
        let rep = represent_preconstellation(&p0).unwrap();
        assert!(rep.image(3).is_empty());
        assert!(verify_embedding(&rep).unwrap().is_embedding());
    }

    #[test]
    fn total_preconstellation_recovers_left_totality() {
        for alg in enumerate_small(ClassTag::OrderedSemigroup, 2).unwrap() {
            let rep = represent_preconstellation(&alg).unwrap();
            assert!(verify_embedding(&rep).unwrap().is_embedding());
            let n = alg.size();
            for r in &rep.images {
                assert!((0..n).all(|x| !r.row(x).is_empty()));
            }
        }
    }

    #[test]
    fn corrupted_map_is_caught() {
        let mut rep = zareckii(&chain2()).unwrap();
        rep.images.swap(0, 1);
        let report = verify_embedding(&rep).unwrap();
        assert!(!report.is_embedding());
        rep.images[1] = rep.images[0].clone();
        let report = verify_embedding(&rep).unwrap();
        assert!(report.violations.iter().any(|v| v.check == "injective"));
    }

    #[test]
    fn class_failures_are_errors() {
        assert!(represent_dual_zero(&chain2(), DualZeroMode::Demonic).is_err());
        assert!(represent_weak_zero(&dual_chain2()).is_err());
    }
}
