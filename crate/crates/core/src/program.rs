//! Programs as left-total relations on `X₀ = X ∪ {0}` whose fail row is exactly `{(0,0)}`.

use std::fmt;
use std::sync::Arc;

use crate::error::{RelicError, Result};
use crate::relation::Relation;
use crate::space::{ElemSet, StateSpace};

/// A member of `Ltrel₀(X)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProgramRelation {
    rel: Relation,
}

impl ProgramRelation {
    pub fn new(rel: Relation) -> Result<Self> {
        if rel.is_in_ltrel0()? {
            Ok(ProgramRelation { rel })
        } else {
            Err(RelicError::Invalid(format!(
                "{rel} is not in Ltrel0: it must be left total with fail row exactly {{(0,0)}}"
            )))
        }
    }

    pub fn relation(&self) -> &Relation {
        &self.rel
    }

    pub fn into_relation(self) -> Relation {
        self.rel
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        self.rel.space()
    }

    fn fail(&self) -> usize {
        self.rel.space().fail().expect("program relations live on X0")
    }

    /// `abort = {(x,0) : x ∈ X₀}`, written `𝟘`.
    pub fn abort(space: &Arc<StateSpace>) -> Result<Self> {
        let f = space.require_fail()?;
        let rel = Relation::from_pairs(space, (0..space.size()).map(|x| (x, f)))?;
        Ok(ProgramRelation { rel })
    }

    /// `skip = 1'` on `X₀`.
    pub fn skip(space: &Arc<StateSpace>) -> Result<Self> {
        space.require_fail()?;
        Ok(ProgramRelation {
            rel: Relation::diagonal(space),
        })
    }

    /// Angelic restriction `ρ^a = ρ ∩ (X×X)`, returned over `X`.
    pub fn restrict_angelic(&self) -> Relation {
        let x = self.space().without_fail().expect("fail element is last");
        let f = self.fail();
        let mut out = Relation::empty(&x);
        for (a, b) in self.rel.pairs() {
            if a != f && b != f {
                out.insert(a, b);
            }
        }
        out
    }

    /// Demonic restriction `ρ^d`: rows of states that cannot fail, returned over `X`.
    pub fn restrict_demonic(&self) -> Relation {
        let x = self.space().without_fail().expect("fail element is last");
        let f = self.fail();
        let mut out = Relation::empty(&x);
        for a in self.space().states().iter() {
            let row = self.rel.row(a);
            if !row.contains(f) {
                for b in row.iter() {
                    out.insert(a, b);
                }
            }
        }
        out
    }

    /// Recover `ρ` from `(ρ^a, ρ^d)`. Inputs that are not the restrictions of any
    /// program are rejected.
    pub fn reconstruct(a_part: &Relation, d_part: &Relation) -> Result<Self> {
        if a_part.space() != d_part.space() {
            return Err(RelicError::SpaceMismatch("angelic and demonic parts differ in carrier".into()));
        }
        if a_part.space().fail().is_some() {
            return Err(RelicError::Invalid("restrictions live on a carrier without fail element".into()));
        }
        let x0 = a_part.space().with_fail()?;
        let f = x0.require_fail()?;
        let dd = d_part.dom();
        for x in dd.iter() {
            if d_part.row(x) != a_part.row(x) {
                return Err(RelicError::Invalid(format!(
                    "state {} is in the demonic domain but its demonic row differs from its angelic row",
                    a_part.space().name(x)
                )));
            }
        }
        let mut rel = a_part.transport(&x0)?;
        for x in a_part.space().all().iter() {
            if !dd.contains(x) {
                rel.insert(x, f);
            }
        }
        rel.insert(f, f);
        let p = ProgramRelation::new(rel)?;
        if p.restrict_angelic() != *a_part || p.restrict_demonic() != *d_part {
            return Err(RelicError::Consistency("reconstruction does not round-trip".into()));
        }
        Ok(p)
    }

    /// Sequencing `ρ ; τ` on `X₀`.
    pub fn seq(&self, t: &ProgramRelation) -> Result<Self> {
        let rel = self.rel.compose(&t.rel)?;
        debug_assert_eq!(rel.is_in_ltrel0().ok(), Some(true));
        Ok(ProgramRelation { rel })
    }

    /// Non-deterministic choice `ρ ∪ τ`.
    pub fn choice(&self, t: &ProgramRelation) -> Result<Self> {
        let rel = self.rel.union(&t.rel)?;
        debug_assert_eq!(rel.is_in_ltrel0().ok(), Some(true));
        Ok(ProgramRelation { rel })
    }

    /// `ρ ≲ τ` iff `ρ^a ⊆ τ^a`.
    pub fn quasi_partial(&self, t: &ProgramRelation) -> Result<bool> {
        self.rel.includes_in(&t.rel)?;
        self.restrict_angelic().includes_in(&t.restrict_angelic())
    }

    /// `ρ ◁ τ` iff `ρ^d ⊑ τ^d`.
    pub fn quasi_total(&self, t: &ProgramRelation) -> Result<bool> {
        self.rel.includes_in(&t.rel)?;
        self.restrict_demonic().refines_demonic(&t.restrict_demonic())
    }

    /// The approximation order, plain inclusion on `X₀`.
    pub fn approx(&self, t: &ProgramRelation) -> Result<bool> {
        self.rel.includes_in(&t.rel)
    }

    /// Every member of `Ltrel₀(X)` over `x0`, in a fixed order.
    pub fn all_over(x0: &Arc<StateSpace>) -> Result<Vec<ProgramRelation>> {
        let f = x0.require_fail()?;
        let states: Vec<usize> = x0.states().iter().collect();
        let choices = (1u64 << x0.size()) - 1;
        let total = (choices as u128).pow(states.len() as u32);
        if total > 1 << 20 {
            return Err(RelicError::Invalid("Ltrel0 too large to enumerate".into()));
        }
        let mut out = Vec::with_capacity(total as usize);
        for mut code in 0..total as u64 {
            let mut rows = vec![ElemSet::EMPTY; x0.size()];
            for &s in &states {
                rows[s] = ElemSet(code % choices + 1);
                code /= choices;
            }
            rows[f] = ElemSet::singleton(f);
            out.push(ProgramRelation {
                rel: Relation::from_rows(x0, rows)?,
            });
        }
        Ok(out)
    }
}

impl fmt::Display for ProgramRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.rel, f)
    }
}

impl fmt::Debug for ProgramRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.rel, f)
    }
}

fn require_plain(r: &Relation) -> Result<()> {
    if r.space().fail().is_some() {
        Err(RelicError::Invalid("embeddings take relations over X, without fail element".into()))
    } else {
        Ok(())
    }
}

/// `∇_r`: every state outside `dom(r)` related to every element of `X₀`.
fn nabla_outside(r: &Relation, x0: &Arc<StateSpace>) -> Result<Relation> {
    let mut out = Relation::empty(x0);
    let d = r.dom();
    for x in r.space().all().iter().filter(|&x| !d.contains(x)) {
        for y in x0.all().iter() {
            out.insert(x, y);
        }
    }
    Ok(out)
}

/// `ψ1(r) = r ∪ 𝟘`.
pub fn psi1(r: &Relation) -> Result<ProgramRelation> {
    require_plain(r)?;
    let x0 = r.space().with_fail()?;
    let rel = r.transport(&x0)?.union(ProgramRelation::abort(&x0)?.relation())?;
    ProgramRelation::new(rel)
}

/// `ψ2(r) = r ∪ ∇_r ∪ {(0,y) : y ∈ X₀}`, a total relation on `X₀`.
pub fn psi2(r: &Relation) -> Result<Relation> {
    require_plain(r)?;
    let x0 = r.space().with_fail()?;
    let f = x0.require_fail()?;
    let mut rel = r.transport(&x0)?.union(&nabla_outside(r, &x0)?)?;
    for y in x0.all().iter() {
        rel.insert(f, y);
    }
    Ok(rel)
}

/// `ψ3(r) = r ∪ ∇_r ∪ {(0,0)}`.
pub fn psi3(r: &Relation) -> Result<ProgramRelation> {
    require_plain(r)?;
    let x0 = r.space().with_fail()?;
    let f = x0.require_fail()?;
    let mut rel = r.transport(&x0)?.union(&nabla_outside(r, &x0)?)?;
    rel.insert(f, f);
    ProgramRelation::new(rel)
}

/// Inverse of [`psi2`]: `None` when `t` is not in the range of `ψ2`.
pub fn psi2_inverse(t: &Relation) -> Result<Option<Relation>> {
    let f = t.space().require_fail()?;
    let x = t.space().without_fail()?;
    let all0 = t.space().all();
    let mut r = Relation::empty(&x);
    if t.row(f) != all0 {
        return Ok(None);
    }
    for s in x.all().iter() {
        let row = t.row(s);
        if row == all0 {
            continue;
        }
        if row.contains(f) || row.is_empty() {
            return Ok(None);
        }
        for y in row.iter() {
            r.insert(s, y);
        }
    }
    debug_assert_eq!(psi2(&r).ok().as_ref(), Some(t));
    Ok(Some(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_relation, parse_space};

    fn x0(n: usize) -> Arc<StateSpace> {
        StateSpace::numbered(n, true).unwrap()
    }

    fn prog(space: &Arc<StateSpace>, lit: &str) -> ProgramRelation {
        ProgramRelation::new(parse_relation(space, lit).unwrap()).unwrap()
    }

    #[test]
    fn constants() {
        let s = x0(1);
        assert_eq!(ProgramRelation::abort(&s).unwrap().to_string(), "{(1,0),(0,0)}");
        assert_eq!(ProgramRelation::skip(&s).unwrap().to_string(), "{(1,1),(0,0)}");
        assert!(ProgramRelation::abort(&StateSpace::numbered(1, false).unwrap()).is_err());
    }

    #[test]
    fn restrictions() {
        let s = x0(1);
        let abort = ProgramRelation::abort(&s).unwrap();
        assert!(abort.restrict_angelic().is_empty() && abort.restrict_demonic().is_empty());
        let skip = ProgramRelation::skip(&s).unwrap();
        let one = Relation::diagonal(&StateSpace::numbered(1, false).unwrap());
        assert_eq!(skip.restrict_angelic(), one);
        assert_eq!(skip.restrict_demonic(), one);

        let s = x0(2);
        let rho = prog(&s, "{(1,1),(1,0),(2,2),(0,0)}");
        assert_eq!(rho.restrict_angelic().to_string(), "{(1,1),(2,2)}");
        assert_eq!(rho.restrict_demonic().to_string(), "{(2,2)}");
    }

    /// Oracle: search every program with the requested restrictions.
    fn reconstruct_by_search(a: &Relation, d: &Relation) -> Vec<ProgramRelation> {
        let x0 = a.space().with_fail().unwrap();
        ProgramRelation::all_over(&x0)
            .unwrap()
            .into_iter()
            .filter(|p| p.restrict_angelic() == *a && p.restrict_demonic() == *d)
            .collect()
    }

    #[test]
    fn reconstruct_examples() {
        let x = StateSpace::numbered(2, false).unwrap();
        let empty = Relation::empty(&x);
        assert_eq!(
            ProgramRelation::reconstruct(&empty, &empty).unwrap(),
            ProgramRelation::abort(&x.with_fail().unwrap()).unwrap()
        );
        let one = Relation::diagonal(&x);
        assert_eq!(
            ProgramRelation::reconstruct(&one, &one).unwrap(),
            ProgramRelation::skip(&x.with_fail().unwrap()).unwrap()
        );
        let a = parse_relation(&x, "{(1,1),(2,2)}").unwrap();
        let d = parse_relation(&x, "{(2,2)}").unwrap();
        let found = reconstruct_by_search(&a, &d);
        assert_eq!(found.len(), 1);
        let got = ProgramRelation::reconstruct(&a, &d).unwrap();
        assert_eq!(got, found[0]);
        assert_eq!(got.to_string(), "{(1,1),(1,0),(2,2),(0,0)}");
    }

    #[test]
    fn reconstruct_rejects_inconsistent_parts() {
        let x = StateSpace::numbered(2, false).unwrap();
        let a = parse_relation(&x, "{(1,1),(1,2)}").unwrap();
        let d = parse_relation(&x, "{(1,1)}").unwrap();
        assert!(ProgramRelation::reconstruct(&a, &d).is_err());
        assert!(reconstruct_by_search(&a, &d).is_empty());
    }

    #[test]
    fn reconstruct_round_trips_everywhere() {
        for p in ProgramRelation::all_over(&x0(2)).unwrap() {
            let back = ProgramRelation::reconstruct(&p.restrict_angelic(), &p.restrict_demonic()).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn lifted_operations() {
        let s = x0(2);
        let abort = ProgramRelation::abort(&s).unwrap();
        let skip = ProgramRelation::skip(&s).unwrap();
        let rho = prog(&s, "{(1,1),(1,0),(2,2),(2,1),(0,0)}");
        assert_eq!(abort.seq(&rho).unwrap(), abort);
        assert_eq!(skip.seq(&rho).unwrap(), rho);
        let c = skip.choice(&abort).unwrap();
        assert_eq!(c.relation(), &skip.relation().union(abort.relation()).unwrap());
        assert!(c.relation().is_in_ltrel0().unwrap());
    }

    #[test]
    fn embedding_examples() {
        let x1 = StateSpace::numbered(1, false).unwrap();
        let empty = Relation::empty(&x1);
        assert_eq!(psi1(&empty).unwrap(), ProgramRelation::abort(&x1.with_fail().unwrap()).unwrap());
        // With ∇_r ranging over X₀, ψ2(∅) is the full relation on X₀.
        let p2 = psi2(&empty).unwrap();
        assert_eq!(p2, Relation::full(&x1.with_fail().unwrap()));
        assert!(p2.classify().is_total);
        let r = Relation::diagonal(&x1);
        assert_eq!(psi3(&r).unwrap().to_string(), "{(1,1),(0,0)}");
        assert_eq!(psi2_inverse(&p2).unwrap(), Some(empty));
    }

    #[test]
    fn psi2_inverse_rejects_foreign_relations() {
        let s = parse_space("space X = {1} fail 0").unwrap();
        let t = parse_relation(&s, "{(1,1),(0,0)}").unwrap();
        assert_eq!(psi2_inverse(&t).unwrap(), None);
    }

    #[test]
    fn order_examples() {
        let s = x0(1);
        let abort = ProgramRelation::abort(&s).unwrap();
        let skip = ProgramRelation::skip(&s).unwrap();
        assert!(skip.quasi_partial(&skip).unwrap());
        assert!(skip.quasi_total(&skip).unwrap());
        assert!(skip.approx(&skip).unwrap());
        assert!(!abort.quasi_total(&skip).unwrap());

        let rho = prog(&s, "{(1,0),(1,1),(0,0)}");
        let tau = psi1(&Relation::diagonal(&StateSpace::numbered(1, false).unwrap())).unwrap();
        assert!(rho.quasi_partial(&tau).unwrap());
    }

    #[test]
    fn ltrel0_has_49_members_over_two_states() {
        assert_eq!(ProgramRelation::all_over(&x0(2)).unwrap().len(), 49);
    }
}
