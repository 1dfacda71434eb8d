//! Concrete relation algebras materialized as finite tables.

use std::sync::Arc;

use crate::error::Result;
use crate::program::ProgramRelation;
use crate::relation::Relation;
use crate::space::StateSpace;

use super::OrderedAlgebra;

/// A table together with the relation each element stands for.
#[derive(Debug, Clone)]
pub struct ConcreteAlgebra {
    pub algebra: OrderedAlgebra,
    pub elements: Vec<Relation>,
}

type Op = dyn Fn(&Relation, &Relation) -> Result<Option<Relation>>;
type Le = dyn Fn(&Relation, &Relation) -> Result<bool>;

fn materialize(elements: Vec<Relation>, op: &Op, le: &Le, identity: Option<Relation>, zero: Option<Relation>) -> Result<ConcreteAlgebra> {
    let n = elements.len();
    let index = |r: &Relation| elements.iter().position(|e| e == r);
    let mut product = Vec::with_capacity(n * n);
    let mut leq = vec![0u64; n];
    for (a, ra) in elements.iter().enumerate() {
        for (b, rb) in elements.iter().enumerate() {
            let cell = match op(ra, rb)? {
                Some(r) => Some(index(&r).ok_or_else(|| {
                    crate::error::RelicError::Consistency(format!("{ra} and {rb} leave the carrier"))
                })?),
                None => None,
            };
            product.push(cell);
            if le(ra, rb)? {
                leq[a] |= 1 << b;
            }
        }
    }
    let names = (0..n).map(|i| format!("r{i}")).collect();
    let algebra = OrderedAlgebra::new(
        names,
        product,
        leq,
        identity.as_ref().and_then(index),
        zero.as_ref().and_then(index),
    )?;
    Ok(ConcreteAlgebra { algebra, elements })
}

fn plain(n: usize) -> Result<Arc<StateSpace>> {
    StateSpace::numbered(n, false)
}

/// `(Rel(X), ;, ⊆)` with `1'` and zero `∅`.
pub fn rel_angelic(n: usize) -> Result<ConcreteAlgebra> {
    let x = plain(n)?;
    materialize(
        Relation::all_over(&x)?,
        &|a, b| a.compose(b).map(Some),
        &|a, b| a.includes_in(b),
        Some(Relation::diagonal(&x)),
        Some(Relation::empty(&x)),
    )
}

/// `(Rel(X), ∗, ⊑)` with `1'` and zero `∅`.
pub fn rel_demonic(n: usize) -> Result<ConcreteAlgebra> {
    let x = plain(n)?;
    materialize(
        Relation::all_over(&x)?,
        &|a, b| a.compose_demonic(b).map(Some),
        &|a, b| a.refines_demonic(b),
        Some(Relation::diagonal(&x)),
        Some(Relation::empty(&x)),
    )
}

/// `(Rel(X), ·, ⊆)` with zero `∅`. `1'` is only a right identity here, so none is declared.
pub fn rel_constellation(n: usize) -> Result<ConcreteAlgebra> {
    let x = plain(n)?;
    materialize(
        Relation::all_over(&x)?,
        &|a, b| a.product_constellation(b),
        &|a, b| a.includes_in(b),
        None,
        Some(Relation::empty(&x)),
    )
}

/// `(Ltrel₀(X), ;, ⊆)` with `skip` and weak zero `𝟘`.
pub fn ltrel0(n: usize) -> Result<ConcreteAlgebra> {
    let x0 = StateSpace::numbered(n, true)?;
    let elements = ProgramRelation::all_over(&x0)?
        .into_iter()
        .map(ProgramRelation::into_relation)
        .collect();
    materialize(
        elements,
        &|a, b| a.compose(b).map(Some),
        &|a, b| a.includes_in(b),
        Some(Relation::diagonal(&x0)),
        Some(ProgramRelation::abort(&x0)?.into_relation()),
    )
}

/// `(T(X), ;, ⊆)` with `1'` and zero `∇`.
pub fn total(n: usize) -> Result<ConcreteAlgebra> {
    let x = plain(n)?;
    let elements = Relation::all_over(&x)?
        .into_iter()
        .filter(|r| r.classify().is_total)
        .collect();
    materialize(
        elements,
        &|a, b| a.compose(b).map(Some),
        &|a, b| a.includes_in(b),
        Some(Relation::diagonal(&x)),
        Some(Relation::full(&x)),
    )
}
