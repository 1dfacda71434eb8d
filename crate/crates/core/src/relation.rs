//! Finite binary relations and the angelic, demonic and constellation operations on them.
//!
//! A relation is stored as one bit row per element of its carrier: bit `y` of
//! row `x` is set when `(x, y)` is in the relation.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{RelicError, Result};
use crate::space::{same_space, ElemSet, StateSpace};

#[derive(Clone)]
pub struct Relation {
    space: Arc<StateSpace>,
    rows: Vec<u64>,
}

/// Membership summary returned by [`Relation::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub is_left_total: bool,
    pub is_total: bool,
    /// `None` when the carrier has no fail element.
    pub is_in_ltrel0: Option<bool>,
}

impl Relation {
    pub fn empty(space: &Arc<StateSpace>) -> Self {
        Relation {
            space: space.clone(),
            rows: vec![0; space.size()],
        }
    }

    /// The diagonal `1'`.
    pub fn diagonal(space: &Arc<StateSpace>) -> Self {
        let mut r = Relation::empty(space);
        for x in 0..space.size() {
            r.rows[x] = 1 << x;
        }
        r
    }

    /// The full relation `∇`.
    pub fn full(space: &Arc<StateSpace>) -> Self {
        let all = space.all().0;
        Relation {
            space: space.clone(),
            rows: vec![all; space.size()],
        }
    }

    pub fn from_pairs(space: &Arc<StateSpace>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut r = Relation::empty(space);
        let n = space.size();
        for (x, y) in pairs {
            if x >= n || y >= n {
                return Err(RelicError::Invalid(format!("pair ({x},{y}) outside a carrier of size {n}")));
            }
            r.rows[x] |= 1 << y;
        }
        Ok(r)
    }

    /// Build from named pairs, e.g. `[("1", "2")]`.
    pub fn from_named(space: &Arc<StateSpace>, pairs: &[(&str, &str)]) -> Result<Self> {
        let idx = |n: &str| space.index_of(n).ok_or_else(|| RelicError::UnknownName(n.to_string()));
        let pairs = pairs
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Relation::from_pairs(space, pairs)
    }

    pub fn from_rows(space: &Arc<StateSpace>, rows: Vec<ElemSet>) -> Result<Self> {
        if rows.len() != space.size() {
            return Err(RelicError::Invalid("row count differs from carrier size".into()));
        }
        let all = space.all();
        if rows.iter().any(|r| !r.is_subset(all)) {
            return Err(RelicError::Invalid("row mentions an element outside the carrier".into()));
        }
        Ok(Relation {
            space: space.clone(),
            rows: rows.into_iter().map(|r| r.0).collect(),
        })
    }

    /// The relation whose pairs are the set bits of `code`, read row-major.
    /// Codes `0..2^(n*n)` enumerate every relation on a carrier of size `n`.
    pub fn from_code(space: &Arc<StateSpace>, code: u64) -> Self {
        let n = space.size();
        let mask = ElemSet::full(n).0;
        let rows = (0..n).map(|x| (code >> (x * n)) & mask).collect();
        Relation {
            space: space.clone(),
            rows,
        }
    }

    pub fn code(&self) -> u64 {
        let n = self.space.size();
        self.rows.iter().enumerate().fold(0, |acc, (x, r)| acc | (r << (x * n)))
    }

    /// Every relation on the carrier, in code order. Carriers above 4 elements are refused.
    pub fn all_over(space: &Arc<StateSpace>) -> Result<Vec<Relation>> {
        let n = space.size();
        if n > 4 {
            return Err(RelicError::Invalid(format!("refusing to enumerate Rel(X) for |X| = {n}")));
        }
        Ok((0..1u64 << (n * n)).map(|c| Relation::from_code(space, c)).collect())
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn row(&self, x: usize) -> ElemSet {
        ElemSet(self.rows[x])
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x] >> y & 1 == 1
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.rows[x] |= 1 << y;
    }

    pub fn remove(&mut self, x: usize, y: usize) {
        self.rows[x] &= !(1 << y);
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, &r)| ElemSet(r).iter().map(move |y| (x, y)))
    }

    /// Forward image `s(x)`.
    pub fn image(&self, x: usize) -> ElemSet {
        self.row(x)
    }

    pub fn dom(&self) -> ElemSet {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, &r)| r != 0)
            .map(|(x, _)| x)
            .collect()
    }

    pub fn ran(&self) -> ElemSet {
        ElemSet(self.rows.iter().fold(0, |acc, r| acc | r))
    }

    fn check(&self, other: &Relation) -> Result<()> {
        same_space(&self.space, &other.space)
    }

    /// Image of a set of elements, `⋃_{x∈set} s(x)`.
    fn image_of_set(&self, set: u64) -> u64 {
        ElemSet(set).iter().fold(0, |acc, z| acc | self.rows[z])
    }

    /// Angelic composition `s ; t`.
    pub fn compose(&self, t: &Relation) -> Result<Relation> {
        self.check(t)?;
        Ok(self.compose_unchecked(t))
    }

    fn compose_unchecked(&self, t: &Relation) -> Relation {
        let rows = self.rows.iter().map(|&r| t.image_of_set(r)).collect();
        Relation {
            space: self.space.clone(),
            rows,
        }
    }

    /// Demonic composition `s ∗ t`, computed as `(s;t) ∩ {(x,y) : s(x) ⊆ dom(t)}`.
    /// Debug builds recompute it from the quantifier definition and compare.
    pub fn compose_demonic(&self, t: &Relation) -> Result<Relation> {
        self.check(t)?;
        let dom_t = t.dom().0;
        let rows = self
            .rows
            .iter()
            .map(|&r| if r & !dom_t == 0 { t.image_of_set(r) } else { 0 })
            .collect();
        let out = Relation {
            space: self.space.clone(),
            rows,
        };
        debug_assert!(
            out == self.compose_demonic_quantified(t),
            "demonic composition forms disagree"
        );
        Ok(out)
    }

    /// Demonic composition evaluated literally:
    /// `∃z ((x,z)∈s ∧ (z,y)∈t) ∧ ∀w ((x,w)∈s → ∃v (w,v)∈t)`.
    pub fn compose_demonic_quantified(&self, t: &Relation) -> Relation {
        let n = self.space.size();
        let mut out = Relation::empty(&self.space);
        for x in 0..n {
            let guarded = (0..n).all(|w| !self.contains(x, w) || (0..n).any(|v| t.contains(w, v)));
            if !guarded {
                continue;
            }
            for y in 0..n {
                if (0..n).any(|z| self.contains(x, z) && t.contains(z, y)) {
                    out.insert(x, y);
                }
            }
        }
        out
    }

    /// Demonic refinement `s ⊑ t`: `dom(t) ⊆ dom(s)` and `s` restricted to `dom(t)` is inside `t`.
    pub fn refines_demonic(&self, t: &Relation) -> Result<bool> {
        self.check(t)?;
        let dt = t.dom();
        if !dt.is_subset(self.dom()) {
            return Ok(false);
        }
        Ok(dt.iter().all(|x| self.rows[x] & !t.rows[x] == 0))
    }

    /// Demonic join `s ⊔⊔ t`: the union restricted to `dom(s) ∩ dom(t)`.
    pub fn join_demonic(&self, t: &Relation) -> Result<Relation> {
        self.check(t)?;
        let rows = self
            .rows
            .iter()
            .zip(&t.rows)
            .map(|(&a, &b)| if a != 0 && b != 0 { a | b } else { 0 })
            .collect();
        Ok(Relation {
            space: self.space.clone(),
            rows,
        })
    }

    /// Constellation product `s · t`; `Ok(None)` when `ran(s) ⊄ dom(t)`.
    pub fn product_constellation(&self, t: &Relation) -> Result<Option<Relation>> {
        self.check(t)?;
        if self.ran().is_subset(t.dom()) {
            Ok(Some(self.compose_unchecked(t)))
        } else {
            Ok(None)
        }
    }

    pub fn union(&self, t: &Relation) -> Result<Relation> {
        self.check(t)?;
        let rows = self.rows.iter().zip(&t.rows).map(|(a, b)| a | b).collect();
        Ok(Relation {
            space: self.space.clone(),
            rows,
        })
    }

    pub fn intersection(&self, t: &Relation) -> Result<Relation> {
        self.check(t)?;
        let rows = self.rows.iter().zip(&t.rows).map(|(a, b)| a & b).collect();
        Ok(Relation {
            space: self.space.clone(),
            rows,
        })
    }

    /// Inclusion `s ⊆ t`.
    pub fn includes_in(&self, t: &Relation) -> Result<bool> {
        self.check(t)?;
        Ok(self.rows.iter().zip(&t.rows).all(|(a, b)| a & !b == 0))
    }

    /// `includes(s, t)`: does `s` contain `t`?
    pub fn includes(&self, t: &Relation) -> Result<bool> {
        t.includes_in(self)
    }

    /// Keep only the rows of elements in `set`.
    pub fn restrict_domain(&self, set: ElemSet) -> Relation {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(x, &r)| if set.contains(x) { r } else { 0 })
            .collect();
        Relation {
            space: self.space.clone(),
            rows,
        }
    }

    /// `D(s)`: the diagonal restricted to `dom(s)`.
    pub fn diag_of_domain(&self) -> Relation {
        Relation::diagonal(&self.space).restrict_domain(self.dom())
    }

    /// The diagonal restricted to `set`.
    pub fn diagonal_on(space: &Arc<StateSpace>, set: ElemSet) -> Relation {
        Relation::diagonal(space).restrict_domain(set)
    }

    /// Left-totality, totality (`dom = ran = X`) and membership of `Ltrel₀`.
    pub fn classify(&self) -> Classification {
        let all = self.space.all();
        let is_left_total = self.dom() == all;
        let is_total = is_left_total && self.ran() == all;
        let is_in_ltrel0 = self
            .space
            .fail()
            .map(|f| is_left_total && self.rows[f] == 1 << f && self.rows.iter().all(|&r| r != 0));
        Classification {
            is_left_total,
            is_total,
            is_in_ltrel0,
        }
    }

    /// Membership of `Ltrel₀`, erroring when the carrier has no fail element.
    pub fn is_in_ltrel0(&self) -> Result<bool> {
        self.classify().is_in_ltrel0.ok_or(RelicError::MissingFail)
    }

    /// Whether every row has at most one element.
    pub fn is_functional(&self) -> bool {
        self.rows.iter().all(|r| r.count_ones() <= 1)
    }

    /// The same pairs read over another carrier of at least the same size.
    pub fn transport(&self, space: &Arc<StateSpace>) -> Result<Relation> {
        let n = space.size();
        if self.pairs().any(|(x, y)| x >= n || y >= n) {
            return Err(RelicError::SpaceMismatch("relation does not fit the target carrier".into()));
        }
        let mut rows = self.rows.clone();
        rows.resize(n, 0);
        Ok(Relation {
            space: space.clone(),
            rows,
        })
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && (Arc::ptr_eq(&self.space, &other.space) || self.space == other.space)
    }
}

impl Eq for Relation {}

impl Hash for Relation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
    }
}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Relation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rows
            .len()
            .cmp(&other.rows.len())
            .then_with(|| self.rows.cmp(&other.rows))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs()
            .map(|(x, y)| format!("({},{})", self.space.name(x), self.space.name(y)))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2() -> Arc<StateSpace> {
        StateSpace::numbered(2, false).unwrap()
    }

    fn rel(space: &Arc<StateSpace>, pairs: &[(&str, &str)]) -> Relation {
        Relation::from_named(space, pairs).unwrap()
    }

    /// Literal triple-loop evaluation of `;` used as an oracle.
    fn compose_oracle(s: &Relation, t: &Relation) -> Relation {
        let n = s.space().size();
        let mut out = Relation::empty(s.space());
        for x in 0..n {
            for z in 0..n {
                for y in 0..n {
                    if s.contains(x, z) && t.contains(z, y) {
                        out.insert(x, y);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn angelic_examples() {
        let x = x2();
        let s = rel(&x, &[("1", "1"), ("1", "2")]);
        let t = rel(&x, &[("1", "1")]);
        assert_eq!(s.compose(&t).unwrap(), rel(&x, &[("1", "1")]));
        assert_eq!(s.compose(&t).unwrap(), compose_oracle(&s, &t));
        assert!(Relation::empty(&x).compose(&s).unwrap().is_empty());
        assert_eq!(Relation::diagonal(&x).compose(&s).unwrap(), s);
    }

    #[test]
    fn demonic_examples() {
        let x = x2();
        let s = rel(&x, &[("1", "1"), ("1", "2")]);
        let t = rel(&x, &[("1", "1")]);
        assert!(s.compose_demonic(&t).unwrap().is_empty());
        let s = rel(&x, &[("1", "1"), ("2", "1")]);
        let t = rel(&x, &[("1", "2")]);
        assert_eq!(s.compose_demonic(&t).unwrap(), rel(&x, &[("1", "2"), ("2", "2")]));
        assert!(s.compose_demonic(&Relation::empty(&x)).unwrap().is_empty());
    }

    #[test]
    fn demonic_forms_agree_up_to_three() {
        for n in 1..=3 {
            let sp = StateSpace::numbered(n, false).unwrap();
            let all = Relation::all_over(&sp).unwrap();
            for s in &all {
                for t in &all {
                    assert_eq!(s.compose_demonic(t).unwrap(), s.compose_demonic_quantified(t));
                }
            }
        }
    }

    #[test]
    fn refinement_examples() {
        let x = x2();
        let a = rel(&x, &[("1", "1"), ("1", "2")]);
        let b = rel(&x, &[("1", "1")]);
        assert!(a.refines_demonic(&Relation::empty(&x)).unwrap());
        assert!(!a.refines_demonic(&b).unwrap());
        assert!(b.refines_demonic(&a).unwrap());
        assert!(a.refines_demonic(&a).unwrap());
    }

    #[test]
    fn join_examples() {
        let x = x2();
        let s = rel(&x, &[("1", "1"), ("2", "1")]);
        let t = rel(&x, &[("2", "2")]);
        assert_eq!(s.join_demonic(&t).unwrap(), rel(&x, &[("2", "1"), ("2", "2")]));
        assert_eq!(s.join_demonic(&s).unwrap(), s);
        assert!(s.join_demonic(&Relation::empty(&x)).unwrap().is_empty());
    }

    #[test]
    fn constellation_examples() {
        let x = x2();
        let s = rel(&x, &[("1", "2"), ("2", "2")]);
        let t = rel(&x, &[("2", "1")]);
        assert_eq!(
            s.product_constellation(&t).unwrap(),
            Some(rel(&x, &[("1", "1"), ("2", "1")]))
        );
        let s = rel(&x, &[("1", "1")]);
        let t = rel(&x, &[("2", "2")]);
        assert_eq!(s.product_constellation(&t).unwrap(), None);
        assert_eq!(s.product_constellation(&Relation::diagonal(&x)).unwrap(), Some(s));
    }

    #[test]
    fn basics() {
        let x = StateSpace::numbered(3, false).unwrap();
        let s = rel(&x, &[("1", "2"), ("3", "1")]);
        assert_eq!(s.dom(), [0, 2].into_iter().collect());
        assert_eq!(rel(&x, &[("1", "2")]).diag_of_domain(), rel(&x, &[("1", "1")]));
        let t = rel(&x, &[("1", "1"), ("1", "2")]);
        assert_eq!(t.image(0), [0, 1].into_iter().collect());
        assert!(t.includes(&rel(&x, &[("1", "1")])).unwrap());
        assert_eq!(s.to_string(), "{(1,2),(3,1)}");
    }

    #[test]
    fn classification() {
        let x = x2();
        let c = Relation::diagonal(&x).classify();
        assert!(c.is_left_total && c.is_total);
        assert_eq!(c.is_in_ltrel0, None);
        let c = rel(&x, &[("1", "1"), ("2", "1")]).classify();
        assert!(c.is_left_total && !c.is_total);
        assert!(Relation::diagonal(&x).is_in_ltrel0().is_err());

        let x0 = StateSpace::numbered(2, true).unwrap();
        let f = x0.fail().unwrap();
        let abort = Relation::from_pairs(&x0, (0..3).map(|i| (i, f))).unwrap();
        assert_eq!(abort.classify().is_in_ltrel0, Some(true));
    }

    #[test]
    fn cross_space_is_an_error() {
        let a = Relation::empty(&x2());
        let b = Relation::empty(&StateSpace::numbered(3, false).unwrap());
        assert!(matches!(a.compose(&b), Err(RelicError::SpaceMismatch(_))));
        assert!(a.product_constellation(&b).is_err());
    }

    #[test]
    fn codes_round_trip() {
        let x = StateSpace::numbered(3, false).unwrap();
        for code in [0u64, 1, 77, 511] {
            assert_eq!(Relation::from_code(&x, code).code(), code);
        }
    }
}
