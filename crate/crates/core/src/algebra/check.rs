use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::RelicError;

use super::OrderedAlgebra;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    OrderedSemigroup,
    WeakZero,
    Zero,
    DualZero,
    Preconstellation,
    OrderedPreconstellation,
    PreconstellationZero,
    IdempotentSemiring,
}

impl ClassTag {
    pub const ALL: [ClassTag; 8] = [
        ClassTag::OrderedSemigroup,
        ClassTag::WeakZero,
        ClassTag::Zero,
        ClassTag::DualZero,
        ClassTag::Preconstellation,
        ClassTag::OrderedPreconstellation,
        ClassTag::PreconstellationZero,
        ClassTag::IdempotentSemiring,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::OrderedSemigroup => "ordered_semigroup",
            ClassTag::WeakZero => "weak_zero",
            ClassTag::Zero => "zero",
            ClassTag::DualZero => "dual_zero",
            ClassTag::Preconstellation => "preconstellation",
            ClassTag::OrderedPreconstellation => "ordered_preconstellation",
            ClassTag::PreconstellationZero => "preconstellation_zero",
            ClassTag::IdempotentSemiring => "idempotent_semiring",
        }
    }

    /// Whether the class admits undefined products.
    pub fn is_partial(self) -> bool {
        matches!(
            self,
            ClassTag::Preconstellation | ClassTag::OrderedPreconstellation | ClassTag::PreconstellationZero
        )
    }

    pub fn needs_zero(self) -> bool {
        matches!(
            self,
            ClassTag::WeakZero | ClassTag::Zero | ClassTag::DualZero | ClassTag::PreconstellationZero
        )
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassTag {
    type Err = RelicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| RelicError::UnknownName(format!("class `{s}`")))
    }
}

/// One violated axiom instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub law: &'static str,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub tag: ClassTag,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl ClassReport {
    pub fn is_member(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render(&self, alg: &OrderedAlgebra) -> String {
        let mut out = String::new();
        let verdict = if self.is_member() { "member" } else { "not a member" };
        out.push_str(&format!("class {}: {verdict}\n", self.tag));
        for v in &self.violations {
            let w: Vec<&str> = v.witness.iter().map(|&i| alg.name(i)).collect();
            out.push_str(&format!("  violated {} at ({})\n", v.law, w.join(", ")));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

/// A product cell as seen during a scan; `Unknown` only occurs while a table is being filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cell {
    Unknown,
    Undef,
    Val(usize),
}

pub(crate) struct View<'a> {
    pub n: usize,
    pub leq: &'a [u64],
    pub cell: &'a dyn Fn(usize, usize) -> Cell,
    pub zero: Option<usize>,
}

impl View<'_> {
    fn le(&self, a: usize, b: usize) -> bool {
        self.leq[a] >> b & 1 == 1
    }
}

pub(crate) const ZERO_READING: &str =
    "`∃(s·t)=0 ⇒ s=0` is read as: if s·t is defined and equals 0 then s=0";

/// Scan every instance of the laws of `tag`. `sink` returns `false` to stop early.
/// Returns `false` if stopped.
pub(crate) fn scan(tag: ClassTag, v: &View<'_>, sink: &mut dyn FnMut(Violation) -> bool) -> bool {
    macro_rules! report {
        ($law:expr, $($w:expr),*) => {
            if !sink(Violation { law: $law, witness: vec![$($w),*] }) {
                return false;
            }
        };
    }
    let n = v.n;
    let cell = v.cell;

    if tag.needs_zero() && v.zero.is_none() {
        report!("zero element declared",);
    }

    if !tag.is_partial() {
        for a in 0..n {
            for b in 0..n {
                if cell(a, b) == Cell::Undef {
                    report!("total product", a, b);
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let Cell::Val(ab) = cell(a, b) else { continue };
                for c in 0..n {
                    let (Cell::Val(l), Cell::Val(bc)) = (cell(ab, c), cell(b, c)) else { continue };
                    if let Cell::Val(r) = cell(a, bc) {
                        if l != r {
                            report!("associativity", a, b, c);
                        }
                    }
                }
            }
        }
    }

    if matches!(tag, ClassTag::OrderedSemigroup | ClassTag::WeakZero | ClassTag::Zero | ClassTag::DualZero) {
        for a in 0..n {
            for b in 0..n {
                if a == b || !v.le(a, b) {
                    continue;
                }
                for c in 0..n {
                    if let (Cell::Val(x), Cell::Val(y)) = (cell(a, c), cell(b, c)) {
                        if !v.le(x, y) {
                            report!("right monotonicity", a, b, c);
                        }
                    }
                    if let (Cell::Val(x), Cell::Val(y)) = (cell(c, a), cell(c, b)) {
                        if !v.le(x, y) {
                            report!("left monotonicity", a, b, c);
                        }
                    }
                }
            }
        }
    }

    if let (true, false, Some(z)) = (tag.needs_zero(), tag.is_partial(), v.zero) {
        for a in 0..n {
            for c in [cell(z, a), cell(a, z)] {
                if !matches!(c, Cell::Unknown | Cell::Val(_)) || matches!(c, Cell::Val(x) if x != z) {
                    report!("zero absorbs", a);
                }
            }
            match tag {
                ClassTag::WeakZero if a != z && v.le(a, z) => report!("weak zero: s<=0 implies s=0", a),
                ClassTag::Zero if !v.le(z, a) => report!("zero is least", a),
                ClassTag::DualZero if !v.le(a, z) => report!("zero is greatest", a),
                _ => {}
            }
        }
    }

    if tag.is_partial() {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    // Law I: x·(y·z) exists ⇒ (x·y)·z exists and is equal.
                    if let Cell::Val(yz) = cell(y, z) {
                        if let Cell::Val(r) = cell(x, yz) {
                            match cell(x, y) {
                                Cell::Undef => report!("law I", x, y, z),
                                Cell::Val(xy) => match cell(xy, z) {
                                    Cell::Undef => report!("law I", x, y, z),
                                    Cell::Val(l) if l != r => report!("law I", x, y, z),
                                    _ => {}
                                },
                                Cell::Unknown => {}
                            }
                        }
                    }
                    // Law II: x·y and y·z exist ⇒ x·(y·z) exists.
                    if let (Cell::Val(_), Cell::Val(yz)) = (cell(x, y), cell(y, z)) {
                        if cell(x, yz) == Cell::Undef {
                            report!("law II", x, y, z);
                        }
                    }
                }
            }
        }
    }

    if matches!(tag, ClassTag::OrderedPreconstellation | ClassTag::PreconstellationZero) {
        for s in 0..n {
            for u in (0..n).filter(|&u| v.le(s, u)) {
                for t in 0..n {
                    for w in (0..n).filter(|&w| v.le(t, w)) {
                        if let (Cell::Val(st), Cell::Val(uw)) = (cell(s, t), cell(u, w)) {
                            if !v.le(st, uw) {
                                report!("law III", s, t, u, w);
                            }
                        }
                        if let (Cell::Val(_), Cell::Undef) = (cell(u, t), cell(s, w)) {
                            report!("law IV", s, t, u, w);
                        }
                    }
                }
            }
        }
    }

    if let (ClassTag::PreconstellationZero, Some(z)) = (tag, v.zero) {
        for s in 0..n {
            match cell(z, s) {
                Cell::Undef => report!("0·s=0", s),
                Cell::Val(x) if x != z => report!("0·s=0", s),
                _ => {}
            }
            if s != z && matches!(cell(s, z), Cell::Val(_)) {
                report!("s·0 exists implies s=0", s);
            }
            if !v.le(z, s) {
                report!("zero is least", s);
            }
            for t in 0..n {
                if s != z && cell(s, t) == Cell::Val(z) {
                    report!("s·t exists and equals 0 implies s=0", s, t);
                }
            }
        }
    }

    if tag == ClassTag::IdempotentSemiring {
        let mut join = vec![None; n * n];
        for a in 0..n {
            for b in 0..n {
                let ub = v.leq[a] & v.leq[b];
                join[a * n + b] = (0..n).find(|&u| ub >> u & 1 == 1 && ub & !v.leq[u] == 0);
                if join[a * n + b].is_none() {
                    report!("join exists", a, b);
                }
            }
        }
        let j = |a: usize, b: usize| join[a * n + b];
        for a in 0..n {
            for b in 0..n {
                let Some(ab) = j(a, b) else { continue };
                for c in 0..n {
                    for d in 0..n {
                        let Some(cd) = j(c, d) else { continue };
                        let (Cell::Val(lhs), Cell::Val(ac), Cell::Val(ad), Cell::Val(bc), Cell::Val(bd)) =
                            (cell(ab, cd), cell(a, c), cell(a, d), cell(b, c), cell(b, d))
                        else {
                            continue;
                        };
                        let rhs = j(ac, ad).and_then(|x| j(x, bc)).and_then(|x| j(x, bd));
                        if rhs != Some(lhs) {
                            report!("distributivity", a, b, c, d);
                        }
                    }
                }
            }
        }
    }
    true
}

impl OrderedAlgebra {
    /// Check every axiom of `tag`, listing each violated instance.
    pub fn check_class(&self, tag: ClassTag) -> ClassReport {
        let cell = |a: usize, b: usize| match self.mul(a, b) {
            Some(c) => Cell::Val(c),
            None => Cell::Undef,
        };
        let view = View {
            n: self.size(),
            leq: self.leq_rows(),
            cell: &cell,
            zero: self.zero(),
        };
        let mut violations = Vec::new();
        scan(tag, &view, &mut |v| {
            violations.push(v);
            true
        });
        let mut notes = Vec::new();
        if tag == ClassTag::PreconstellationZero {
            notes.push(ZERO_READING.to_string());
        }
        ClassReport {
            tag,
            violations,
            notes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_algebra;

    fn one() -> OrderedAlgebra {
        parse_algebra("elements e\nprod e e = e\nidentity e\nzero e\n").unwrap()
    }

    fn chain2() -> OrderedAlgebra {
        parse_algebra("elements 0 a\norder 0<=a\nprod 0 0 = 0\nprod 0 a = 0\nprod a 0 = 0\nprod a a = a\nzero 0\n").unwrap()
    }

    /// Oracle: the ordered-semigroup axioms as literal quantifier loops.
    fn naive_ordered_semigroup(a: &OrderedAlgebra) -> bool {
        let n = a.size();
        let m = |x, y| a.mul(x, y).unwrap();
        (0..n).all(|x| (0..n).all(|y| a.mul(x, y).is_some()))
            && (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| m(m(x, y), z) == m(x, m(y, z)))))
            && (0..n).all(|x| {
                (0..n).all(|y| !a.leq(x, y) || (0..n).all(|z| a.leq(m(x, z), m(y, z)) && a.leq(m(z, x), m(z, y))))
            })
    }

    #[test]
    fn one_element_passes_every_total_class() {
        let a = one();
        for tag in ClassTag::ALL {
            assert!(a.check_class(tag).is_member(), "{tag}");
        }
    }

    #[test]
    fn two_chain() {
        let a = chain2();
        assert!(naive_ordered_semigroup(&a));
        assert!(a.check_class(ClassTag::OrderedSemigroup).is_member());
        assert!(a.check_class(ClassTag::Zero).is_member());
        assert!(a.check_class(ClassTag::WeakZero).is_member());
        let r = a.check_class(ClassTag::DualZero);
        assert_eq!(
            r.violations,
            vec![Violation {
                law: "zero is greatest",
                witness: vec![1]
            }]
        );
        assert!(r.render(&a).contains("zero is greatest at (a)"));
    }

    #[test]
    fn zero_tags_need_a_declared_zero() {
        let a = parse_algebra("elements e\nprod e e = e\n").unwrap();
        assert!(!a.check_class(ClassTag::WeakZero).is_member());
        assert!(a.check_class(ClassTag::OrderedSemigroup).is_member());
    }

    #[test]
    fn partial_laws() {
        // Two idempotents with no cross products, like {(1,1)} and {(2,2)}.
        let a = parse_algebra("elements a b\nprod a a = a\nprod a b = undef\nprod b a = undef\nprod b b = b\n").unwrap();
        assert!(a.check_class(ClassTag::Preconstellation).is_member());
        assert!(a.check_class(ClassTag::OrderedPreconstellation).is_member());
        assert!(!a.check_class(ClassTag::OrderedSemigroup).is_member());
        // Law II fails when a·b and b·a exist but a·(b·a) does not.
        let bad = parse_algebra("elements a b\nprod a a = undef\nprod a b = b\nprod b a = a\nprod b b = undef\n").unwrap();
        let r = bad.check_class(ClassTag::Preconstellation);
        assert!(r.violations.iter().any(|v| v.law == "law II"));
        // Law I fails when a·(a·b) exists but a·a does not.
        let bad = parse_algebra("elements a b\nprod a a = undef\nprod a b = b\nprod b a = undef\nprod b b = b\n").unwrap();
        let r = bad.check_class(ClassTag::Preconstellation);
        assert!(r.violations.iter().any(|v| v.law == "law I" && v.witness == [0, 0, 1]));
    }

    #[test]
    fn law_iv_uses_the_order() {
        // a <= b, b·b exists, a·b does not.
        let p = parse_algebra("elements a b\norder a<=b\nprod a a = undef\nprod a b = undef\nprod b a = undef\nprod b b = b\n").unwrap();
        let r = p.check_class(ClassTag::OrderedPreconstellation);
        assert!(r.violations.iter().any(|v| v.law == "law IV"));
    }

    #[test]
    fn semiring_distributivity() {
        let a = chain2();
        assert!(a.check_class(ClassTag::IdempotentSemiring).is_member());
        // An antichain has no joins.
        let b = parse_algebra("elements a b\nprod a a = a\nprod a b = a\nprod b a = a\nprod b b = a\n").unwrap();
        assert!(b.check_class(ClassTag::IdempotentSemiring).violations.iter().any(|v| v.law == "join exists"));
    }

    #[test]
    fn tag_names_round_trip() {
        for tag in ClassTag::ALL {
            assert_eq!(tag.as_str().parse::<ClassTag>().unwrap(), tag);
        }
        assert!("bogus".parse::<ClassTag>().is_err());
    }
}
