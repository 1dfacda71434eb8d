//! Hoare triples over program relations.
//!
//! Programs are written with `;` (sequence) binding tighter than `|` (choice):
//!
//! ```text
//! a ; b | skip ; (c | abort)
//! ```
//!
//! Every correctness question is answered by several independent characterizations
//! which are cross-checked when self-checking is on.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{RelicError, Result, SyntaxError};
use crate::program::ProgramRelation;
use crate::relation::Relation;
use crate::space::{ElemSet, StateSpace};
use crate::syntax::{parse_elem_set_in, Cursor, Env, Tok};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramAst {
    Atom(String),
    Skip,
    Abort,
    Seq(Box<ProgramAst>, Box<ProgramAst>),
    Choice(Box<ProgramAst>, Box<ProgramAst>),
}

impl fmt::Display for ProgramAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramAst::Atom(a) => write!(f, "{a}"),
            ProgramAst::Skip => write!(f, "skip"),
            ProgramAst::Abort => write!(f, "abort"),
            ProgramAst::Seq(l, r) => write!(f, "({l} ; {r})"),
            ProgramAst::Choice(l, r) => write!(f, "({l} | {r})"),
        }
    }
}

/// Named program relations over a shared `X₀`.
#[derive(Debug, Clone)]
pub struct ProgramEnv {
    pub space: Arc<StateSpace>,
    pub atoms: BTreeMap<String, ProgramRelation>,
}

impl ProgramEnv {
    pub fn new(space: Arc<StateSpace>) -> Result<Self> {
        space.require_fail()?;
        Ok(ProgramEnv {
            space,
            atoms: BTreeMap::new(),
        })
    }

    pub fn from_env(env: &Env) -> Result<Self> {
        let mut out = ProgramEnv::new(env.space.clone())?;
        for (name, rel) in &env.bindings {
            let p = ProgramRelation::new(rel.clone())
                .map_err(|e| RelicError::Invalid(format!("binding `{name}`: {e}")))?;
            out.atoms.insert(name.clone(), p);
        }
        Ok(out)
    }

    pub fn bind(&mut self, name: impl Into<String>, p: ProgramRelation) -> Result<()> {
        crate::space::same_space(&self.space, p.space())?;
        self.atoms.insert(name.into(), p);
        Ok(())
    }
}

fn parse_choice(c: &mut Cursor<'_>, env: Option<&ProgramEnv>) -> std::result::Result<ProgramAst, SyntaxError> {
    let mut left = parse_seq(c, env)?;
    while c.eat("|") {
        let right = parse_seq(c, env)?;
        left = ProgramAst::Choice(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_seq(c: &mut Cursor<'_>, env: Option<&ProgramEnv>) -> std::result::Result<ProgramAst, SyntaxError> {
    let mut left = parse_primary(c, env)?;
    while c.eat(";") {
        let right = parse_primary(c, env)?;
        left = ProgramAst::Seq(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_primary(c: &mut Cursor<'_>, env: Option<&ProgramEnv>) -> std::result::Result<ProgramAst, SyntaxError> {
    if c.eat("(") {
        let p = parse_choice(c, env)?;
        c.expect(")")?;
        return Ok(p);
    }
    match c.peek() {
        Some(Tok::Word(_)) => {
            let (w, off) = c.word()?;
            Ok(match w.as_str() {
                "skip" => ProgramAst::Skip,
                "abort" => ProgramAst::Abort,
                _ => {
                    if let Some(env) = env {
                        if !env.atoms.contains_key(&w) {
                            return Err(c.error_at(off, format!("unknown program `{w}`")));
                        }
                    }
                    ProgramAst::Atom(w)
                }
            })
        }
        _ => Err(c.error("expected a program")),
    }
}

/// Parse a program. With an environment, unknown atom names are rejected at parse time.
pub fn parse_program(text: &str, env: Option<&ProgramEnv>) -> Result<ProgramAst> {
    let mut c = Cursor::new(text)?;
    let p = parse_choice(&mut c, env)?;
    c.expect_end()?;
    Ok(p)
}

pub fn denote(p: &ProgramAst, env: &ProgramEnv) -> Result<ProgramRelation> {
    match p {
        ProgramAst::Atom(a) => env
            .atoms
            .get(a)
            .cloned()
            .ok_or_else(|| RelicError::UnknownName(a.clone())),
        ProgramAst::Skip => ProgramRelation::skip(&env.space),
        ProgramAst::Abort => ProgramRelation::abort(&env.space),
        ProgramAst::Seq(l, r) => denote(l, env)?.seq(&denote(r, env)?),
        ProgramAst::Choice(l, r) => denote(l, env)?.choice(&denote(r, env)?),
    }
}

/// A test: a subset of `X`, never containing the fail element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Test {
    space: Arc<StateSpace>,
    truth: ElemSet,
}

impl Test {
    pub fn new(space: &Arc<StateSpace>, truth: ElemSet) -> Result<Self> {
        let f = space.require_fail()?;
        if truth.contains(f) || !truth.is_subset(space.all()) {
            return Err(RelicError::Invalid("a test may only hold proper states".into()));
        }
        Ok(Test {
            space: space.clone(),
            truth,
        })
    }

    pub fn truth_set(&self) -> ElemSet {
        self.truth
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    /// Every test over `x0`, ordered by truth-set bits.
    pub fn all_over(x0: &Arc<StateSpace>) -> Result<Vec<Test>> {
        let states = x0.states();
        let mut out = Vec::new();
        for bits in 0..1u64 << x0.size() {
            let set = ElemSet(bits);
            if set.is_subset(states) {
                out.push(Test::new(x0, set)?);
            }
        }
        Ok(out)
    }

    /// `1'|_Y ∪ {(s,0) : s ∈ X₀∖Y}`.
    pub fn to_program(&self) -> ProgramRelation {
        let f = self.space.fail().expect("tests live on X0");
        let mut r = Relation::diagonal_on(&self.space, self.truth);
        for s in self.space.all().difference(self.truth).iter() {
            r.insert(s, f);
        }
        ProgramRelation::new(r).expect("test completions are in Ltrel0")
    }

    /// The diagonal restriction over `X`.
    pub fn diagonal(&self) -> Relation {
        let x = self.space.without_fail().expect("fail element is last");
        Relation::diagonal_on(&x, self.truth)
    }

    /// `α ≤ β`: truth-set inclusion, cross-checked against `α;β = α`.
    pub fn leq(&self, other: &Test) -> Result<bool> {
        crate::space::same_space(&self.space, &other.space)?;
        let by_sets = self.truth.is_subset(other.truth);
        let a = self.to_program();
        let algebraic = a.seq(&other.to_program())? == a;
        if by_sets != algebraic {
            return Err(RelicError::Consistency(format!(
                "test order disagrees: inclusion says {by_sets}, alpha;beta=alpha says {algebraic}"
            )));
        }
        Ok(by_sets)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoareTriple {
    pub pre: Test,
    pub prog: ProgramAst,
    pub post: Test,
}

/// Parse `{e} prog {f}`.
pub fn parse_triple(text: &str, env: &ProgramEnv) -> Result<HoareTriple> {
    let mut c = Cursor::new(text)?;
    let pre = parse_elem_set_in(&mut c, &env.space)?;
    let mut depth = 0usize;
    let start = c.offset();
    let mut end = start;
    // The program runs up to the final `{`.
    let mut toks = 0;
    while let Some(t) = c.peek_at(toks) {
        if matches!(t, Tok::Punct("{")) && depth == 0 {
            break;
        }
        match t {
            Tok::Punct("(") => depth += 1,
            Tok::Punct(")") => depth = depth.saturating_sub(1),
            _ => {}
        }
        toks += 1;
    }
    for _ in 0..toks {
        c.bump();
        end = c.offset();
    }
    let prog_text = &text[start..end.min(text.len())];
    let prog = parse_program(prog_text, Some(env)).map_err(|e| match e {
        RelicError::Syntax(s) => RelicError::Syntax(SyntaxError::at(text, start + s.offset, s.message)),
        other => other,
    })?;
    let post = parse_elem_set_in(&mut c, &env.space)?;
    c.expect_end()?;
    let mk = |set| {
        Test::new(&env.space, set).map_err(|_| {
            RelicError::Invalid("pre- and postconditions may not contain the fail element".into())
        })
    };
    Ok(HoareTriple {
        pre: mk(pre)?,
        prog,
        post: mk(post)?,
    })
}

fn agree(what: &str, values: &[(&str, bool)]) -> Result<bool> {
    let first = values[0].1;
    if values.iter().all(|&(_, v)| v == first) {
        Ok(first)
    } else {
        let parts: Vec<String> = values.iter().map(|(n, v)| format!("{n}={v}")).collect();
        Err(RelicError::Consistency(format!("{what} characterizations disagree: {}", parts.join(", "))))
    }
}

/// Partial correctness of `(e) ρ (f)` for a denoted program.
pub fn partially_correct_rel(e: &Test, rho: &ProgramRelation, f: &Test, self_check: bool) -> Result<bool> {
    crate::space::same_space(e.space(), rho.space())?;
    crate::space::same_space(f.space(), rho.space())?;
    let states = rho.space().states();
    let definitional = e
        .truth
        .iter()
        .all(|x| rho.relation().row(x).intersection(states).is_subset(f.truth));
    if !self_check {
        return Ok(definitional);
    }
    let ep = e.to_program();
    let e_rho = ep.seq(rho)?;
    let ltrel0 = e_rho.seq(&f.to_program())? == e_rho;
    let ea = e.diagonal();
    let ea_rho = ea.compose(&rho.restrict_angelic())?;
    let angelic = ea_rho.compose(&f.diagonal())? == ea_rho;
    agree(
        "partial correctness",
        &[("definitional", definitional), ("ltrel0", ltrel0), ("angelic", angelic)],
    )
}

/// Total correctness of `(e) ρ (f)` for a denoted program.
pub fn totally_correct_rel(e: &Test, rho: &ProgramRelation, f: &Test, self_check: bool) -> Result<bool> {
    crate::space::same_space(e.space(), rho.space())?;
    crate::space::same_space(f.space(), rho.space())?;
    let fail = rho.space().require_fail()?;
    let definitional = e.truth.iter().all(|x| {
        let row = rho.relation().row(x);
        !row.contains(fail) && row.is_subset(f.truth)
    });
    if !self_check {
        return Ok(definitional);
    }
    let ed = e.diagonal();
    let fd = f.diagonal();
    let rd = rho.restrict_demonic();
    let side = ed.includes_in(&rd.diag_of_domain())?;
    let e_rho = ed.compose_demonic(&rd)?;
    let demonic = side && e_rho.compose_demonic(&fd)? == e_rho;
    let constellation = match ed.product_constellation(&rd)? {
        Some(p) => p.product_constellation(&fd)?.is_some(),
        None => false,
    };
    agree(
        "total correctness",
        &[("definitional", definitional), ("demonic", demonic), ("constellation", constellation)],
    )
}

pub fn partially_correct(t: &HoareTriple, env: &ProgramEnv) -> Result<bool> {
    partially_correct_rel(&t.pre, &denote(&t.prog, env)?, &t.post, true)
}

pub fn totally_correct(t: &HoareTriple, env: &ProgramEnv) -> Result<bool> {
    totally_correct_rel(&t.pre, &denote(&t.prog, env)?, &t.post, true)
}

/// Total correctness of `(e) ρ;τ (f)` through the composite demonic form
/// `e∗ρ^d∗τ^d∗f = e∗ρ^d∗τ^d` with `e ≤ D(ρ^d∗τ^d)`.
pub fn totally_correct_seq_composite(e: &Test, rho: &ProgramRelation, tau: &ProgramRelation, f: &Test) -> Result<bool> {
    let ed = e.diagonal();
    let inner = rho.restrict_demonic().compose_demonic(&tau.restrict_demonic())?;
    let lhs = ed.compose_demonic(&inner)?;
    Ok(ed.includes_in(&inner.diag_of_domain())? && lhs.compose_demonic(&f.diagonal())? == lhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementMode {
    /// `ρ^a ⊆ τ^a` and `ρ^d ⊑ τ^d`.
    Algebraic,
    /// Quantify over every pair of tests and transfer correctness from `τ` to `ρ`.
    Tests,
}

/// `ρ` partially refines `τ`: every partial-correctness triple of `τ` holds for `ρ`.
pub fn partially_refines(rho: &ProgramRelation, tau: &ProgramRelation, mode: RefinementMode) -> Result<bool> {
    match mode {
        RefinementMode::Algebraic => rho.restrict_angelic().includes_in(&tau.restrict_angelic()),
        RefinementMode::Tests => transfers(rho, tau, |e, p, f| partially_correct_rel(e, p, f, false)),
    }
}

/// `ρ` totally refines `τ`: every total-correctness triple of `τ` holds for `ρ`.
pub fn totally_refines(rho: &ProgramRelation, tau: &ProgramRelation, mode: RefinementMode) -> Result<bool> {
    match mode {
        RefinementMode::Algebraic => rho.restrict_demonic().refines_demonic(&tau.restrict_demonic()),
        RefinementMode::Tests => transfers(rho, tau, |e, p, f| totally_correct_rel(e, p, f, false)),
    }
}

fn transfers(
    rho: &ProgramRelation,
    tau: &ProgramRelation,
    holds: impl Fn(&Test, &ProgramRelation, &Test) -> Result<bool>,
) -> Result<bool> {
    crate::space::same_space(rho.space(), tau.space())?;
    let tests = Test::all_over(rho.space())?;
    for e in &tests {
        for f in &tests {
            if holds(e, tau, f)? && !holds(e, rho, f)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::psi1;
    use crate::syntax::{parse_env, parse_relation};

    fn env2() -> ProgramEnv {
        let env = parse_env("space X = {1,2} fail 0\na = {(1,0),(1,1),(2,2),(0,0)}\nb = {(1,1),(2,2),(0,0)}\nc = {(1,2),(2,0),(0,0)}")
            .unwrap();
        ProgramEnv::from_env(&env).unwrap()
    }

    fn atom(s: &str) -> Box<ProgramAst> {
        Box::new(ProgramAst::Atom(s.into()))
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_program("a ; b | c", None).unwrap(),
            ProgramAst::Choice(Box::new(ProgramAst::Seq(atom("a"), atom("b"))), atom("c"))
        );
        assert_eq!(
            parse_program("skip ; skip", None).unwrap(),
            ProgramAst::Seq(Box::new(ProgramAst::Skip), Box::new(ProgramAst::Skip))
        );
        assert_eq!(
            parse_program("a ; b ; c", None).unwrap(),
            ProgramAst::Seq(Box::new(ProgramAst::Seq(atom("a"), atom("b"))), atom("c"))
        );
        assert_eq!(
            parse_program("a ; (b | c)", None).unwrap(),
            ProgramAst::Seq(atom("a"), Box::new(ProgramAst::Choice(atom("b"), atom("c"))))
        );
    }

    #[test]
    fn syntax_errors_report_offsets() {
        match parse_program("a ;; b", None) {
            Err(RelicError::Syntax(e)) => assert_eq!(e.offset, 3),
            other => panic!("{other:?}"),
        }
        match parse_program("a ; zz", Some(&env2())) {
            Err(RelicError::Syntax(e)) => assert_eq!(e.offset, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn denotation() {
        let env = env2();
        assert_eq!(denote(&ProgramAst::Abort, &env).unwrap(), ProgramRelation::abort(&env.space).unwrap());
        let a = env.atoms["a"].clone();
        assert_eq!(denote(&parse_program("skip ; a", None).unwrap(), &env).unwrap(), a);
        // b is skip, so a;b composes back to a.
        let by_hand = a.relation().compose(env.atoms["b"].relation()).unwrap();
        let got = denote(&parse_program("a;b", None).unwrap(), &env).unwrap();
        assert_eq!(got.relation(), &by_hand);
        assert_eq!(got, a);
    }

    #[test]
    fn tests_as_programs() {
        let env = env2();
        let s = &env.space;
        assert_eq!(Test::new(s, ElemSet::EMPTY).unwrap().to_program(), ProgramRelation::abort(s).unwrap());
        assert_eq!(Test::new(s, s.states()).unwrap().to_program(), ProgramRelation::skip(s).unwrap());
        let one = Test::new(s, ElemSet::singleton(0)).unwrap();
        let both = Test::new(s, s.states()).unwrap();
        assert!(one.leq(&both).unwrap());
        assert!(!both.leq(&one).unwrap());
        assert!(Test::new(s, ElemSet::singleton(2)).is_err());
    }

    #[test]
    fn partial_correctness_examples() {
        let x1 = StateSpace::numbered(1, true).unwrap();
        let tt = Test::new(&x1, x1.states()).unwrap();
        let ff = Test::new(&x1, ElemSet::EMPTY).unwrap();
        let abort = ProgramRelation::abort(&x1).unwrap();
        assert!(partially_correct_rel(&tt, &abort, &ff, true).unwrap());
        let rho = ProgramRelation::new(parse_relation(&x1, "{(1,1),(1,0),(0,0)}").unwrap()).unwrap();
        assert!(partially_correct_rel(&tt, &rho, &tt, true).unwrap());

        let x2 = StateSpace::numbered(2, false).unwrap();
        let rho = psi1(&parse_relation(&x2, "{(1,2)}").unwrap()).unwrap();
        let one = Test::new(rho.space(), ElemSet::singleton(0)).unwrap();
        assert!(!partially_correct_rel(&one, &rho, &one, true).unwrap());
    }

    #[test]
    fn total_correctness_examples() {
        let x1 = StateSpace::numbered(1, true).unwrap();
        let tt = Test::new(&x1, x1.states()).unwrap();
        let abort = ProgramRelation::abort(&x1).unwrap();
        assert!(!totally_correct_rel(&tt, &abort, &tt, true).unwrap());
        let r = Relation::diagonal(&StateSpace::numbered(1, false).unwrap());
        let rho = crate::program::psi3(&r).unwrap();
        assert!(totally_correct_rel(&tt, &rho, &tt, true).unwrap());
    }

    #[test]
    fn triple_syntax() {
        let env = env2();
        let t = parse_triple("{1} a;b {1,2}", &env).unwrap();
        assert_eq!(t.pre.truth_set(), ElemSet::singleton(0));
        assert!(partially_correct(&t, &env).unwrap());
        assert!(!totally_correct(&t, &env).unwrap());
        let t = parse_triple("{2} (a | b) ; c {} ", &env).unwrap();
        assert!(!totally_correct(&t, &env).unwrap());
        assert!(parse_triple("{0} a {1}", &env).is_err());
        match parse_triple("{1} a ; ; b {1}", &env) {
            Err(RelicError::Syntax(e)) => assert_eq!(e.offset, 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refinement_examples() {
        let x1 = StateSpace::numbered(1, false).unwrap();
        let rho = psi1(&Relation::empty(&x1)).unwrap();
        let tau = ProgramRelation::skip(rho.space()).unwrap();
        for mode in [RefinementMode::Algebraic, RefinementMode::Tests] {
            assert!(partially_refines(&rho, &tau, mode).unwrap());
            assert!(!totally_refines(&rho, &tau, mode).unwrap());
            assert!(partially_refines(&tau, &tau, mode).unwrap());
            assert!(totally_refines(&tau, &tau, mode).unwrap());
        }
    }
}
