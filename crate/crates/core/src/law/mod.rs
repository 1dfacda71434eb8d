//! Terms, quasi-equations and a validity checker over finite carriers.
//!
//! Grammar:
//!
//! ```text
//! formula := conj ( '=>' conj )?
//! conj    := atom ( '&' atom )*
//! atom    := 'ex' '(' term ')' | term ( '=' | '<=' | 'ref' '<=' ) term
//! term    := primary ( op primary )*          one operator per chain, left-assoc
//! op      := ';' | '*' | '.' | 'cup' | 'dj'
//! primary := '0e' | '1'' | 'nabla' | 'Z' | name | '(' term ')'
//! ```

mod check;
mod parse;
mod presets;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::RelicError;

pub use check::{check_validity, eval_term, CheckMode, Counterexample, Domain, Verdict};
pub use parse::{parse_formula, parse_term};
pub use presets::{preset_suite, preset_suites, Preset, PRESET_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Const {
    /// `0e`, the empty relation.
    Empty,
    /// `1'`
    Identity,
    /// `nabla`, the full relation.
    Full,
    /// `Z`, the abort program `X×{0}`, on fail-extended carriers only.
    Abort,
}

impl Const {
    pub fn keyword(self) -> &'static str {
        match self {
            Const::Empty => "0e",
            Const::Identity => "1'",
            Const::Full => "nabla",
            Const::Abort => "Z",
        }
    }

    fn from_keyword(w: &str) -> Option<Const> {
        [Const::Empty, Const::Identity, Const::Full, Const::Abort]
            .into_iter()
            .find(|c| c.keyword() == w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Op {
    Angelic,
    Demonic,
    Constellation,
    Union,
    DemonicJoin,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Angelic => ";",
            Op::Demonic => "*",
            Op::Constellation => ".",
            Op::Union => "cup",
            Op::DemonicJoin => "dj",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Const),
    Op(Op, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.into())
    }

    pub fn op(op: Op, l: Term, r: Term) -> Term {
        Term::Op(op, Box::new(l), Box::new(r))
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) if !out.contains(v) => out.push(v.clone()),
            Term::Op(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            _ => {}
        }
    }

    fn uses_const(&self, c: Const) -> bool {
        match self {
            Term::Const(k) => *k == c,
            Term::Op(_, l, r) => l.uses_const(c) || r.uses_const(c),
            Term::Var(_) => false,
        }
    }

    /// Write with parentheses around every operator node nested inside another.
    fn write(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(c.keyword()),
            Term::Op(op, l, r) => {
                if nested {
                    f.write_str("(")?;
                }
                l.write(f, true)?;
                write!(f, " {} ", op.symbol())?;
                r.write(f, true)?;
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Cmp {
    /// `=`
    Eq,
    /// `<=`, inclusion.
    Incl,
    /// `ref<=`, demonic refinement.
    Refines,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Eq => "=",
            Cmp::Incl => "<=",
            Cmp::Refines => "ref<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Cmp(Cmp, Term, Term),
    Exists(Term),
}

impl fmt::Display for Atom {
    /// Operator sides are parenthesized so the printed atom reads unambiguously.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Cmp(c, l, r) => {
                l.write(f, true)?;
                write!(f, " {} ", c.symbol())?;
                r.write(f, true)
            }
            Atom::Exists(t) => {
                f.write_str("ex(")?;
                t.write(f, true)?;
                f.write_str(")")
            }
        }
    }
}

/// `premises => conclusions`; an empty premise list is a plain equation or inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    pub premises: Vec<Atom>,
    pub conclusions: Vec<Atom>,
}

impl Formula {
    /// Variables in order of first appearance, premises first.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.premises.iter().chain(&self.conclusions) {
            match a {
                Atom::Cmp(_, l, r) => {
                    l.collect_vars(&mut out);
                    r.collect_vars(&mut out);
                }
                Atom::Exists(t) => t.collect_vars(&mut out),
            }
        }
        out
    }

    pub fn uses_const(&self, c: Const) -> bool {
        self.premises.iter().chain(&self.conclusions).any(|a| match a {
            Atom::Cmp(_, l, r) => l.uses_const(c) || r.uses_const(c),
            Atom::Exists(t) => t.uses_const(c),
        })
    }
}

fn join_atoms(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            f.write_str(" & ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.premises.is_empty() {
            join_atoms(f, &self.premises)?;
            f.write_str(" => ")?;
        }
        join_atoms(f, &self.conclusions)
    }
}

impl FromStr for Formula {
    type Err = RelicError;

    fn from_str(s: &str) -> Result<Self, RelicError> {
        parse_formula(s)
    }
}
