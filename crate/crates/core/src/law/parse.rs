use crate::error::{Result, SyntaxError};
use crate::syntax::{Cursor, Tok};

use super::{Atom, Cmp, Const, Formula, Op, Term};

type PResult<T> = std::result::Result<T, SyntaxError>;

const RESERVED: [&str; 4] = ["cup", "dj", "ex", "ref"];

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut c = Cursor::new(text)?;
    if c.at_end() {
        return Err(c.error("empty formula").into());
    }
    let first = conjunction(&mut c)?;
    let formula = if c.eat("=>") {
        Formula {
            premises: first,
            conclusions: conjunction(&mut c)?,
        }
    } else {
        Formula {
            premises: Vec::new(),
            conclusions: first,
        }
    };
    c.expect_end()?;
    Ok(formula)
}

/// A single relation term, e.g. `(a * b) dj 1'`.
pub fn parse_term(text: &str) -> Result<Term> {
    let mut c = Cursor::new(text)?;
    if c.at_end() {
        return Err(c.error("empty term").into());
    }
    let t = term(&mut c)?;
    c.expect_end()?;
    Ok(t)
}

fn conjunction(c: &mut Cursor<'_>) -> PResult<Vec<Atom>> {
    let mut atoms = vec![atom(c)?];
    while c.eat("&") {
        atoms.push(atom(c)?);
    }
    Ok(atoms)
}

fn atom(c: &mut Cursor<'_>) -> PResult<Atom> {
    if matches!(c.peek(), Some(Tok::Word(w)) if w == "ex") && matches!(c.peek_at(1), Some(Tok::Punct("("))) {
        c.bump();
        c.expect("(")?;
        let t = term(c)?;
        c.expect(")")?;
        return Ok(Atom::Exists(t));
    }
    let l = term(c)?;
    let cmp = if c.eat("=") {
        Cmp::Eq
    } else if c.eat("<=") {
        Cmp::Incl
    } else if c.eat_word("ref") {
        c.expect("<=")?;
        Cmp::Refines
    } else {
        return Err(c.error("expected `=`, `<=` or `ref<=`"));
    };
    let r = term(c)?;
    Ok(Atom::Cmp(cmp, l, r))
}

fn peek_op(c: &Cursor<'_>) -> Option<Op> {
    match c.peek()? {
        Tok::Punct(";") => Some(Op::Angelic),
        Tok::Punct("*") => Some(Op::Demonic),
        Tok::Punct(".") => Some(Op::Constellation),
        Tok::Word(w) if w == "cup" => Some(Op::Union),
        Tok::Word(w) if w == "dj" => Some(Op::DemonicJoin),
        _ => None,
    }
}

fn term(c: &mut Cursor<'_>) -> PResult<Term> {
    let mut t = primary(c)?;
    let mut chain: Option<Op> = None;
    while let Some(op) = peek_op(c) {
        if chain.is_some_and(|o| o != op) {
            return Err(c.error(format!(
                "mixing `{}` and `{}` needs parentheses",
                chain.unwrap().symbol(),
                op.symbol()
            )));
        }
        chain = Some(op);
        c.bump();
        let r = primary(c)?;
        t = Term::op(op, t, r);
    }
    Ok(t)
}

fn primary(c: &mut Cursor<'_>) -> PResult<Term> {
    if c.eat("(") {
        let t = term(c)?;
        c.expect(")")?;
        return Ok(t);
    }
    let at = c.offset();
    let (w, _) = c.word().map_err(|_| c.error("expected a term"))?;
    if let Some(k) = Const::from_keyword(&w) {
        return Ok(Term::Const(k));
    }
    if RESERVED.contains(&w.as_str()) {
        return Err(c.error_at(at, format!("`{w}` is a keyword")));
    }
    if w.contains('\'') || w.starts_with(|ch: char| ch.is_ascii_digit()) {
        return Err(c.error_at(at, format!("`{w}` is not a variable name")));
    }
    Ok(Term::Var(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::RelicError;

    fn round_trip(s: &str) -> String {
        parse_formula(s).unwrap().to_string()
    }

    #[test]
    fn restricted_left_monotonicity_shape() {
        let f = parse_formula("s0 <= sn & s0 <= (sn * t) => (s0 * t) <= (sn * t)").unwrap();
        assert_eq!(f.premises.len(), 2);
        assert_eq!(f.conclusions.len(), 1);
        assert_eq!(f.variables(), ["s0", "sn", "t"]);
        assert_eq!(f.to_string(), "s0 <= sn & s0 <= (sn * t) => (s0 * t) <= (sn * t)");
    }

    #[test]
    fn single_terms() {
        assert_eq!(parse_term("(a * b) dj 1'").unwrap().to_string(), "(a * b) dj 1'");
        assert!(parse_term("a * b dj c").is_err());
        assert!(parse_term("a = b").is_err());
    }

    #[test]
    fn equation_and_existence() {
        let f = parse_formula("x cup 0e = x").unwrap();
        assert!(f.premises.is_empty());
        assert_eq!(f.conclusions[0], Atom::Cmp(Cmp::Eq, Term::op(Op::Union, Term::var("x"), Term::Const(Const::Empty)), Term::var("x")));
        let g = parse_formula("ex((x . t))").unwrap();
        assert!(matches!(g.conclusions[0], Atom::Exists(Term::Op(Op::Constellation, _, _))));
        assert_eq!(round_trip("ex(x . t)"), "ex((x . t))");
    }

    #[test]
    fn chains_are_left_associative() {
        let f = parse_formula("a ; b ; c = a ; (b ; c)").unwrap();
        assert_eq!(f.to_string(), "((a ; b) ; c) = (a ; (b ; c))");
        assert_eq!(round_trip(&f.to_string()), f.to_string());
    }

    #[test]
    fn refinement_and_constants() {
        let f = parse_formula("s ref<= t & s <= 1' => s = 1' & nabla cup Z = nabla").unwrap();
        assert!(matches!(f.premises[0], Atom::Cmp(Cmp::Refines, _, _)));
        assert!(f.uses_const(Const::Abort));
        assert_eq!(f.conclusions.len(), 2);
    }

    fn err_offset(s: &str) -> usize {
        match parse_formula(s) {
            Err(RelicError::Syntax(e)) => e.offset,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(err_offset("a ; b * c = a"), 6);
        assert_eq!(err_offset("a = "), 4);
        assert_eq!(err_offset("a < b"), 2);
        assert_eq!(err_offset("a = (b ; c"), 10);
        assert_eq!(err_offset("cup = a"), 0);
        assert_eq!(err_offset(""), 0);
    }
}
