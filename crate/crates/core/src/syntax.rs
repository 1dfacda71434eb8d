//! Tokenizer shared by every textual format, plus the relation literal grammar:
//!
//! ```text
//! space X = {1,2,3} fail 0
//! a = {(1,2),(2,0),(0,0)}
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{RelicError, Result, SyntaxError};
use crate::relation::Relation;
use crate::space::{ElemSet, StateSpace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Word(String),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub offset: usize,
}

const PUNCTS: [&str; 15] = ["=>", "<=", "{", "}", "(", ")", ",", ";", "|", "=", "*", ".", "&", "<", ":"];

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(text: &str) -> std::result::Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if is_word_char(c) {
            let start = i;
            while i < bytes.len() && is_word_char(bytes[i] as char) {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Word(text[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        for p in PUNCTS {
            if text[i..].starts_with(p) {
                out.push(Token {
                    tok: Tok::Punct(p),
                    offset: i,
                });
                i += p.len();
                continue 'outer;
            }
        }
        return Err(SyntaxError::at(text, i, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

/// Cursor over a token stream with error reporting against the source text.
pub struct Cursor<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> std::result::Result<Self, SyntaxError> {
        Ok(Cursor {
            text,
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text.len(), |t| t.offset)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::at(self.text, self.offset(), msg)
    }

    pub fn error_at(&self, offset: usize, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::at(self.text, offset, msg)
    }

    pub fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Word(q)) if q == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, p: &str) -> std::result::Result<(), SyntaxError> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`")))
        }
    }

    pub fn word(&mut self) -> std::result::Result<(String, usize), SyntaxError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Word(w),
                offset,
            }) => {
                let r = (w.clone(), *offset);
                self.pos += 1;
                Ok(r)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    pub fn expect_end(&self) -> std::result::Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

fn parse_space_decl(c: &mut Cursor<'_>) -> Result<Arc<StateSpace>> {
    if !c.eat_word("space") {
        return Err(c.error("expected `space`").into());
    }
    c.word()?;
    c.expect("=")?;
    let names = parse_name_set(c)?;
    let mut names: Vec<String> = names.into_iter().map(|(n, _)| n).collect();
    let fail = if c.eat_word("fail") {
        let (f, off) = c.word()?;
        if names.contains(&f) {
            return Err(c.error_at(off, format!("fail element `{f}` also listed as a state")).into());
        }
        names.push(f);
        Some(names.len() - 1)
    } else {
        None
    };
    StateSpace::new(names, fail)
}

fn parse_name_set(c: &mut Cursor<'_>) -> Result<Vec<(String, usize)>> {
    c.expect("{")?;
    let mut out = Vec::new();
    if c.eat("}") {
        return Ok(out);
    }
    loop {
        out.push(c.word()?);
        if c.eat("}") {
            return Ok(out);
        }
        c.expect(",")?;
    }
}

fn lookup(c: &Cursor<'_>, space: &StateSpace, name: &str, off: usize) -> Result<usize> {
    space
        .index_of(name)
        .ok_or_else(|| c.error_at(off, format!("`{name}` is not an element of the space")).into())
}

fn parse_relation_in(c: &mut Cursor<'_>, space: &Arc<StateSpace>) -> Result<Relation> {
    c.expect("{")?;
    let mut r = Relation::empty(space);
    if c.eat("}") {
        return Ok(r);
    }
    loop {
        c.expect("(")?;
        let (a, oa) = c.word()?;
        c.expect(",")?;
        let (b, ob) = c.word()?;
        c.expect(")")?;
        r.insert(lookup(c, space, &a, oa)?, lookup(c, space, &b, ob)?);
        if c.eat("}") {
            return Ok(r);
        }
        c.expect(",")?;
    }
}

/// Parse `space X = {1,2,3} fail 0`.
pub fn parse_space(text: &str) -> Result<Arc<StateSpace>> {
    let mut c = Cursor::new(text)?;
    let s = parse_space_decl(&mut c)?;
    c.expect_end()?;
    Ok(s)
}

/// Parse a relation literal `{(a,b),(c,d)}` over `space`.
pub fn parse_relation(space: &Arc<StateSpace>, text: &str) -> Result<Relation> {
    let mut c = Cursor::new(text)?;
    let r = parse_relation_in(&mut c, space)?;
    c.expect_end()?;
    Ok(r)
}

/// Parse an element set literal `{a,b}`.
pub fn parse_elem_set(space: &Arc<StateSpace>, text: &str) -> Result<ElemSet> {
    let mut c = Cursor::new(text)?;
    let set = parse_elem_set_in(&mut c, space)?;
    c.expect_end()?;
    Ok(set)
}

pub(crate) fn parse_elem_set_in(c: &mut Cursor<'_>, space: &Arc<StateSpace>) -> Result<ElemSet> {
    let names = parse_name_set(c)?;
    let mut set = ElemSet::EMPTY;
    for (n, off) in names {
        set.insert(lookup(c, space, &n, off)?);
    }
    Ok(set)
}

/// A space declaration followed by named relation bindings.
#[derive(Debug, Clone)]
pub struct Env {
    pub space: Arc<StateSpace>,
    pub bindings: BTreeMap<String, Relation>,
}

impl Env {
    pub fn get(&self, name: &str) -> Result<&Relation> {
        self.bindings
            .get(name)
            .ok_or_else(|| RelicError::UnknownName(name.to_string()))
    }
}

/// Parse an environment file: `space ...` then any number of `name = {...}` lines.
pub fn parse_env(text: &str) -> Result<Env> {
    let mut c = Cursor::new(text)?;
    let space = parse_space_decl(&mut c)?;
    let mut bindings = BTreeMap::new();
    while !c.at_end() {
        let (name, off) = c.word()?;
        c.expect("=")?;
        let r = parse_relation_in(&mut c, &space)?;
        if bindings.insert(name.clone(), r).is_some() {
            return Err(c.error_at(off, format!("`{name}` bound twice")).into());
        }
    }
    Ok(Env { space, bindings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_with_fail() {
        let s = parse_space("space X = {1,2,3} fail 0").unwrap();
        assert_eq!(s.size(), 4);
        assert_eq!(s.fail(), Some(3));
        assert_eq!(s.to_string(), "space X = {1,2,3} fail 0");
        let s = parse_space("space Y = {a, b}").unwrap();
        assert_eq!(s.fail(), None);
    }

    #[test]
    fn relation_literal_round_trips() {
        let s = parse_space("space X = {1,2} fail 0").unwrap();
        let r = parse_relation(&s, "{(1,2), (2,0),(0,0)}").unwrap();
        assert_eq!(r.to_string(), "{(1,2),(2,0),(0,0)}");
        assert_eq!(parse_relation(&s, &r.to_string()).unwrap(), r);
        assert!(parse_relation(&s, "{}").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        let s = parse_space("space X = {1,2}").unwrap();
        match parse_relation(&s, "{(1,3)}") {
            Err(RelicError::Syntax(e)) => assert_eq!((e.line, e.column), (1, 5)),
            other => panic!("{other:?}"),
        }
        match parse_env("space X = {1}\na = {(1,1)\n") {
            Err(RelicError::Syntax(e)) => assert_eq!(e.line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn env_file() {
        let env = parse_env("# programs\nspace X = {1,2} fail 0\na = {(1,0),(1,1),(2,2),(0,0)}\nb = {(1,1),(2,2),(0,0)}\n").unwrap();
        assert_eq!(env.bindings.len(), 2);
        assert!(env.get("a").unwrap().is_in_ltrel0().unwrap());
        assert!(env.get("c").is_err());
        assert!(parse_env("space X = {1}\na = {}\na = {}").is_err());
    }
}
