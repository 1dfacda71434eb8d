use crate::error::{RelicError, Result, SyntaxError};
use crate::syntax::Cursor;

use super::OrderedAlgebra;

fn lookup(c: &Cursor<'_>, names: &[String], name: &str, off: usize) -> std::result::Result<usize, SyntaxError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| c.error_at(off, format!("unknown element `{name}`")))
}

/// Parse the line-oriented algebra format.
pub fn parse_algebra(text: &str) -> Result<OrderedAlgebra> {
    let mut names: Option<Vec<String>> = None;
    let mut product: Vec<Option<Option<usize>>> = Vec::new();
    let mut leq: Vec<u64> = Vec::new();
    let mut identity = None;
    let mut zero = None;
    for (lineno, line) in text.split('\n').enumerate() {
        let shift = |e: SyntaxError| RelicError::Syntax(e.shifted(lineno));
        let mut c = Cursor::new(line).map_err(shift)?;
        if c.at_end() {
            continue;
        }
        let (kw, kw_off) = c.word().map_err(shift)?;
        if kw != "elements" && names.is_none() {
            return Err(shift(c.error_at(kw_off, "the first declaration must be `elements`")));
        }
        match kw.as_str() {
            "elements" => {
                if names.is_some() {
                    return Err(shift(c.error_at(kw_off, "`elements` declared twice")));
                }
                let mut ns: Vec<String> = Vec::new();
                while !c.at_end() {
                    let (w, off) = c.word().map_err(shift)?;
                    if ns.contains(&w) {
                        return Err(shift(c.error_at(off, format!("duplicate element `{w}`"))));
                    }
                    ns.push(w);
                }
                if ns.is_empty() || ns.len() > 64 {
                    return Err(shift(c.error_at(kw_off, "between 1 and 64 elements are required")));
                }
                let n = ns.len();
                product = vec![None; n * n];
                leq = (0..n).map(|a| 1u64 << a).collect();
                names = Some(ns);
            }
            "order" => {
                let ns = names.as_ref().unwrap();
                while !c.at_end() {
                    let (a, oa) = c.word().map_err(shift)?;
                    c.expect("<=").map_err(shift)?;
                    let (b, ob) = c.word().map_err(shift)?;
                    let a = lookup(&c, ns, &a, oa).map_err(shift)?;
                    let b = lookup(&c, ns, &b, ob).map_err(shift)?;
                    leq[a] |= 1 << b;
                }
            }
            "prod" => {
                let ns = names.as_ref().unwrap();
                let (a, oa) = c.word().map_err(shift)?;
                let (b, ob) = c.word().map_err(shift)?;
                c.expect("=").map_err(shift)?;
                let (v, ov) = c.word().map_err(shift)?;
                c.expect_end().map_err(shift)?;
                let a = lookup(&c, ns, &a, oa).map_err(shift)?;
                let b = lookup(&c, ns, &b, ob).map_err(shift)?;
                let v = if v == "undef" {
                    None
                } else {
                    Some(lookup(&c, ns, &v, ov).map_err(shift)?)
                };
                let cell = &mut product[a * ns.len() + b];
                if cell.is_some() {
                    return Err(shift(c.error_at(oa, format!("duplicate product cell {} {}", ns[a], ns[b]))));
                }
                *cell = Some(v);
            }
            "identity" | "zero" => {
                let ns = names.as_ref().unwrap();
                let (v, ov) = c.word().map_err(shift)?;
                c.expect_end().map_err(shift)?;
                let v = lookup(&c, ns, &v, ov).map_err(shift)?;
                let slot = if kw == "identity" { &mut identity } else { &mut zero };
                if slot.is_some() {
                    return Err(shift(c.error_at(kw_off, format!("`{kw}` declared twice"))));
                }
                *slot = Some(v);
            }
            other => {
                return Err(shift(c.error_at(kw_off, format!("unknown declaration `{other}`"))));
            }
        }
    }
    let names = names.ok_or_else(|| RelicError::Invalid("missing `elements` declaration".into()))?;
    let n = names.len();
    let mut table = Vec::with_capacity(n * n);
    for (i, cell) in product.into_iter().enumerate() {
        match cell {
            Some(v) => table.push(v),
            None => {
                return Err(RelicError::Invalid(format!(
                    "missing product cell {} {}",
                    names[i / n],
                    names[i % n]
                )))
            }
        }
    }
    OrderedAlgebra::new(names, table, leq, identity, zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_tables() {
        let a = parse_algebra("# partial\nelements a b\nprod a a = undef\nprod a b = b\nprod b a = undef\nprod b b = b\n").unwrap();
        assert!(!a.is_total());
        assert_eq!(a.mul(0, 1), Some(1));
        assert_eq!(a.mul(0, 0), None);
        assert!(a.is_discrete());
    }

    #[test]
    fn reports_positions() {
        let text = "elements a b\nprod a a = a\nprod a a = b\n";
        match parse_algebra(text) {
            Err(RelicError::Syntax(e)) => assert_eq!((e.line, e.column), (3, 6)),
            other => panic!("{other:?}"),
        }
        match parse_algebra("elements a\nprod a c = a\n") {
            Err(RelicError::Syntax(e)) => assert_eq!((e.line, e.column), (2, 8)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_algebra("elements a b\nprod a a = a\n"), Err(RelicError::Invalid(_))));
    }

    #[test]
    fn non_transitive_order_is_rejected() {
        let mut text = String::from("elements a b c\norder a<=b b<=c\n");
        for x in ["a", "b", "c"] {
            for y in ["a", "b", "c"] {
                text.push_str(&format!("prod {x} {y} = a\n"));
            }
        }
        assert!(parse_algebra(&text).is_err());
        let fixed = text.replace("b<=c", "b<=c a<=c");
        assert!(parse_algebra(&fixed).is_ok());
    }
}
