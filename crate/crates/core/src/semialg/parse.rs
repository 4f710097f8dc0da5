use std::collections::BTreeSet;

use super::{Formula, Rel, SemialgError, SemialgebraicSet};
use crate::lex::{tokenize, Cursor, Tok};
use crate::poly::{Polynomial, Rational};

/// Orders undeclared variables: `x, y, z, w` first, then the rest
/// alphabetically with embedded numbers compared numerically (`x2 < x10`).
pub fn canonical_var_order(names: &mut [String]) {
    fn key(s: &str) -> (usize, String, u64) {
        let rank = ["x", "y", "z", "w"].iter().position(|v| *v == s).unwrap_or(4);
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let num = s[split..].parse().unwrap_or(0);
        (rank, s[..split].to_string(), num)
    }
    names.sort_by_key(|a| key(a));
}

fn lookup(c: &Cursor<'_>, vars: &[String], name: &str) -> Result<usize, SemialgError> {
    vars.iter().position(|v| v == name).ok_or_else(|| {
        let (line, col) = c.position();
        SemialgError::UnknownVariable { name: name.to_string(), line, col }
    })
}

/// Polynomial expression over `vars`: `+ - * ^`, division by constants,
/// implicit multiplication (`2x`, `3(x+1)`), parentheses.
pub fn parse_poly(c: &mut Cursor<'_>, vars: &[String]) -> Result<Polynomial, SemialgError> {
    let n = vars.len();
    let mut acc = if c.eat(&Tok::Minus) {
        -&parse_term(c, vars)?
    } else {
        c.eat(&Tok::Plus);
        parse_term(c, vars)?
    };
    loop {
        if c.eat(&Tok::Plus) {
            acc = &acc + &parse_term(c, vars)?;
        } else if c.eat(&Tok::Minus) {
            acc = &acc - &parse_term(c, vars)?;
        } else {
            break;
        }
    }
    debug_assert_eq!(acc.nvars(), n);
    Ok(acc)
}

fn starts_factor(tok: Option<&Tok>, vars: &[String]) -> bool {
    match tok {
        Some(Tok::Ident(s)) => vars.contains(s),
        Some(Tok::LParen) | Some(Tok::Int(_)) => true,
        _ => false,
    }
}

fn parse_term(c: &mut Cursor<'_>, vars: &[String]) -> Result<Polynomial, SemialgError> {
    let mut acc = parse_factor(c, vars)?;
    loop {
        if c.eat(&Tok::Star) {
            acc = &acc * &parse_factor(c, vars)?;
        } else if c.eat(&Tok::Slash) {
            let at = c.pos;
            let d = parse_factor(c, vars)?;
            if !d.is_constant() || d.is_zero() {
                c.pos = at;
                return Err(c.error("can only divide by a nonzero constant").into());
            }
            acc = acc.scale(&d.constant_term().recip());
        } else if starts_factor(c.peek(), vars) && !matches!(c.peek(), Some(Tok::Int(_))) {
            acc = &acc * &parse_factor(c, vars)?;
        } else {
            break;
        }
    }
    Ok(acc)
}

fn parse_factor(c: &mut Cursor<'_>, vars: &[String]) -> Result<Polynomial, SemialgError> {
    if c.eat(&Tok::Minus) {
        return Ok(-&parse_factor(c, vars)?);
    }
    let base = parse_base(c, vars)?;
    if c.eat(&Tok::Caret) {
        let paren = c.eat(&Tok::LParen);
        let k = match c.next() {
            Some(Tok::Int(k)) => k.clone(),
            _ => {
                c.pos -= 1;
                return Err(c.error("expected a nonnegative integer exponent").into());
            }
        };
        if paren {
            c.expect(&Tok::RParen)?;
        }
        let k: u32 = k.try_into().map_err(|_| c.error("exponent too large"))?;
        Ok(base.pow(k))
    } else {
        Ok(base)
    }
}

fn parse_base(c: &mut Cursor<'_>, vars: &[String]) -> Result<Polynomial, SemialgError> {
    let n = vars.len();
    match c.peek() {
        Some(Tok::Int(k)) => {
            c.next();
            Ok(Polynomial::constant(n, Rational::from_integer(k.clone())))
        }
        Some(Tok::Ident(name)) => {
            let i = lookup(c, vars, name)?;
            c.next();
            Ok(Polynomial::var(n, i))
        }
        Some(Tok::LParen) => {
            c.next();
            let p = parse_poly(c, vars)?;
            c.expect(&Tok::RParen)?;
            Ok(p)
        }
        Some(t) => Err(c.error(format!("expected a polynomial, found {t}")).into()),
        None => Err(c.error("expected a polynomial, found end of input").into()),
    }
}

fn parse_rel(c: &mut Cursor<'_>) -> Result<Rel, SemialgError> {
    let rel = match c.peek() {
        Some(Tok::Lt) => Rel::Lt,
        Some(Tok::Le) => Rel::Le,
        Some(Tok::Eq) => Rel::Eq,
        Some(Tok::Ge) => Rel::Ge,
        Some(Tok::Gt) => Rel::Gt,
        Some(Tok::Ne) => Rel::Ne,
        _ => return Err(c.error("expected a relation (<, <=, =, >=, >, !=)").into()),
    };
    c.next();
    Ok(rel)
}

/// Formula over `vars`, stopping before any token it cannot use (`;`,
/// `}`, end of input).
pub fn parse_formula(c: &mut Cursor<'_>, vars: &[String]) -> Result<Formula, SemialgError> {
    let mut parts = vec![parse_conj(c, vars)?];
    while c.eat(&Tok::Or) {
        parts.push(parse_conj(c, vars)?);
    }
    Ok(Formula::or(parts))
}

fn parse_conj(c: &mut Cursor<'_>, vars: &[String]) -> Result<Formula, SemialgError> {
    let mut parts = vec![parse_literal(c, vars)?];
    while c.eat(&Tok::And) {
        parts.push(parse_literal(c, vars)?);
    }
    Ok(Formula::and(parts))
}

fn parse_literal(c: &mut Cursor<'_>, vars: &[String]) -> Result<Formula, SemialgError> {
    if c.eat(&Tok::Bang) {
        return Ok(Formula::not(parse_literal(c, vars)?));
    }
    if c.peek() == Some(&Tok::LParen) {
        // `(x+1)^2 > 0` is an atom, `(x > 0 || y > 0)` a group
        let start = c.pos;
        let atom_err = match parse_atom(c, vars) {
            Ok(a) => return Ok(a),
            Err(e) => (c.pos, e),
        };
        c.pos = start;
        c.next();
        return match parse_formula(c, vars).and_then(|f| {
            c.expect(&Tok::RParen)?;
            Ok(f)
        }) {
            Ok(f) => Ok(f),
            Err(group_err) => {
                if matches!(group_err, SemialgError::UnknownVariable { .. }) {
                    Err(group_err)
                } else {
                    Err(atom_err.1)
                }
            }
        };
    }
    parse_atom(c, vars)
}

fn parse_atom(c: &mut Cursor<'_>, vars: &[String]) -> Result<Formula, SemialgError> {
    let lhs = parse_poly(c, vars)?;
    let rel = parse_rel(c)?;
    let rhs = parse_poly(c, vars)?;
    Ok(Formula::atom(&lhs - &rhs, rel))
}

/// Parses `vars a, b;` if present.
pub(crate) fn parse_vars_header(c: &mut Cursor<'_>) -> Result<Option<Vec<String>>, SemialgError> {
    if !matches!(c.peek(), Some(Tok::Ident(s)) if s == "vars") {
        return Ok(None);
    }
    c.next();
    let mut names = vec![c.expect_ident()?.to_string()];
    while c.eat(&Tok::Comma) {
        names.push(c.expect_ident()?.to_string());
    }
    c.expect(&Tok::Semi)?;
    let distinct: BTreeSet<&String> = names.iter().collect();
    if distinct.len() != names.len() {
        return Err(c.error("duplicate variable in header").into());
    }
    Ok(Some(names))
}

pub(crate) fn parse_set(text: &str) -> Result<SemialgebraicSet, SemialgError> {
    let (toks, end) = tokenize(text)?;
    let mut c = Cursor::new(&toks, end);
    let vars = match parse_vars_header(&mut c)? {
        Some(v) => v,
        None => {
            let mut seen: Vec<String> = toks
                .iter()
                .filter_map(|t| match &t.tok {
                    Tok::Ident(s) => Some(s.clone()),
                    _ => None,
                })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            canonical_var_order(&mut seen);
            seen
        }
    };
    finish(&mut c, vars)
}

pub(crate) fn parse_set_with_vars(
    text: &str,
    vars: &[String],
) -> Result<SemialgebraicSet, SemialgError> {
    let (toks, end) = tokenize(text)?;
    let mut c = Cursor::new(&toks, end);
    finish(&mut c, vars.to_vec())
}

/// A whole string as one polynomial over `vars`.
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial, SemialgError> {
    let (toks, end) = tokenize(text)?;
    let mut c = Cursor::new(&toks, end);
    let f = parse_poly(&mut c, vars)?;
    if !c.is_done() {
        return Err(c.error("unexpected input after polynomial").into());
    }
    Ok(f)
}

fn finish(c: &mut Cursor<'_>, vars: Vec<String>) -> Result<SemialgebraicSet, SemialgError> {
    let f = parse_formula(c, &vars)?;
    c.eat(&Tok::Semi);
    if !c.is_done() {
        return Err(c.error("unexpected input after formula").into());
    }
    Ok(SemialgebraicSet::new(vars, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qi;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn poly(src: &str, vars: &[&str]) -> Polynomial {
        parse_polynomial(src, &names(vars)).unwrap()
    }

    #[test]
    fn expressions() {
        let p = poly("(x + 1)^2 - 2x - 1/2*y", &["x", "y"]);
        assert_eq!(p.to_string(), "x1^2 - 1/2*x2 + 1");
        assert_eq!(poly("-x^2", &["x"]).coefficient(&[2]), qi(-1));
        assert_eq!(poly("x*-y", &["x", "y"]).coefficient(&[1, 1]), qi(-1));
        assert_eq!(poly("3(x - 1)", &["x"]).coefficient(&[0]), qi(-3));
        assert!(parse_polynomial("x + 1 = 0", &names(&["x"])).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = "x > 0 && q < 1".parse::<SemialgebraicSet>().err();
        assert!(err.is_none(), "undeclared names are collected");
        let err = "vars x, y; x > 0 && q < 1".parse::<SemialgebraicSet>().unwrap_err();
        assert_eq!(err, SemialgError::UnknownVariable { name: "q".into(), line: 1, col: 21 });
        let err = "vars x; x >".parse::<SemialgebraicSet>().unwrap_err();
        assert!(matches!(err, SemialgError::Syntax(_)));
        let err = "vars x; x / x > 1".parse::<SemialgebraicSet>().unwrap_err();
        assert!(err.to_string().contains("divide"));
    }

    #[test]
    fn groups_versus_parenthesized_polynomials() {
        let a: SemialgebraicSet = "(x + 1)^2 > 0".parse().unwrap();
        assert!(matches!(a.formula(), Formula::Atom(_)));
        let b: SemialgebraicSet = "(x > 0 || y > 0) && x < 1".parse().unwrap();
        assert!(matches!(b.formula(), Formula::And(v) if matches!(v[0], Formula::Or(_))));
    }

    #[test]
    fn canonical_order() {
        let mut v = names(&["b", "y", "x10", "x2", "x"]);
        canonical_var_order(&mut v);
        assert_eq!(v, names(&["x", "y", "b", "x2", "x10"]));
    }

    #[test]
    fn print_round_trip() {
        for src in [
            "x^3 - y^2 = 0",
            "x > 0 && !(y = 0)",
            "vars x, y, z; x^3 - y^2 - z^2 = 0 && (x > 1 || y <= -2)",
            "!(!(x != 0)) || y < 1/3",
        ] {
            let s: SemialgebraicSet = src.parse().unwrap();
            let again: SemialgebraicSet = s.to_string().parse().unwrap();
            assert_eq!(s, again, "{src} -> {s}");
        }
    }
}
