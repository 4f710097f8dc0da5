//! The script language.
//!
//! ```text
//! vars x, y;
//! set cusp = x^3 - y^2 = 0;
//! point o = (0, 0);
//! map phi = (x, y + x^2);
//! strat W { S0: x = 0 && y = 0; S2: !(x = 0 && y = 0); }
//! cone cusp p=o y=(1, 0);
//! cone-scan cusp p=0 grid=64;
//! ```
//!
//! Statements end with `;` (a `strat` block ends with `}`, the `;` after
//! its last stratum is optional). Commands take positional names followed
//! by `key=value` options; a value is a name, a rational or a parenthesised
//! tuple. `p=0` is the origin.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::cone::Engine;
use crate::lex::{tokenize, Cursor, Spanned, SyntaxError, Tok};
use crate::poly::{PolyMap, Rational};
use crate::semialg::{parse_formula, parse_poly, SemialgError, SemialgebraicSet};
use crate::strat::Stratification;

use super::ReportError;

/// A named sample problem built into the tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    Surface3d,
    Cusp,
}

impl Example {
    pub fn parse(s: &str) -> Option<Example> {
        match s {
            "surface3d" => Some(Example::Surface3d),
            "cusp" => Some(Example::Cusp),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Example::Surface3d => "surface3d",
            Example::Cusp => "cusp",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommandKind {
    Cone { set: String, p: Vec<Rational>, y: Vec<Rational>, engines: Option<Vec<Engine>> },
    ConeScan { set: String, p: Vec<Rational>, grid: Option<usize>, engines: Option<Vec<Engine>> },
    ConeExact { set: String, p: Vec<Rational> },
    InducedStrata { strat: String, p: Vec<Rational>, grid: Option<usize> },
    Whitney { strat: String, pair: Option<(usize, usize)>, seeds: Option<Vec<u64>> },
    Risometry { map: String, pairs: Option<usize> },
    Lift { map: String, from: String, to: String, grid: Option<usize> },
    EqualCones { x: String, y: String, p: Vec<Rational>, map: Option<String>, grid: Option<usize> },
    Dims { strat: String },
    Repro { example: Example },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Command {
    pub line: usize,
    /// Source text of the statement, whitespace-normalized.
    pub text: String,
    pub kind: CommandKind,
}

/// A parsed script. Names are resolved while parsing, so every command
/// refers to something declared above it.
#[derive(Clone, Debug, Default)]
pub struct Script {
    pub vars: Vec<String>,
    pub sets: BTreeMap<String, SemialgebraicSet>,
    pub points: BTreeMap<String, Vec<Rational>>,
    pub maps: BTreeMap<String, PolyMap>,
    pub strats: BTreeMap<String, Stratification>,
    pub commands: Vec<Command>,
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Name(String),
    Number(Rational),
    Tuple(Vec<Value>),
}

const COMMANDS: &[&str] = &[
    "cone",
    "cone-scan",
    "cone-exact",
    "induced-strata",
    "whitney",
    "risometry",
    "lift",
    "equal-cones",
    "dims",
    "repro-example",
];

struct Parser<'a> {
    c: Cursor<'a>,
    toks: &'a [Spanned],
    src: &'a str,
    script: Script,
}

fn err_at(line: usize, col: usize, message: impl Into<String>) -> ReportError {
    ReportError::Parse(SemialgError::Syntax(SyntaxError { line, col, message: message.into() }))
}

impl<'a> Parser<'a> {
    fn here(&self) -> (usize, usize) {
        self.c.position()
    }

    fn error(&self, message: impl Into<String>) -> ReportError {
        ReportError::Parse(SemialgError::Syntax(self.c.error(message)))
    }

    fn require_vars(&self) -> Result<(), ReportError> {
        if self.script.vars.is_empty() {
            Err(self.error("declare `vars` before sets, points, maps and stratifications"))
        } else {
            Ok(())
        }
    }

    fn fresh_name(&mut self) -> Result<String, ReportError> {
        let (line, col) = self.here();
        let name = self.c.expect_ident().map_err(SemialgError::from)?.to_string();
        let s = &self.script;
        let taken = s.sets.contains_key(&name)
            || s.points.contains_key(&name)
            || s.maps.contains_key(&name)
            || s.strats.contains_key(&name);
        if taken || s.vars.contains(&name) {
            return Err(err_at(line, col, format!("`{name}` is already declared")));
        }
        Ok(name)
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), ReportError> {
        self.c.expect(tok).map_err(|e| ReportError::Parse(e.into()))
    }

    fn rational(&mut self) -> Result<Rational, ReportError> {
        let neg = self.c.eat(&Tok::Minus);
        let num = match self.c.next() {
            Some(Tok::Int(n)) => n.clone(),
            _ => {
                self.c.pos = self.c.pos.saturating_sub(1);
                return Err(self.error("expected a number"));
            }
        };
        let mut r = Rational::from_integer(num);
        if self.c.eat(&Tok::Slash) {
            match self.c.next() {
                Some(Tok::Int(d)) if !d.is_zero() => r /= Rational::from_integer(d.clone()),
                _ => return Err(self.error("expected a nonzero denominator")),
            }
        }
        Ok(if neg { -r } else { r })
    }

    fn value(&mut self) -> Result<Value, ReportError> {
        match self.c.peek() {
            Some(Tok::LParen) => {
                self.c.next();
                let mut items = vec![self.value()?];
                while self.c.eat(&Tok::Comma) {
                    items.push(self.value()?);
                }
                self.expect(&Tok::RParen)?;
                Ok(Value::Tuple(items))
            }
            Some(Tok::Ident(s)) => {
                self.c.next();
                Ok(Value::Name(s.clone()))
            }
            _ => Ok(Value::Number(self.rational()?)),
        }
    }

    fn point_literal(&mut self) -> Result<Vec<Rational>, ReportError> {
        self.expect(&Tok::LParen)?;
        let mut v = vec![self.rational()?];
        while self.c.eat(&Tok::Comma) {
            v.push(self.rational()?);
        }
        self.expect(&Tok::RParen)?;
        self.dimension(v)
    }

    fn dimension(&self, v: Vec<Rational>) -> Result<Vec<Rational>, ReportError> {
        if v.len() != self.script.vars.len() {
            return Err(self.error(format!(
                "expected {} coordinates, found {}",
                self.script.vars.len(),
                v.len()
            )));
        }
        Ok(v)
    }

    fn statement(&mut self) -> Result<(), ReportError> {
        let start = self.c.pos;
        let (line, col) = self.here();
        let word = self.c.expect_ident().map_err(SemialgError::from)?.to_string();
        match word.as_str() {
            "vars" => {
                if !self.script.vars.is_empty() {
                    return Err(err_at(line, col, "`vars` declared twice"));
                }
                self.c.pos = start;
                let vars = crate::semialg::parse_vars_header(&mut self.c)?
                    .expect("statement starts with `vars`");
                self.script.vars = vars;
            }
            "set" => {
                self.require_vars()?;
                let name = self.fresh_name()?;
                self.expect(&Tok::Eq)?;
                let f = parse_formula(&mut self.c, &self.script.vars)?;
                self.expect(&Tok::Semi)?;
                self.script.sets.insert(name, SemialgebraicSet::new(self.script.vars.clone(), f));
            }
            "point" => {
                self.require_vars()?;
                let name = self.fresh_name()?;
                self.expect(&Tok::Eq)?;
                let p = self.point_literal()?;
                self.expect(&Tok::Semi)?;
                self.script.points.insert(name, p);
            }
            "map" => {
                self.require_vars()?;
                let name = self.fresh_name()?;
                self.expect(&Tok::Eq)?;
                self.expect(&Tok::LParen)?;
                let mut comps = vec![parse_poly(&mut self.c, &self.script.vars)?];
                while self.c.eat(&Tok::Comma) {
                    comps.push(parse_poly(&mut self.c, &self.script.vars)?);
                }
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Semi)?;
                let map = PolyMap::new(comps)
                    .map_err(|_| err_at(line, col, "a map needs one component per variable"))?;
                self.script.maps.insert(name, map);
            }
            "strat" => {
                self.require_vars()?;
                let name = self.fresh_name()?;
                self.expect(&Tok::LBrace)?;
                let n = self.script.vars.len();
                let mut parts: Vec<(usize, SemialgebraicSet)> = Vec::new();
                while !self.c.eat(&Tok::RBrace) {
                    let (l, cl) = self.here();
                    let label = self.c.expect_ident().map_err(SemialgError::from)?.to_string();
                    let index = label
                        .strip_prefix('S')
                        .and_then(|d| d.parse::<usize>().ok())
                        .filter(|&i| i <= n)
                        .ok_or_else(|| err_at(l, cl, format!("expected a stratum label S0..S{n}, found `{label}`")))?;
                    if parts.iter().any(|(i, _)| *i == index) {
                        return Err(err_at(l, cl, format!("stratum {label} given twice")));
                    }
                    self.expect(&Tok::Colon)?;
                    let f = parse_formula(&mut self.c, &self.script.vars)?;
                    if self.c.peek() != Some(&Tok::RBrace) {
                        self.expect(&Tok::Semi)?;
                    }
                    parts.push((index, SemialgebraicSet::new(self.script.vars.clone(), f)));
                }
                self.c.eat(&Tok::Semi);
                let s = Stratification::from_indexed(&self.script.vars, parts)?;
                self.script.strats.insert(name, s);
            }
            w if COMMANDS.contains(&w) => {
                let kind = self.command(w, line, col)?;
                let from = self.toks[start].offset;
                let to = self.toks[self.c.pos - 1].offset;
                let text = self.src[from..to].split_whitespace().collect::<Vec<_>>().join(" ");
                self.script.commands.push(Command { line, text, kind });
            }
            other => return Err(err_at(line, col, format!("unknown statement `{other}`"))),
        }
        Ok(())
    }

    fn positional(&mut self) -> Vec<(String, (usize, usize))> {
        let mut out = Vec::new();
        while let (Some(Tok::Ident(s)), next) = (self.c.peek(), self.c.peek_at(1)) {
            if next == Some(&Tok::Eq) {
                break;
            }
            let at = self.here();
            self.c.next();
            out.push((s.clone(), at));
        }
        out
    }

    fn options(&mut self) -> Result<BTreeMap<String, (Value, (usize, usize))>, ReportError> {
        let mut out = BTreeMap::new();
        while !self.c.eat(&Tok::Semi) {
            let at = self.here();
            let key = self.c.expect_ident().map_err(SemialgError::from)?.to_string();
            self.expect(&Tok::Eq)?;
            let v = self.value()?;
            if out.insert(key.clone(), (v, at)).is_some() {
                return Err(err_at(at.0, at.1, format!("option `{key}` given twice")));
            }
        }
        Ok(out)
    }

    fn command(&mut self, word: &str, line: usize, col: usize) -> Result<CommandKind, ReportError> {
        let names = self.positional();
        let mut opts = self.options()?;
        let arity = |k: usize| -> Result<(), ReportError> {
            if names.len() != k {
                Err(err_at(line, col, format!("`{word}` takes {k} name(s), found {}", names.len())))
            } else {
                Ok(())
            }
        };
        let kind = match word {
            "cone" => {
                arity(1)?;
                CommandKind::Cone {
                    set: self.resolve_set(&names[0])?,
                    p: self.point_opt(&mut opts, "p", line, col)?,
                    y: self.vector_opt(&mut opts, "y", line, col)?,
                    engines: self.engines_opt(&mut opts)?,
                }
            }
            "cone-scan" => {
                arity(1)?;
                CommandKind::ConeScan {
                    set: self.resolve_set(&names[0])?,
                    p: self.point_opt(&mut opts, "p", line, col)?,
                    grid: self.usize_opt(&mut opts, "grid")?,
                    engines: self.engines_opt(&mut opts)?,
                }
            }
            "cone-exact" => {
                arity(1)?;
                CommandKind::ConeExact {
                    set: self.resolve_set(&names[0])?,
                    p: self.point_opt(&mut opts, "p", line, col)?,
                }
            }
            "induced-strata" => {
                arity(1)?;
                CommandKind::InducedStrata {
                    strat: self.resolve_strat(&names[0])?,
                    p: self.point_opt(&mut opts, "p", line, col)?,
                    grid: self.usize_opt(&mut opts, "grid")?,
                }
            }
            "whitney" => {
                arity(1)?;
                let pair = match opts.remove("pair") {
                    None => None,
                    Some((Value::Tuple(v), at)) if v.len() == 2 => {
                        let i = as_usize(&v[0]).ok_or_else(|| err_at(at.0, at.1, "bad stratum index"))?;
                        let j = as_usize(&v[1]).ok_or_else(|| err_at(at.0, at.1, "bad stratum index"))?;
                        Some((i, j))
                    }
                    Some((_, at)) => return Err(err_at(at.0, at.1, "`pair` must look like (i, j)")),
                };
                let seeds = match opts.remove("seeds") {
                    None => None,
                    Some((v, at)) => {
                        let items = match v {
                            Value::Tuple(items) => items,
                            single => vec![single],
                        };
                        let seeds: Option<Vec<u64>> = items.iter().map(|x| as_usize(x).map(|s| s as u64)).collect();
                        Some(seeds.ok_or_else(|| err_at(at.0, at.1, "seeds must be nonnegative integers"))?)
                    }
                };
                CommandKind::Whitney { strat: self.resolve_strat(&names[0])?, pair, seeds }
            }
            "risometry" => {
                arity(1)?;
                CommandKind::Risometry {
                    map: self.resolve_map(&names[0])?,
                    pairs: self.usize_opt(&mut opts, "pairs")?,
                }
            }
            "lift" => {
                arity(1)?;
                CommandKind::Lift {
                    map: self.resolve_map(&names[0])?,
                    from: self.set_opt(&mut opts, "from", line, col)?,
                    to: self.set_opt(&mut opts, "to", line, col)?,
                    grid: self.usize_opt(&mut opts, "grid")?,
                }
            }
            "equal-cones" => {
                arity(2)?;
                let map = match opts.remove("map") {
                    None => None,
                    Some((Value::Name(m), at)) => Some(self.resolve_map(&(m, at))?),
                    Some((_, at)) => return Err(err_at(at.0, at.1, "`map` must name a map")),
                };
                CommandKind::EqualCones {
                    x: self.resolve_set(&names[0])?,
                    y: self.resolve_set(&names[1])?,
                    p: self.point_opt(&mut opts, "p", line, col)?,
                    map,
                    grid: self.usize_opt(&mut opts, "grid")?,
                }
            }
            "dims" => {
                arity(1)?;
                CommandKind::Dims { strat: self.resolve_strat(&names[0])? }
            }
            "repro-example" => {
                arity(1)?;
                let (name, at) = &names[0];
                let example = Example::parse(name)
                    .ok_or_else(|| err_at(at.0, at.1, format!("unknown example `{name}` (surface3d, cusp)")))?;
                CommandKind::Repro { example }
            }
            _ => unreachable!("checked against COMMANDS"),
        };
        if let Some((key, (_, at))) = opts.into_iter().next() {
            return Err(err_at(at.0, at.1, format!("`{word}` has no option `{key}`")));
        }
        Ok(kind)
    }

    fn resolve_set(&self, (name, at): &(String, (usize, usize))) -> Result<String, ReportError> {
        if self.script.sets.contains_key(name) {
            Ok(name.clone())
        } else {
            Err(err_at(at.0, at.1, format!("unknown set `{name}`")))
        }
    }

    fn resolve_strat(&self, (name, at): &(String, (usize, usize))) -> Result<String, ReportError> {
        if self.script.strats.contains_key(name) {
            Ok(name.clone())
        } else {
            Err(err_at(at.0, at.1, format!("unknown stratification `{name}`")))
        }
    }

    fn resolve_map(&self, (name, at): &(String, (usize, usize))) -> Result<String, ReportError> {
        if self.script.maps.contains_key(name) {
            Ok(name.clone())
        } else {
            Err(err_at(at.0, at.1, format!("unknown map `{name}`")))
        }
    }

    fn set_opt(
        &self,
        opts: &mut BTreeMap<String, (Value, (usize, usize))>,
        key: &str,
        line: usize,
        col: usize,
    ) -> Result<String, ReportError> {
        match opts.remove(key) {
            Some((Value::Name(n), at)) => self.resolve_set(&(n, at)),
            Some((_, at)) => Err(err_at(at.0, at.1, format!("`{key}` must name a set"))),
            None => Err(err_at(line, col, format!("missing option `{key}`"))),
        }
    }

    /// `p=NAME`, `p=0` or `p=(..)`; the origin when absent.
    fn point_opt(
        &self,
        opts: &mut BTreeMap<String, (Value, (usize, usize))>,
        key: &str,
        _line: usize,
        _col: usize,
    ) -> Result<Vec<Rational>, ReportError> {
        let n = self.script.vars.len();
        match opts.remove(key) {
            None => Ok(vec![Rational::zero(); n]),
            Some((Value::Number(z), _)) if z.is_zero() => Ok(vec![Rational::zero(); n]),
            Some((Value::Name(name), at)) => self
                .script
                .points
                .get(&name)
                .cloned()
                .ok_or_else(|| err_at(at.0, at.1, format!("unknown point `{name}`"))),
            Some((v, at)) => tuple_of_numbers(&v, n).ok_or_else(|| err_at(at.0, at.1, format!("`{key}` must be a point"))),
        }
    }

    fn vector_opt(
        &self,
        opts: &mut BTreeMap<String, (Value, (usize, usize))>,
        key: &str,
        line: usize,
        col: usize,
    ) -> Result<Vec<Rational>, ReportError> {
        let n = self.script.vars.len();
        match opts.remove(key) {
            None => Err(err_at(line, col, format!("missing option `{key}`"))),
            Some((Value::Name(name), at)) => self
                .script
                .points
                .get(&name)
                .cloned()
                .ok_or_else(|| err_at(at.0, at.1, format!("unknown point `{name}`"))),
            Some((Value::Number(z), _)) if z.is_zero() => Ok(vec![Rational::zero(); n]),
            Some((v, at)) => {
                tuple_of_numbers(&v, n).ok_or_else(|| err_at(at.0, at.1, format!("`{key}` must have {n} coordinates")))
            }
        }
    }

    fn usize_opt(
        &self,
        opts: &mut BTreeMap<String, (Value, (usize, usize))>,
        key: &str,
    ) -> Result<Option<usize>, ReportError> {
        match opts.remove(key) {
            None => Ok(None),
            Some((v, at)) => as_usize(&v)
                .filter(|&k| k > 0)
                .map(Some)
                .ok_or_else(|| err_at(at.0, at.1, format!("`{key}` must be a positive integer"))),
        }
    }

    fn engines_opt(
        &self,
        opts: &mut BTreeMap<String, (Value, (usize, usize))>,
    ) -> Result<Option<Vec<Engine>>, ReportError> {
        let Some((v, at)) = opts.remove("engines") else {
            return Ok(None);
        };
        let items = match v {
            Value::Tuple(items) => items,
            single => vec![single],
        };
        items
            .iter()
            .map(|i| match i {
                Value::Name(n) => Engine::parse(n),
                _ => None,
            })
            .collect::<Option<Vec<Engine>>>()
            .map(Some)
            .ok_or_else(|| err_at(at.0, at.1, "unknown engine"))
    }
}

fn as_usize(v: &Value) -> Option<usize> {
    match v {
        Value::Number(r) if r.is_integer() && *r >= Rational::zero() => r.to_integer().try_into().ok(),
        _ => None,
    }
}

fn tuple_of_numbers(v: &Value, n: usize) -> Option<Vec<Rational>> {
    match v {
        Value::Tuple(items) if items.len() == n => items
            .iter()
            .map(|i| match i {
                Value::Number(r) => Some(r.clone()),
                _ => None,
            })
            .collect(),
        Value::Number(r) if n == 1 => Some(vec![r.clone()]),
        _ => None,
    }
}

/// Parses a script. The first error aborts parsing.
pub fn parse_script(text: &str) -> Result<Script, ReportError> {
    let (toks, end) = tokenize(text).map_err(|e| ReportError::Parse(e.into()))?;
    let mut p = Parser { c: Cursor::new(&toks, end), toks: &toks, src: text, script: Script::default() };
    while !p.c.is_done() {
        p.statement()?;
    }
    Ok(p.script)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qi};

    const SCRIPT: &str = "
        # cusp and friends
        vars x, y;
        set cusp = x^3 - y^2 = 0;
        set line = y = 0;
        point o = (0, 0);
        map phi = (x, y + x^2);
        strat W { S0: x = 0 && y = 0; S2: !(x = 0 && y = 0); }
        cone cusp p=o y=(1, -1/2);
        cone-scan cusp p=0 grid=64 engines=(numeric, puiseux);
        cone-exact cusp;
        induced-strata W grid=16;
        whitney W pair=(0, 2) seeds=(1, 2, 3);
        risometry phi pairs=100;
        lift phi from=line to=line;
        equal-cones cusp line p=o map=phi;
        dims W;
        repro-example cusp;
    ";

    #[test]
    fn parses_every_statement() {
        let s = parse_script(SCRIPT).unwrap();
        assert_eq!(s.vars, vec!["x", "y"]);
        assert_eq!(s.commands.len(), 10);
        assert_eq!(
            s.commands[0].kind,
            CommandKind::Cone { set: "cusp".into(), p: vec![qi(0), qi(0)], y: vec![qi(1), q(-1, 2)], engines: None }
        );
        assert_eq!(s.commands[0].text, "cone cusp p=o y=(1, -1/2)");
        assert_eq!(s.commands[0].line, 9);
        assert!(matches!(
            &s.commands[1].kind,
            CommandKind::ConeScan { grid: Some(64), engines: Some(e), .. } if e == &vec![Engine::Numeric, Engine::Puiseux]
        ));
        assert!(matches!(&s.commands[4].kind, CommandKind::Whitney { pair: Some((0, 2)), seeds: Some(v), .. } if v == &vec![1, 2, 3]));
        assert_eq!(s.commands[9].kind, CommandKind::Repro { example: Example::Cusp });
        assert!(s.strats["W"].stratum(1).is_ok());
    }

    #[test]
    fn empty_script() {
        let s = parse_script("  # nothing\n").unwrap();
        assert!(s.commands.is_empty());
    }

    fn error_of(src: &str) -> String {
        parse_script(src).unwrap_err().to_string()
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            error_of("vars x;\ncone X y=1;"),
            "syntax error at line 2, column 6: unknown set `X`"
        );
        assert!(error_of("set A = x = 0;").contains("declare `vars`"));
        assert!(error_of("vars x, y;\nset A = z = 0;").contains("unknown variable `z`"));
        assert!(error_of("vars x, y;\nset A = x = 0;\ncone A y=(1, 0) foo=1;").contains("no option `foo`"));
        assert!(error_of("vars x, y;\nset A = x = 0;\ncone A y=(1, 0, 0);").contains("2 coordinates"));
        assert!(error_of("vars x, y;\nset A = x = 0;\nset A = y = 0;").contains("already declared"));
        assert!(error_of("vars x;\nstrat W { S2: x = 0; }").contains("S0..S1"));
        assert!(error_of("frobnicate;").contains("unknown statement"));
        assert!(error_of("repro-example torus;").contains("unknown example"));
    }
}
