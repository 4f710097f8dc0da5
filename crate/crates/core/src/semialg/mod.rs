//! Semialgebraic sets given by quantifier-free formulas over polynomial
//! sign conditions, evaluated at rational, floating and Puiseux points.

mod numeric;
mod parse;

pub use numeric::{
    local_dimension_estimate, newton_project, sample_near, tolerant_sign, CompiledSet,
    Confidence, DimensionEstimate, FloatPoly, SampleResult, FLOAT_TOLERANCE,
};
pub use parse::{canonical_var_order, parse_formula, parse_poly, parse_polynomial};
pub(crate) use parse::parse_vars_header;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lex::SyntaxError;
use crate::poly::{Polynomial, Rational};
use crate::puiseux::PuiseuxPoint;
use crate::verdict::Verdict3;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SemialgError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown variable `{name}` at line {line}, column {col}")]
    UnknownVariable { name: String, line: usize, col: usize },
    #[error("dimension mismatch: set lives in R^{expected}, point has {found} coordinates")]
    Dimension { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl Rel {
    pub fn negate(self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Eq => Rel::Ne,
            Rel::Ge => Rel::Lt,
            Rel::Gt => Rel::Le,
            Rel::Ne => Rel::Eq,
        }
    }

    /// Whether a value of the given sign satisfies `value rel 0`.
    pub fn holds(self, sign: Ordering) -> bool {
        use Ordering::*;
        match self {
            Rel::Lt => sign == Less,
            Rel::Le => sign != Greater,
            Rel::Eq => sign == Equal,
            Rel::Ge => sign != Less,
            Rel::Gt => sign == Greater,
            Rel::Ne => sign != Equal,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
            Rel::Ne => "!=",
        }
    }
}

/// Sign condition `poly rel 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub poly: Polynomial,
    pub rel: Rel,
}

impl Atom {
    pub fn new(poly: Polynomial, rel: Rel) -> Self {
        Atom { poly, rel }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn atom(poly: Polynomial, rel: Rel) -> Self {
        Formula::Atom(Atom::new(poly, rel))
    }

    /// Conjunction with nested conjunctions flattened.
    pub fn and(parts: Vec<Formula>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Formula::And(flat)
        }
    }

    pub fn or(parts: Vec<Formula>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Formula::Or(flat)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Negation normal form: `Not` eliminated by flipping relations.
    pub fn nnf(&self) -> Formula {
        self.nnf_signed(false)
    }

    fn nnf_signed(&self, negate: bool) -> Formula {
        match (self, negate) {
            (Formula::Atom(a), false) => Formula::Atom(a.clone()),
            (Formula::Atom(a), true) => Formula::atom(a.poly.clone(), a.rel.negate()),
            (Formula::Not(f), n) => f.nnf_signed(!n),
            (Formula::And(fs), false) | (Formula::Or(fs), true) => {
                Formula::and(fs.iter().map(|f| f.nnf_signed(negate)).collect())
            }
            (Formula::Or(fs), false) | (Formula::And(fs), true) => {
                Formula::or(fs.iter().map(|f| f.nnf_signed(negate)).collect())
            }
        }
    }

    /// Disjunctive normal form as a list of conjunctions of atoms.
    pub fn dnf(&self) -> Vec<Vec<Atom>> {
        fn go(f: &Formula) -> Vec<Vec<Atom>> {
            match f {
                Formula::Atom(a) => vec![vec![a.clone()]],
                Formula::Or(fs) => fs.iter().flat_map(go).collect(),
                Formula::And(fs) => {
                    let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
                    for part in fs {
                        let d = go(part);
                        let mut next = Vec::with_capacity(acc.len() * d.len());
                        for left in &acc {
                            for right in &d {
                                let mut c = left.clone();
                                c.extend(right.iter().cloned());
                                next.push(c);
                            }
                        }
                        acc = next;
                    }
                    acc
                }
                Formula::Not(_) => unreachable!("input is in negation normal form"),
            }
        }
        go(&self.nnf())
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
            match f {
                Formula::Atom(a) => out.push(a),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| go(g, out)),
                Formula::Not(g) => go(g, out),
            }
        }
        go(self, &mut out);
        out
    }

    /// Evaluates with a caller-supplied atom oracle under Kleene logic.
    pub fn eval_with<F>(&self, atom: &mut F) -> Verdict3
    where
        F: FnMut(&Atom) -> Verdict3,
    {
        match self {
            Formula::Atom(a) => atom(a),
            Formula::Not(f) => f.eval_with(atom).not(),
            Formula::And(fs) => {
                let mut acc = Verdict3::True;
                for f in fs {
                    acc = acc.and(f.eval_with(atom));
                    if acc.is_false() {
                        break;
                    }
                }
                acc
            }
            Formula::Or(fs) => {
                let mut acc = Verdict3::False;
                for f in fs {
                    acc = acc.or(f.eval_with(atom));
                    if acc.is_true() {
                        break;
                    }
                }
                acc
            }
        }
    }

    fn map_polys(&self, g: &dyn Fn(&Polynomial) -> Polynomial) -> Formula {
        match self {
            Formula::Atom(a) => Formula::atom(g(&a.poly), a.rel),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.map_polys(g)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.map_polys(g)).collect()),
            Formula::Not(f) => Formula::not(f.map_polys(g)),
        }
    }

    fn fmt_with(&self, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{} {} 0", a.poly.display_with(names), a.rel.symbol()),
            Formula::Not(inner) => {
                write!(f, "!(")?;
                inner.fmt_with(names, f)?;
                write!(f, ")")
            }
            Formula::And(fs) => {
                for (i, part) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " && ")?;
                    }
                    if matches!(part, Formula::Or(_)) {
                        write!(f, "(")?;
                        part.fmt_with(names, f)?;
                        write!(f, ")")?;
                    } else {
                        part.fmt_with(names, f)?;
                    }
                }
                Ok(())
            }
            Formula::Or(fs) => {
                for (i, part) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " || ")?;
                    }
                    part.fmt_with(names, f)?;
                }
                Ok(())
            }
        }
    }
}

/// A set `{x ∈ R^n : formula(x)}` with named coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemialgebraicSet {
    vars: Vec<String>,
    formula: Formula,
}

impl SemialgebraicSet {
    /// Panics if an atom's arity differs from `vars.len()`.
    pub fn new(vars: Vec<String>, formula: Formula) -> Self {
        for a in formula.atoms() {
            assert_eq!(a.poly.nvars(), vars.len(), "atom arity differs from ambient dimension");
        }
        SemialgebraicSet { vars, formula }
    }

    /// Parses with a fixed variable list (no header allowed in `text`).
    pub fn parse_with_vars(text: &str, vars: &[String]) -> Result<Self, SemialgError> {
        parse::parse_set_with_vars(text, vars)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        SemialgebraicSet {
            vars: self.vars.clone(),
            formula: Formula::or(vec![self.formula.clone(), other.formula.clone()]),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        SemialgebraicSet {
            vars: self.vars.clone(),
            formula: Formula::and(vec![self.formula.clone(), other.formula.clone()]),
        }
    }

    pub fn complement(&self) -> Self {
        SemialgebraicSet { vars: self.vars.clone(), formula: Formula::not(self.formula.clone()) }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    /// The set `{x : x + p ∈ self}`.
    pub fn translate(&self, p: &[Rational]) -> Result<Self, SemialgError> {
        self.check_dim(p.len())?;
        let g = |poly: &Polynomial| poly.translate(p).expect("dimension checked");
        Ok(SemialgebraicSet { vars: self.vars.clone(), formula: self.formula.map_polys(&g) })
    }

    fn check_dim(&self, found: usize) -> Result<(), SemialgError> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(SemialgError::Dimension { expected: self.dim(), found })
        }
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Result<bool, SemialgError> {
        self.check_dim(x.len())?;
        let v = self.formula.eval_with(&mut |a: &Atom| {
            let value = a.poly.eval(x);
            Verdict3::from_bool(a.rel.holds(value.cmp(&Rational::from_integer(0.into()))))
        });
        Ok(v.is_true())
    }

    /// Float membership with the default tolerance ([`FLOAT_TOLERANCE`]).
    pub fn eval_f64(&self, x: &[f64]) -> Result<bool, SemialgError> {
        self.eval_f64_tol(x, FLOAT_TOLERANCE)
    }

    /// Float membership where a value counts as zero below `tol` times its
    /// scale (see [`FLOAT_TOLERANCE`]).
    pub fn eval_f64_tol(&self, x: &[f64], tol: f64) -> Result<bool, SemialgError> {
        self.check_dim(x.len())?;
        let v = self.formula.eval_with(&mut |a: &Atom| {
            let fp = FloatPoly::new(&a.poly);
            let (value, mag) = fp.eval_mag(x);
            Verdict3::from_bool(a.rel.holds(tolerant_sign(value, mag, tol)))
        });
        Ok(v.is_true())
    }

    /// Membership of a point of `R^n` over the series field. Atoms are
    /// decided by the sign of the leading term of `f(x)`; a result with no
    /// known terms is indeterminate.
    pub fn eval_puiseux(&self, x: &PuiseuxPoint) -> Result<Verdict3, SemialgError> {
        self.check_dim(x.dim())?;
        Ok(self.formula.eval_with(&mut |a: &Atom| atom_at_puiseux(a, x)))
    }

    pub fn compile(&self) -> CompiledSet {
        CompiledSet::new(self)
    }
}

pub fn atom_at_puiseux(a: &Atom, x: &PuiseuxPoint) -> Verdict3 {
    match x.eval(&a.poly).sign() {
        Ok(sign) => Verdict3::from_bool(a.rel.holds(sign)),
        Err(e) => Verdict3::Indeterminate(e.to_string()),
    }
}

impl fmt::Display for SemialgebraicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars {}; ", self.vars.join(", "))?;
        self.formula.fmt_with(&self.vars, f)
    }
}

impl FromStr for SemialgebraicSet {
    type Err = SemialgError;

    /// Accepts an optional `vars a, b, c;` header; without it the
    /// variables are the identifiers used, in [`canonical_var_order`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_set(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qi};

    fn set(s: &str) -> SemialgebraicSet {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        let cusp = set("x^3 - y^2 = 0");
        assert_eq!(cusp.dim(), 2);
        assert!(matches!(cusp.formula(), Formula::Atom(a) if a.rel == Rel::Eq));
        let surf = set("x^3 - y^2 - z^2 = 0");
        assert_eq!(surf.vars(), &["x", "y", "z"]);
        let f = set("x > 0 && !(y = 0)");
        match f.formula() {
            Formula::And(parts) => {
                assert!(matches!(parts[0], Formula::Atom(_)));
                assert!(matches!(parts[1], Formula::Not(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn real_evaluation_examples() {
        let cusp = set("x^3 - y^2 = 0");
        assert!(cusp.eval_rational(&[qi(1), qi(1)]).unwrap());
        assert!(!cusp.eval_rational(&[qi(1), qi(0)]).unwrap());
        let surf = set("x^3 - y^2 - z^2 = 0");
        assert!(surf.eval_rational(&[qi(1), qi(1), qi(0)]).unwrap());
        assert!(surf.eval_f64(&[1.0, 1.0, 0.0]).unwrap());
        assert!(matches!(
            cusp.eval_rational(&[qi(1)]),
            Err(SemialgError::Dimension { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn puiseux_evaluation_examples() {
        let cusp = set("x^3 - y^2 = 0");
        let p = |a: &str, b: &str| PuiseuxPoint::new(vec![a.parse().unwrap(), b.parse().unwrap()]);
        assert_eq!(cusp.eval_puiseux(&p("t^2", "t^3")).unwrap(), Verdict3::True);
        assert_eq!(cusp.eval_puiseux(&p("t", "t")).unwrap(), Verdict3::False);
        let pos = set("vars x; x > 0");
        let neg_t = PuiseuxPoint::new(vec!["-t".parse().unwrap()]);
        assert_eq!(pos.eval_puiseux(&neg_t).unwrap(), Verdict3::False);
        assert!(!cusp.eval_puiseux(&p("t^2 + O(t^4)", "t^3")).unwrap().is_determinate());
    }

    #[test]
    fn float_tolerance_is_relative() {
        let cusp = set("x^3 - y^2 = 0");
        // far from the curve but tiny: rejected
        assert!(!cusp.eval_f64(&[-1e-4, 0.0]).unwrap());
        // on the curve up to rounding
        let s = 0.3f64;
        assert!(cusp.eval_f64(&[s * s, s * s * s]).unwrap());
    }

    #[test]
    fn nnf_and_dnf() {
        let f = set("!(x > 0 || y = 0) && (x < 1 || y > 2)");
        let dnf = f.formula().dnf();
        assert_eq!(dnf.len(), 2);
        assert!(dnf.iter().all(|c| c[0].rel == Rel::Le && c[1].rel == Rel::Ne));
        let x = [q(-1, 2), qi(3)];
        let direct = f.eval_rational(&x).unwrap();
        let via_dnf = dnf.iter().any(|c| {
            c.iter().all(|a| a.rel.holds(a.poly.eval(&x).cmp(&qi(0))))
        });
        assert_eq!(direct, via_dnf);
    }

    #[test]
    fn translate_moves_the_basepoint() {
        let c = set("x^2 + y^2 = 1");
        let t = c.translate(&[qi(1), qi(0)]).unwrap();
        assert!(t.eval_rational(&[qi(0), qi(0)]).unwrap());
        assert!(t.eval_rational(&[qi(-1), qi(1)]).unwrap());
    }
}
