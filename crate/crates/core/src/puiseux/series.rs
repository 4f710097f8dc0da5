use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::PuiseuxError;
use crate::lex::{tokenize, Cursor, SyntaxError, Tok};
use crate::poly::{rational_to_f64, Coefficients, Rational};
use crate::verdict::Verdict3;

/// Relative precision used when inverting an exact series that is not a
/// monomial, and the default order for series built by truncation.
pub const DEFAULT_TRUNCATION: i64 = 8;

/// Value of `v` or `v̂`.
///
/// `AtLeast` is what a truncated computation can say about something that
/// has no known terms: every coefficient below the bound vanishes, nothing
/// is known above it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(Rational),
    AtLeast(Rational),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Lower bound, `None` meaning +∞.
    pub fn lower_bound(&self) -> Option<&Rational> {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// Decides `self > gamma` (or `>=` when `closed`).
    pub fn exceeds(&self, gamma: &Rational, closed: bool) -> Verdict3 {
        let beats = |v: &Rational| if closed { v >= gamma } else { v > gamma };
        match self {
            Valuation::Infinite => Verdict3::True,
            Valuation::Finite(v) => Verdict3::from_bool(beats(v)),
            Valuation::AtLeast(v) => {
                if beats(v) {
                    Verdict3::True
                } else {
                    Verdict3::Indeterminate(format!(
                        "valuation only known to be at least {v}"
                    ))
                }
            }
        }
    }

    /// Minimum of two valuations, as far as it is determined.
    pub fn min(&self, other: &Valuation) -> Valuation {
        use Valuation::*;
        match (self, other) {
            (Infinite, x) | (x, Infinite) => x.clone(),
            (Finite(a), Finite(b)) => Finite(a.min(b).clone()),
            (Finite(a), AtLeast(b)) | (AtLeast(b), Finite(a)) => {
                if a < b {
                    Finite(a.clone())
                } else {
                    AtLeast(b.clone())
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b).clone()),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// A truncated Puiseux series `Σ c_e t^e` with rational exponents and
/// coefficients.
///
/// `order` is the truncation order: nothing is known about coefficients at
/// exponents `>= order`. `None` marks an exact series (a finite sum with no
/// error term), which is what literals without `O(..)`, constants and
/// polynomial values at exact points are.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PuiseuxSeries {
    terms: Vec<(Rational, Rational)>,
    order: Option<Rational>,
}

fn min_order(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

impl PuiseuxSeries {
    /// Builds a series from arbitrary terms: sorts, merges equal exponents,
    /// drops zero coefficients and anything at or past `order`.
    pub fn from_terms<I>(terms: I, order: Option<Rational>) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut acc: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if order.as_ref().is_some_and(|n| e >= *n) {
                continue;
            }
            *acc.entry(e).or_insert_with(Rational::zero) += c;
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        PuiseuxSeries { terms, order }
    }

    pub fn zero() -> Self {
        PuiseuxSeries { terms: Vec::new(), order: None }
    }

    /// `O(t^order)`: zero as far as anyone can tell.
    pub fn big_o(order: Rational) -> Self {
        PuiseuxSeries { terms: Vec::new(), order: Some(order) }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, Rational::zero())
    }

    pub fn monomial(c: Rational, e: Rational) -> Self {
        Self::from_terms([(e, c)], None)
    }

    /// The parameter `t`.
    pub fn t() -> Self {
        Self::monomial(Rational::one(), Rational::one())
    }

    pub fn terms(&self) -> &[(Rational, Rational)] {
        &self.terms
    }

    pub fn order(&self) -> Option<&Rational> {
        self.order.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.order.is_none()
    }

    pub fn is_zero(&self) -> Verdict3 {
        if !self.terms.is_empty() {
            Verdict3::False
        } else if self.order.is_none() {
            Verdict3::True
        } else {
            Verdict3::Indeterminate("zero up to truncation".into())
        }
    }

    pub fn leading(&self) -> Option<(&Rational, &Rational)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn valuation(&self) -> Valuation {
        match (self.terms.first(), &self.order) {
            (Some((e, _)), _) => Valuation::Finite(e.clone()),
            (None, Some(n)) => Valuation::AtLeast(n.clone()),
            (None, None) => Valuation::Infinite,
        }
    }

    /// Coefficient of `t^e`, or `None` if `e` is past the truncation order.
    pub fn coefficient(&self, e: &Rational) -> Option<Rational> {
        if self.order.as_ref().is_some_and(|n| e >= n) {
            return None;
        }
        Some(
            self.terms
                .iter()
                .find(|(x, _)| x == e)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(Rational::zero),
        )
    }

    /// Sign in the ordered field (`t` is a positive infinitesimal).
    pub fn sign(&self) -> Result<Ordering, PuiseuxError> {
        match (self.terms.first(), &self.order) {
            (Some((_, c)), _) => Ok(c.cmp(&Rational::zero())),
            (None, None) => Ok(Ordering::Equal),
            (None, Some(n)) => Err(PuiseuxError::Indeterminate(format!(
                "sign undetermined below O(t^{n})"
            ))),
        }
    }

    /// Least common denominator of the exponents.
    pub fn ramification_index(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        self.terms
            .iter()
            .fold(num_bigint::BigInt::one(), |acc, (e, _)| acc.lcm(e.denom()))
    }

    /// Lowers the truncation order to `min(order, n)`.
    pub fn truncate(&self, n: &Rational) -> Self {
        let order = min_order(self.order.clone(), Some(n.clone()));
        Self::from_terms(self.terms.iter().cloned(), order)
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            order: self.order.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = min_order(self.order.clone(), other.order.clone());
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).cloned(), order)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            order: self.order.clone(),
        }
    }

    /// Multiplies by `t^e`.
    pub fn shift(&self, e: &Rational) -> Self {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            order: self.order.as_ref().map(|n| n + e),
        }
    }

    /// Lower bound on the valuation usable for error bookkeeping; `None`
    /// only for the exact zero.
    fn lower_valuation(&self) -> Option<Rational> {
        self.terms.first().map(|(e, _)| e.clone()).or_else(|| self.order.clone())
    }

    /// Product; the error term of each factor is multiplied by the leading
    /// part of the other, so the result is known below
    /// `min(N_a + v(b), N_b + v(a))`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let la = self.lower_valuation().expect("nonzero");
        let lb = other.lower_valuation().expect("nonzero");
        let order = min_order(
            self.order.as_ref().map(|n| n + &lb),
            other.order.as_ref().map(|n| n + &la),
        );
        let mut cross = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                cross.push((ea + eb, ca * cb));
            }
        }
        Self::from_terms(cross, order)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplicative inverse. An inexact series is inverted to the
    /// relative precision it carries; an exact non-monomial one to
    /// [`DEFAULT_TRUNCATION`].
    pub fn inverse(&self) -> Result<Self, PuiseuxError> {
        let (v, _) = self.leading().ok_or(PuiseuxError::IndeterminateDivisor)?;
        let rel = match &self.order {
            Some(n) => n - v,
            None => Rational::from_integer(DEFAULT_TRUNCATION.into()),
        };
        self.inverse_with(&rel)
    }

    /// Inverse known to relative order `rel` (capped by the precision of
    /// `self`). Exact monomials invert exactly.
    pub fn inverse_with(&self, rel: &Rational) -> Result<Self, PuiseuxError> {
        let (v, c) = match self.leading() {
            Some((v, c)) => (v.clone(), c.clone()),
            None => return Err(PuiseuxError::IndeterminateDivisor),
        };
        let cinv = c.recip();
        // self = c t^v (1 + u), u of positive valuation
        let u = Self::from_terms(
            self.terms[1..].iter().map(|(e, x)| (e - &v, x * &cinv)),
            self.order.as_ref().map(|n| n - &v),
        );
        if u.is_exact_zero() {
            return Ok(Self::monomial(cinv, -v));
        }
        let rel = min_order(u.order.clone(), Some(rel.clone())).expect("finite");
        let minus_u = u.truncate(&rel).neg();
        let mut sum = Self::one().truncate(&rel);
        let mut power = Self::one();
        loop {
            power = power.mul(&minus_u);
            if power.lower_valuation().is_none_or(|v| v >= rel) {
                break;
            }
            sum = sum.add(&power);
        }
        Ok(sum.scale(&cinv).shift(&-v))
    }

    pub fn div(&self, other: &Self) -> Result<Self, PuiseuxError> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Coefficient of `t^0`; requires nonnegative valuation.
    pub fn residue(&self) -> Result<Rational, PuiseuxError> {
        if let Some((e, _)) = self.leading() {
            if e.is_negative() {
                return Err(PuiseuxError::NotInValuationRing);
            }
        }
        self.coefficient(&Rational::zero()).ok_or_else(|| {
            PuiseuxError::Indeterminate("residue is past the truncation order".into())
        })
    }

    /// Numerical value at a concrete positive `t`, ignoring the error term.
    pub fn eval_f64(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| rational_to_f64(c) * t.powf(rational_to_f64(e)))
            .sum()
    }
}

impl Coefficients for PuiseuxSeries {
    fn lift(&self, c: &Rational) -> Self {
        PuiseuxSeries::constant(c.clone())
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Rational) -> fmt::Result {
    if e.is_one() {
        write!(f, "t")
    } else if e.is_integer() && !e.is_negative() {
        write!(f, "t^{e}")
    } else {
        write!(f, "t^({e})")
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() && self.order.is_none() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write_exponent(f, e)?;
            }
        }
        if let Some(n) = &self.order {
            if !self.terms.is_empty() {
                write!(f, " + ")?;
            }
            write!(f, "O(")?;
            write_exponent(f, n)?;
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn parse_int(c: &mut Cursor<'_>) -> Result<num_bigint::BigInt, SyntaxError> {
    match c.next() {
        Some(Tok::Int(n)) => Ok(n.clone()),
        _ => {
            c.pos = c.pos.saturating_sub(1);
            Err(c.error("expected an integer"))
        }
    }
}

fn parse_rational(c: &mut Cursor<'_>) -> Result<Rational, SyntaxError> {
    let num = parse_int(c)?;
    if c.eat(&Tok::Slash) {
        let den = parse_int(c)?;
        if den.is_zero() {
            return Err(c.error("zero denominator"));
        }
        Ok(Rational::new(num, den))
    } else {
        Ok(Rational::from_integer(num))
    }
}

fn parse_exponent(c: &mut Cursor<'_>) -> Result<Rational, SyntaxError> {
    if c.eat(&Tok::LParen) {
        let neg = c.eat(&Tok::Minus);
        let r = parse_rational(c)?;
        c.expect(&Tok::RParen)?;
        Ok(if neg { -r } else { r })
    } else if c.eat(&Tok::Minus) {
        Ok(-Rational::from_integer(parse_int(c)?))
    } else {
        Ok(Rational::from_integer(parse_int(c)?))
    }
}

fn parse_t_power(c: &mut Cursor<'_>) -> Result<Rational, SyntaxError> {
    match c.next() {
        Some(Tok::Ident(s)) if s == "t" => {}
        _ => {
            c.pos = c.pos.saturating_sub(1);
            return Err(c.error("expected `t`"));
        }
    }
    if c.eat(&Tok::Caret) {
        parse_exponent(c)
    } else {
        Ok(Rational::one())
    }
}

/// Parses a series literal from a cursor. Terms look like `3*t^(1/2)`,
/// `-t`, `1/2`, `2 t^3`; an optional `O(t^k)` sets the truncation order.
pub fn parse_series(c: &mut Cursor<'_>) -> Result<PuiseuxSeries, SyntaxError> {
    let mut terms = Vec::new();
    let mut order: Option<Rational> = None;
    let mut first = true;
    loop {
        let negative = if c.eat(&Tok::Minus) {
            true
        } else {
            if !c.eat(&Tok::Plus) && !first {
                break;
            }
            false
        };
        first = false;
        match c.peek() {
            Some(Tok::Ident(s)) if s == "O" => {
                c.next();
                c.expect(&Tok::LParen)?;
                let n = if matches!(c.peek(), Some(Tok::Int(_))) {
                    let k = parse_int(c)?;
                    if !k.is_one() {
                        return Err(c.error("expected `O(1)` or `O(t^k)`"));
                    }
                    Rational::zero()
                } else {
                    parse_t_power(c)?
                };
                c.expect(&Tok::RParen)?;
                if negative || order.is_some() {
                    return Err(c.error("misplaced order term"));
                }
                order = Some(n);
            }
            Some(Tok::Int(_)) => {
                let mut coeff = parse_rational(c)?;
                if negative {
                    coeff = -coeff;
                }
                let explicit = c.eat(&Tok::Star);
                let e = if matches!(c.peek(), Some(Tok::Ident(s)) if s == "t") {
                    parse_t_power(c)?
                } else if explicit {
                    return Err(c.error("expected `t` after `*`"));
                } else {
                    Rational::zero()
                };
                terms.push((e, coeff));
            }
            Some(Tok::Ident(s)) if s == "t" => {
                let e = parse_t_power(c)?;
                let coeff = if negative { -Rational::one() } else { Rational::one() };
                terms.push((e, coeff));
            }
            _ => return Err(c.error("expected a series term")),
        }
    }
    Ok(PuiseuxSeries::from_terms(terms, order))
}

impl FromStr for PuiseuxSeries {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (toks, end) = tokenize(s)?;
        let mut c = Cursor::new(&toks, end);
        let series = parse_series(&mut c)?;
        if !c.is_done() {
            return Err(c.error("trailing input after series"));
        }
        Ok(series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qi};

    fn s(src: &str) -> PuiseuxSeries {
        src.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(s("t").add(&s("-t")), PuiseuxSeries::zero());
        assert_eq!(s("t^(1/2)").mul(&s("t^(1/2)")), s("t"));
        assert_eq!(s("t^2").div(&s("t")).unwrap(), s("t"));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(s("3*t^(1/2) + t").valuation(), Valuation::Finite(q(1, 2)));
        assert_eq!(PuiseuxSeries::zero().valuation(), Valuation::Infinite);
        assert_eq!(s("t").mul(&s("2*t^3")).valuation(), Valuation::Finite(qi(4)));
        assert_eq!(s("O(t^3)").valuation(), Valuation::AtLeast(qi(3)));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(s("2 + t").residue().unwrap(), qi(2));
        assert_eq!(s("t^(1/2)").residue().unwrap(), qi(0));
        assert_eq!(s("t^(-1)").residue(), Err(PuiseuxError::NotInValuationRing));
        assert!(matches!(s("O(t^0)").residue(), Err(PuiseuxError::Indeterminate(_))));
    }

    #[test]
    fn truncation_bookkeeping() {
        let a = s("t + t^2 + O(t^5)");
        let b = s("t^2 + O(t^4)");
        // (t + t^2 + O(t^5)) (t^2 + O(t^4)) is known below min(5 + 2, 4 + 1)
        let p = a.mul(&b);
        assert_eq!(p.order(), Some(&qi(5)));
        assert_eq!(p, s("t^3 + t^4 + O(t^5)"));
        assert_eq!(a.add(&b).order(), Some(&qi(4)));
    }

    #[test]
    fn cancellation_needs_exactness() {
        let x = s("t^2");
        let y = s("t^3");
        let f = x.pow(3).sub(&y.pow(2));
        assert_eq!(f.is_zero(), Verdict3::True);
        let xt = x.truncate(&qi(8));
        let ft = xt.pow(3).sub(&y.pow(2));
        assert!(!ft.is_zero().is_determinate());
    }

    #[test]
    fn inverse_of_one_plus_t() {
        let inv = s("1 + t").inverse().unwrap();
        assert_eq!(inv.order(), Some(&qi(DEFAULT_TRUNCATION)));
        assert_eq!(inv.coefficient(&qi(7)), Some(qi(-1)));
        assert_eq!(inv.coefficient(&qi(6)), Some(qi(1)));
        let back = inv.mul(&s("1 + t"));
        assert_eq!(back, s("1 + O(t^8)"));
    }

    #[test]
    fn inverse_respects_input_precision() {
        let b = s("2*t + t^2 + O(t^4)");
        let inv = b.inverse().unwrap();
        // relative precision 3 at valuation -1
        assert_eq!(inv.order(), Some(&qi(2)));
        assert_eq!(inv.leading(), Some((&qi(-1), &q(1, 2))));
        assert_eq!(s("O(t^2)").inverse(), Err(PuiseuxError::IndeterminateDivisor));
        assert_eq!(PuiseuxSeries::zero().inverse(), Err(PuiseuxError::IndeterminateDivisor));
    }

    #[test]
    fn literal_round_trip() {
        for lit in [
            "3*t^(1/2) + t - 2*t^(5/2) + O(t^8)",
            "-t^(-1) + 1/2",
            "O(t^3)",
            "0",
            "1 + O(1)",
        ] {
            let a = s(lit);
            assert_eq!(s(&a.to_string()), a, "{lit}");
        }
        assert_eq!(s("3*t^(1/2) + t - 2*t^(5/2) + O(t^8)").to_string(), "3*t^(1/2) + t - 2*t^(5/2) + O(t^8)");
        assert_eq!(s("2 t^3").to_string(), "2*t^3");
        assert!("t +".parse::<PuiseuxSeries>().is_err());
        assert!("3*".parse::<PuiseuxSeries>().is_err());
    }

    #[test]
    fn sign_is_leading_coefficient() {
        assert_eq!(s("-t^2 + 100*t^3").sign().unwrap(), Ordering::Less);
        assert!(s("O(t)").sign().is_err());
    }
}
