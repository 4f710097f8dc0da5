//! Exact multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector, so two
//! polynomials are equal exactly when their term maps are equal.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// Shorthand for building a rational from two machine integers.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integral rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // huge numerators/denominators: fall back to a scaled division
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("ambient dimension mismatch: {left} vs {right} variables")]
    Arity { left: usize, right: usize },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("division by a non-constant polynomial")]
    NonConstantDivisor,
    #[error("division by zero")]
    DivisionByZero,
}

/// Ring operations needed to evaluate a polynomial at points of some other
/// ring. The receiver acts as a template so that context (ambient dimension,
/// truncation) can be carried over to constants.
pub trait Coefficients: Clone {
    fn lift(&self, c: &Rational) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
}

impl Coefficients for Rational {
    fn lift(&self, c: &Rational) -> Self {
        c.clone()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coefficients for f64 {
    fn lift(&self, c: &Rational) -> Self {
        rational_to_f64(c)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exponents: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(exponents.len());
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated terms; like terms are
    /// combined and zero coefficients dropped.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector has wrong length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Least total degree of a term; `None` for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    /// Largest exponent of variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn homogeneous_component(&self, d: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_arity(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::Arity { left: self.nvars, right: other.nvars })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_arity(other)?;
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_arity(other)?;
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), -c.clone());
        }
        Ok(r)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_arity(other)?;
        let mut r = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut r = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                r.add_term(e2, c * qi(e[i] as i64));
            }
        }
        r
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Evaluates at a point of any ring implementing [`Coefficients`].
    ///
    /// Panics if `point.len()` differs from the number of variables; use
    /// [`Polynomial::eval_rational`] for the checked rational variant.
    pub fn eval<R: Coefficients>(&self, point: &[R]) -> R {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong dimension");
        let template = &point[0];
        let mut powers: Vec<Vec<R>> = point.iter().map(|x| vec![x.lift(&Rational::one()), x.clone()]).collect();
        let mut acc = template.lift(&Rational::zero());
        for (e, c) in &self.terms {
            let mut term = template.lift(c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().unwrap().mul_ref(&point[i]);
                    powers[i].push(next);
                }
                term = term.mul_ref(&powers[i][k]);
            }
            acc = acc.add_ref(&term);
        }
        acc
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::Arity { left: self.nvars, right: point.len() });
        }
        Ok(self.eval(point))
    }

    /// Substitutes polynomials (all in the same ambient ring) for the
    /// variables.
    pub fn compose(&self, subs: &[Polynomial]) -> Polynomial {
        self.eval(subs)
    }

    /// Returns `g` with `g(x) = f(x + p)`.
    pub fn translate(&self, p: &[Rational]) -> Result<Polynomial, PolyError> {
        if p.len() != self.nvars {
            return Err(PolyError::Arity { left: self.nvars, right: p.len() });
        }
        if p.iter().all(Zero::is_zero) {
            return Ok(self.clone());
        }
        let subs: Vec<Polynomial> = (0..self.nvars)
            .map(|i| &Polynomial::var(self.nvars, i) + &Polynomial::constant(self.nvars, p[i].clone()))
            .collect();
        Ok(self.compose(&subs))
    }

    /// Lowest-degree homogeneous component.
    pub fn initial_form(&self) -> Result<Polynomial, PolyError> {
        let d = self.order().ok_or(PolyError::ZeroPolynomial)?;
        Ok(self.homogeneous_component(d))
    }

    /// Sum of absolute values of the coefficients.
    pub fn coefficient_l1(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).fold(Rational::zero(), |a, b| a + b)
    }

    /// Reinterprets in a ring with more variables (new ones appended).
    pub fn extend_vars(&self, nvars: usize) -> Polynomial {
        assert!(nvars >= self.nvars);
        Polynomial {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2.resize(nvars, 0);
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Writes the polynomial using the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Terms in printing order: descending total degree, then descending
    /// lexicographic exponent.
    fn print_order(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.poly.print_order();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(self.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.names[i], p)),
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

impl Coefficients for Polynomial {
    fn lift(&self, c: &Rational) -> Self {
        Polynomial::constant(self.nvars, c.clone())
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

// Operator sugar. These panic on mismatched arity; the `checked_*` methods
// are the fallible versions.
impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial arity mismatch")
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

/// A polynomial self-map `R^n -> R^n`, given by its coordinate functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(components: Vec<Polynomial>) -> Result<Self, PolyError> {
        let n = components.len();
        for c in &components {
            if c.nvars() != n {
                return Err(PolyError::Arity { left: n, right: c.nvars() });
            }
        }
        Ok(PolyMap { components })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap { components: (0..n).map(|i| Polynomial::var(n, i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn apply<R: Coefficients>(&self, x: &[R]) -> Vec<R> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    /// Degree-one homogeneous part of every component.
    pub fn linear_part(&self) -> PolyMap {
        PolyMap { components: self.components.iter().map(|c| c.homogeneous_component(1)).collect() }
    }

    pub fn fixes_origin(&self) -> bool {
        self.components.iter().all(|c| c.constant_term().is_zero())
    }

    pub fn is_identity(&self) -> bool {
        *self == PolyMap::identity(self.dim())
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> =
            self.components.iter().map(|c| c.display_with(names).to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn cusp() -> Polynomial {
        &x(2, 0).pow(3) - &x(2, 1).pow(2)
    }

    fn surface() -> Polynomial {
        &(&x(3, 0).pow(3) - &x(3, 1).pow(2)) - &x(3, 2).pow(2)
    }

    #[test]
    fn arithmetic_examples() {
        let (a, b) = (x(2, 0), x(2, 1));
        assert!((&a + &(-&a)).is_zero());
        let lhs = &(&a + &b) * &(&a - &b);
        let rhs = &a.pow(2) - &b.pow(2);
        assert_eq!(lhs, rhs);
        assert_eq!(&cusp() * &Polynomial::one(2), cusp());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        assert_eq!(
            x(2, 0).checked_add(&x(3, 0)),
            Err(PolyError::Arity { left: 2, right: 3 })
        );
    }

    #[test]
    fn translate_examples() {
        let circle = &(&x(2, 0).pow(2) + &x(2, 1).pow(2)) - &Polynomial::one(2);
        let moved = circle.translate(&[qi(1), qi(0)]).unwrap();
        let expected = &(&x(2, 0).pow(2) + &x(2, 0).scale(&qi(2))) + &x(2, 1).pow(2);
        assert_eq!(moved, expected);
        assert_eq!(cusp().translate(&[qi(0), qi(0)]).unwrap(), cusp());
        assert!(cusp().translate(&[qi(0)]).is_err());
    }

    #[test]
    fn initial_form_examples() {
        assert_eq!(cusp().initial_form().unwrap(), -&x(2, 1).pow(2));
        let shifted = &(&x(2, 0).pow(2) + &x(2, 0).scale(&qi(2))) + &x(2, 1).pow(2);
        assert_eq!(shifted.initial_form().unwrap(), x(2, 0).scale(&qi(2)));
        assert_eq!(surface().initial_form().unwrap(), &(-&x(3, 1).pow(2)) - &x(3, 2).pow(2));
        assert_eq!(Polynomial::zero(2).initial_form(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn gradient_examples() {
        let g = cusp().gradient();
        assert_eq!(g[0], x(2, 0).pow(2).scale(&qi(3)));
        assert_eq!(g[1], x(2, 1).scale(&qi(-2)));
        assert!(Polynomial::constant(3, qi(7)).gradient().iter().all(Polynomial::is_zero));
        let g = surface().gradient();
        assert_eq!(g[2], x(3, 2).scale(&qi(-2)));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(cusp().eval_rational(&[qi(1), qi(1)]).unwrap(), qi(0));
        assert_eq!(cusp().eval_rational(&[qi(1), qi(0)]).unwrap(), qi(1));
        assert_eq!(surface().eval_rational(&[qi(1), qi(1), qi(0)]).unwrap(), qi(0));
        assert!(cusp().eval_rational(&[qi(1)]).is_err());
    }

    #[test]
    fn zero_polynomial_degree_is_sentinel() {
        assert_eq!(Polynomial::zero(2).degree(), None);
        assert_eq!(Polynomial::one(2).degree(), Some(0));
    }

    #[test]
    fn display_uses_names() {
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(cusp().display_with(&names).to_string(), "x^3 - y^2");
        let p = &x(2, 0).scale(&q(1, 2)) - &Polynomial::constant(2, qi(3));
        assert_eq!(p.display_with(&names).to_string(), "1/2*x - 3");
    }

    #[test]
    fn linear_part_of_map() {
        let phi = PolyMap::new(vec![x(2, 0), &x(2, 1) + &x(2, 0).pow(2)]).unwrap();
        assert!(phi.linear_part().is_identity());
        assert!(phi.fixes_origin());
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..3, n), -4i64..5), 0..5).prop_map(
            move |ts| Polynomial::from_terms(n, ts.into_iter().map(|(e, c)| (e, qi(c)))),
        )
    }

    fn arb_point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-3i64..4, 1i64..4), n)
            .prop_map(|v| v.into_iter().map(|(a, b)| q(a, b)).collect())
    }

    proptest! {
        #[test]
        fn ring_axioms(f in arb_poly(2), g in arb_poly(2), h in arb_poly(2)) {
            prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
            prop_assert_eq!(&f + &g, &g + &f);
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &g, &g * &f);
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        }

        #[test]
        fn translate_roundtrip(f in arb_poly(3), p in arb_point(3)) {
            let neg: Vec<Rational> = p.iter().map(|c| -c.clone()).collect();
            prop_assert_eq!(f.translate(&p).unwrap().translate(&neg).unwrap(), f);
        }

        #[test]
        fn initial_form_is_lowest(f in arb_poly(2)) {
            prop_assume!(!f.is_zero());
            let inf = f.initial_form().unwrap();
            let d = inf.degree().unwrap();
            prop_assert_eq!(inf.order(), Some(d));
            for (e, _) in f.terms() {
                prop_assert!(e.iter().sum::<u32>() >= d);
            }
            let rest = &f - &inf;
            if let Some(o) = rest.order() {
                prop_assert!(o > d);
            }
        }

        #[test]
        fn leibniz_rule(f in arb_poly(2), g in arb_poly(2)) {
            let prod = &f * &g;
            for i in 0..2 {
                let lhs = prod.derivative(i);
                let rhs = &(&f.derivative(i) * &g) + &(&f * &g.derivative(i));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn eval_is_a_ring_map(f in arb_poly(2), g in arb_poly(2), p in arb_point(2)) {
            prop_assert_eq!((&f * &g).eval(&p), f.eval(&p) * g.eval(&p));
            prop_assert_eq!((&f + &g).eval(&p), f.eval(&p) + g.eval(&p));
        }
    }
}
