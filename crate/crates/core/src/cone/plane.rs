//! Exact tangent rays of a plane curve `{f = 0}` at a point.
//!
//! After moving `p` to the origin, every half-branch either lies on the
//! `y`-axis or has `x` of constant sign `σ`. On the side `σ`, write
//! `X = σx > 0`; a branch `y = c X^μ + …` (`c ≠ 0`, `μ > 0`) forces `μ` to
//! be a slope of the Newton polygon and `c` a root of the edge polynomial.
//! A root of odd multiplicity gives a real branch by a sign change. A
//! rational root of even multiplicity is resolved by substituting
//! `X = τ^b`, `y = τ^a (c + y₁)` and asking whether the transformed curve
//! has a branch with `y₁ → 0`. Irrational even roots are reported as
//! undecided.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{ConeError, ConeVerdict, Engine, Witness};
use crate::poly::{qi, Polynomial, Rational};
use crate::univariate::{RealAlgebraic, UniPoly};
use crate::verdict::Verdict3;

const MAX_DEPTH: usize = 8;

/// A ray from the apex. `Sloped` is the direction `(±1, rise)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaneDirection {
    Vertical { up: bool },
    Sloped { rightward: bool, rise: RealAlgebraic },
}

impl PlaneDirection {
    fn same(&self, other: &PlaneDirection) -> bool {
        match (self, other) {
            (PlaneDirection::Vertical { up: a }, PlaneDirection::Vertical { up: b }) => a == b,
            (
                PlaneDirection::Sloped { rightward: a, rise: r },
                PlaneDirection::Sloped { rightward: b, rise: s },
            ) => a == b && r.cmp_value(s) == Ordering::Equal,
            _ => false,
        }
    }

    /// Whether the nonzero vector `y` points along this ray.
    pub fn contains(&self, y: &[Rational]) -> bool {
        let (a, b) = (&y[0], &y[1]);
        match self {
            PlaneDirection::Vertical { up } => a.is_zero() && !b.is_zero() && b.is_positive() == *up,
            PlaneDirection::Sloped { rightward, rise } => {
                !a.is_zero() && a.is_positive() == *rightward && rise.cmp_rational(&(b / a.abs())) == Ordering::Equal
            }
        }
    }

    pub fn to_f64(&self) -> [f64; 2] {
        match self {
            PlaneDirection::Vertical { up } => [0.0, if *up { 1.0 } else { -1.0 }],
            PlaneDirection::Sloped { rightward, rise } => [if *rightward { 1.0 } else { -1.0 }, rise.to_f64()],
        }
    }
}

impl fmt::Display for PlaneDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneDirection::Vertical { up: true } => write!(f, "(0, 1)"),
            PlaneDirection::Vertical { up: false } => write!(f, "(0, -1)"),
            PlaneDirection::Sloped { rightward, rise } => {
                write!(f, "({}, {rise})", if *rightward { 1 } else { -1 })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    pub direction: PlaneDirection,
    /// Leading term of a branch realizing the ray.
    pub branch: String,
}

/// Tangent rays found, plus candidate rays whose branch could not be
/// decided.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RaySet {
    pub rays: Vec<Ray>,
    pub undecided: Vec<(PlaneDirection, String)>,
}

impl RaySet {
    fn add(&mut self, direction: PlaneDirection, branch: String) {
        self.undecided.retain(|(d, _)| !d.same(&direction));
        if !self.rays.iter().any(|r| r.direction.same(&direction)) {
            self.rays.push(Ray { direction, branch });
        }
    }

    fn add_undecided(&mut self, direction: PlaneDirection, why: String) {
        let known = self.rays.iter().any(|r| r.direction.same(&direction))
            || self.undecided.iter().any(|(d, _)| d.same(&direction));
        if !known {
            self.undecided.push((direction, why));
        }
    }

    pub fn is_complete(&self) -> bool {
        self.undecided.is_empty()
    }

    /// The apex is always in the cone; other vectors are in exactly when
    /// they point along a found ray.
    pub fn contains(&self, y: &[Rational]) -> Verdict3 {
        if y.iter().all(|c| c.is_zero()) || self.rays.iter().any(|r| r.direction.contains(y)) {
            return Verdict3::True;
        }
        match self.undecided.iter().find(|(d, _)| d.contains(y)) {
            Some((_, why)) => Verdict3::Indeterminate(why.clone()),
            None => Verdict3::False,
        }
    }

    pub fn verdict(&self, y: &[Rational]) -> ConeVerdict {
        let engine = Engine::PlaneCurve;
        match self.contains(y) {
            Verdict3::True => {
                let branch = self
                    .rays
                    .iter()
                    .find(|r| r.direction.contains(y))
                    .map(|r| r.branch.clone())
                    .unwrap_or_else(|| "apex".into());
                ConeVerdict::supported(engine, Some(Witness::Branch(branch)), true)
            }
            Verdict3::False => ConeVerdict::unsupported(engine, true, "no branch is tangent to y"),
            Verdict3::Indeterminate(why) => ConeVerdict::indeterminate(engine, why),
        }
    }
}

impl fmt::Display for RaySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rays: Vec<String> = self.rays.iter().map(|r| r.direction.to_string()).collect();
        write!(f, "{{{}}}", rays.join(", "))?;
        if !self.undecided.is_empty() {
            let u: Vec<String> = self.undecided.iter().map(|(d, _)| d.to_string()).collect();
            write!(f, " undecided {{{}}}", u.join(", "))?;
        }
        Ok(())
    }
}

/// Terms `c X^i y^j` of a bivariate polynomial.
type Terms = Vec<(i64, i64, Rational)>;

fn terms_of(g: &Polynomial, sigma: i64) -> Terms {
    g.terms()
        .map(|(e, c)| {
            let (i, j) = (e[0] as i64, e[1] as i64);
            let s = if sigma < 0 && i % 2 == 1 { -c.clone() } else { c.clone() };
            (i, j, s)
        })
        .collect()
}

/// Positive Newton polygon slopes `μ` (branches `y ~ c X^μ`) with their
/// edge polynomials in `c`, stripped of the power of `c` at the bottom.
fn edges(terms: &Terms) -> Vec<(Rational, UniPoly)> {
    let mut slopes: Vec<Rational> = Vec::new();
    for (k, (i1, j1, _)) in terms.iter().enumerate() {
        for (i2, j2, _) in &terms[k + 1..] {
            if j1 != j2 {
                let mu = Rational::new((i1 - i2).into(), (j2 - j1).into());
                if mu.is_positive() {
                    slopes.push(mu);
                }
            }
        }
    }
    slopes.sort();
    slopes.dedup();
    let mut out = Vec::new();
    for mu in slopes {
        let w = |(i, j, _): &(i64, i64, Rational)| qi(*i) + &mu * qi(*j);
        let m = terms.iter().map(w).min().expect("nonempty");
        let on: Vec<&(i64, i64, Rational)> = terms.iter().filter(|t| w(t) == m).collect();
        let jmin = on.iter().map(|t| t.1).min().expect("nonempty");
        let jmax = on.iter().map(|t| t.1).max().expect("nonempty");
        if jmin == jmax {
            continue;
        }
        let mut coeffs = vec![Rational::zero(); (jmax - jmin + 1) as usize];
        for (_, j, c) in on {
            coeffs[(j - jmin) as usize] += c;
        }
        out.push((mu, UniPoly::new(coeffs)));
    }
    out
}

fn binomial(n: i64, k: i64) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| acc * qi(n - i) / qi(i + 1))
}

/// `h(τ^b, τ^a (c + y₁)) / τ^{min}` with `μ = a/b`.
fn blow_up(terms: &Terms, mu: &Rational, c: &Rational) -> Terms {
    let (a, b) = (mu.numer().try_into().unwrap_or(1i64), mu.denom().try_into().unwrap_or(1i64));
    let mut acc: std::collections::BTreeMap<(i64, i64), Rational> = Default::default();
    for (i, j, coef) in terms {
        let tau = b * i + a * j;
        for k in 0..=*j {
            let term = coef * binomial(*j, k) * pow(c, j - k);
            *acc.entry((tau, k)).or_insert_with(Rational::zero) += term;
        }
    }
    let nonzero: Terms = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((i, j), v)| (i, j, v)).collect();
    let shift = nonzero.iter().map(|t| t.0).min().unwrap_or(0);
    nonzero.into_iter().map(|(i, j, v)| (i - shift, j, v)).collect()
}

fn pow(c: &Rational, k: i64) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * c)
}

/// Does the curve have a real branch `y → 0` as `X → 0⁺`? `None` when
/// undecided.
fn has_branch(terms: &Terms, depth: usize) -> Option<bool> {
    if terms.iter().all(|t| t.1 >= 1) {
        return Some(true);
    }
    if depth >= MAX_DEPTH {
        return None;
    }
    let mut open = false;
    for (mu, e) in edges(terms) {
        for (mult, factor) in e.square_free_decomposition() {
            for r in factor.real_roots() {
                if r.signum() == Ordering::Equal {
                    continue;
                }
                if mult % 2 == 1 {
                    return Some(true);
                }
                match r.as_rational() {
                    Some(c) => match has_branch(&blow_up(terms, &mu, &c), depth + 1) {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => open = true,
                    },
                    None => open = true,
                }
            }
        }
    }
    if open {
        None
    } else {
        Some(false)
    }
}

fn direction(sigma: i64, mu: &Rational, c: &RealAlgebraic) -> PlaneDirection {
    let rightward = sigma > 0;
    match mu.cmp(&Rational::one()) {
        Ordering::Greater => PlaneDirection::Sloped { rightward, rise: RealAlgebraic::Rational(Rational::zero()) },
        Ordering::Equal => PlaneDirection::Sloped { rightward, rise: c.clone() },
        Ordering::Less => PlaneDirection::Vertical { up: c.signum() == Ordering::Greater },
    }
}

/// Tangent rays of `{f = 0}` at `p`.
pub fn plane_curve_cone(f: &Polynomial, p: &[Rational]) -> Result<RaySet, ConeError> {
    if f.nvars() != 2 {
        return Err(ConeError::NotPlaneCurve);
    }
    if p.len() != 2 {
        return Err(ConeError::Dimension { expected: 2, found: p.len() });
    }
    if f.is_zero() {
        return Err(ConeError::ZeroPolynomial);
    }
    if !f.eval_rational(p)?.is_zero() {
        return Err(ConeError::NotOnCurve);
    }
    let g = f.translate(p)?;
    let mut out = RaySet::default();
    let base = terms_of(&g, 1);
    let zero = || RealAlgebraic::Rational(Rational::zero());
    if base.iter().all(|t| t.1 >= 1) {
        for rightward in [true, false] {
            out.add(PlaneDirection::Sloped { rightward, rise: zero() }, "y = 0".into());
        }
    }
    if base.iter().all(|t| t.0 >= 1) {
        for up in [true, false] {
            out.add(PlaneDirection::Vertical { up }, "x = 0".into());
        }
    }
    for sigma in [1i64, -1] {
        let side = if sigma > 0 { "x > 0" } else { "x < 0" };
        let terms = terms_of(&g, sigma);
        for (mu, e) in edges(&terms) {
            for (mult, factor) in e.square_free_decomposition() {
                for r in factor.real_roots() {
                    if r.signum() == Ordering::Equal {
                        continue;
                    }
                    let dir = direction(sigma, &mu, &r);
                    let branch = format!("y ~ {} |x|^({mu}) on {side}", fmt_coeff(&r));
                    if mult % 2 == 1 {
                        out.add(dir, branch);
                        continue;
                    }
                    match r.as_rational().map(|c| has_branch(&blow_up(&terms, &mu, &c), 0)) {
                        Some(Some(true)) => out.add(dir, branch),
                        Some(Some(false)) => {}
                        Some(None) => out.add_undecided(dir, format!("{branch}: resolution depth exceeded")),
                        None => out.add_undecided(dir, format!("{branch}: irrational root of even multiplicity")),
                    }
                }
            }
        }
    }
    Ok(out)
}

fn fmt_coeff(r: &RealAlgebraic) -> String {
    match r.as_rational() {
        Some(c) => c.to_string(),
        None => format!("{:.6}", r.to_f64()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semialg::{Formula, SemialgebraicSet};

    fn curve(src: &str) -> Polynomial {
        let s: SemialgebraicSet = format!("vars x, y; {src} = 0").parse().unwrap();
        match s.formula() {
            Formula::Atom(a) => a.poly.clone(),
            _ => unreachable!(),
        }
    }

    fn rays(src: &str) -> String {
        plane_curve_cone(&curve(src), &[qi(0), qi(0)]).unwrap().to_string()
    }

    #[test]
    fn classic_curves() {
        assert_eq!(rays("x^3 - y^2"), "{(1, 0)}");
        assert_eq!(rays("y - x^2"), "{(1, 0), (-1, 0)}");
        assert_eq!(rays("y^2 - x^4"), "{(1, 0), (-1, 0)}");
        assert_eq!(rays("y^2 - x^2 - x^3"), "{(1, -1), (1, 1), (-1, -1), (-1, 1)}");
        assert_eq!(rays("y^2 - x"), "{(0, -1), (0, 1)}");
        assert_eq!(rays("x*y"), "{(1, 0), (-1, 0), (0, 1), (0, -1)}");
    }

    #[test]
    fn isolated_point_and_even_roots() {
        assert_eq!(rays("x^2 + y^2"), "{}");
        // y = x² ± x^{5/2} exists only for x > 0
        assert_eq!(rays("(y - x^2)^2 - x^5"), "{(1, 0)}");
        // (y - x^2)^2 + x^6 = 0 has no real branch
        assert_eq!(rays("(y - x^2)^2 + x^6"), "{}");
        // (y - x)^2 = x^4 on both sides
        assert_eq!(rays("(y - x)^2 - x^4"), "{(1, 1), (-1, -1)}");
    }

    #[test]
    fn irrational_slopes() {
        let r = plane_curve_cone(&curve("y^2 - 2x^2"), &[qi(0), qi(0)]).unwrap();
        assert_eq!(r.rays.len(), 4);
        let [a, b] = r.rays[0].direction.to_f64();
        assert!((b.abs() / a.abs() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.contains(&[qi(1), qi(1)]), Verdict3::False);
    }

    #[test]
    fn irrational_double_root_is_undecided() {
        let r = plane_curve_cone(&curve("(y^2 - 2x^2)^2 - x^5"), &[qi(0), qi(0)]).unwrap();
        assert!(!r.is_complete());
        assert!(r.rays.is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(plane_curve_cone(&curve("x^2 + y^2 - 1"), &[qi(0), qi(0)]), Err(ConeError::NotOnCurve));
        let f = Polynomial::var(3, 0);
        assert_eq!(plane_curve_cone(&f, &[qi(0), qi(0)]), Err(ConeError::NotPlaneCurve));
    }

    #[test]
    fn translated_point() {
        let r = plane_curve_cone(&curve("(x - 1)^3 - (y - 2)^2"), &[qi(1), qi(2)]).unwrap();
        assert_eq!(r.to_string(), "{(1, 0)}");
    }
}
