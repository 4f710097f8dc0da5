//! Curve search over Puiseux series.
//!
//! A direction `y ≠ 0` is in `C_p(X)` exactly when some curve
//! `p + λ t y + h(t)` lies in `X` for small `t > 0`, with `λ > 0` and every
//! exponent of `h` above 1. The engine tries to build such a curve by
//! adding monomial corrections `s t^e` one coordinate at a time, and tries
//! to rule it out with a sign argument on the Taylor expansion
//! `g(x₀ + h) = Σ_α D_α h^α`, `D_α = ∂^α g(x₀)/α!`.
//!
//! The sign argument: let `v₀ = v(D₀)`. A term with `v(D_α) + |α|·last ≥ v₀`
//! only contributes above `t^{v₀}` because every exponent of `h` exceeds
//! `last`. If each remaining `α` has only even entries and `D_α` has the
//! sign of `D₀`, no cancellation is possible and `g` keeps the sign of
//! `D₀` on every such curve. Scaling `t` shows the conclusion is the same
//! for every `λ > 0`.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::{ConeQuery, ConeVerdict, Engine, Witness};
use crate::poly::{q, qi, Polynomial, Rational};
use crate::puiseux::{PuiseuxPoint, PuiseuxSeries};
use crate::semialg::{atom_at_puiseux, Atom, Rel};
use crate::univariate::UniPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxConfig {
    /// Corrections added on top of the ray.
    pub max_corrections: usize,
    /// Search nodes across all scales and disjuncts.
    pub node_budget: usize,
    /// Correction exponents are `k/d` with `d ≤ max_denominator` and value
    /// at most `max_exponent`.
    pub max_exponent: i64,
    pub max_denominator: i64,
    /// Values of `λ`; all but the first are tried only when an irrational
    /// leading coefficient blocked the search.
    pub scales: Vec<Rational>,
}

impl Default for PuiseuxConfig {
    fn default() -> Self {
        PuiseuxConfig {
            max_corrections: 3,
            node_budget: 500,
            max_exponent: 4,
            max_denominator: 6,
            scales: vec![qi(1), qi(2), qi(3), q(1, 2)],
        }
    }
}

fn factorial(k: u32) -> Rational {
    (1..=k).fold(Rational::one(), |acc, i| acc * qi(i as i64))
}

/// `(α, ∂^α g / α!)` for every `0 < |α| ≤ deg g` with a nonzero result.
fn taylor_table(g: &Polynomial) -> Vec<(Vec<u32>, Polynomial)> {
    let n = g.nvars();
    let deg = g.degree().unwrap_or(0);
    let mut out = Vec::new();
    let mut alpha = vec![0u32; n];
    fn rec(
        g: &Polynomial,
        i: usize,
        left: u32,
        alpha: &mut Vec<u32>,
        out: &mut Vec<(Vec<u32>, Polynomial)>,
    ) {
        if g.is_zero() {
            return;
        }
        if i == alpha.len() {
            if alpha.iter().any(|&a| a > 0) {
                let denom = alpha.iter().fold(Rational::one(), |acc, &a| acc * factorial(a));
                out.push((alpha.clone(), g.scale(&denom.recip())));
            }
            return;
        }
        let mut d = g.clone();
        for k in 0..=left {
            alpha[i] = k;
            rec(&d, i + 1, left - k, alpha, out);
            d = d.derivative(i);
            if d.is_zero() {
                break;
            }
        }
        alpha[i] = 0;
    }
    rec(g, 0, deg, &mut alpha, &mut out);
    out
}

fn sign_of(c: &Rational) -> Ordering {
    c.cmp(&Rational::zero())
}

fn leading(s: &PuiseuxSeries) -> Option<(Rational, Rational)> {
    s.leading().map(|(e, c)| (e.clone(), c.clone()))
}

fn certificate(
    g: &Polynomial,
    table: &[(Vec<u32>, Polynomial)],
    x0: &PuiseuxPoint,
    last: &Rational,
) -> Option<Ordering> {
    let (v0, c0) = leading(&x0.eval(g))?;
    let s0 = sign_of(&c0);
    for (alpha, d) in table {
        let Some((v, c)) = leading(&x0.eval(d)) else { continue };
        let size: u32 = alpha.iter().sum();
        if v + last * qi(size as i64) >= v0 {
            continue;
        }
        if alpha.iter().any(|a| a % 2 == 1) || sign_of(&c) != s0 {
            return None;
        }
    }
    Some(s0)
}

/// Sign of `g` forced on every curve `x₀ + h` whose corrections have
/// exponents above `last`, or `None` when the leading terms leave it open.
pub fn obstruction_certificate(g: &Polynomial, x0: &PuiseuxPoint, last: &Rational) -> Option<Ordering> {
    certificate(g, &taylor_table(g), x0, last)
}

struct Prepared {
    atom: Atom,
    table: Vec<(Vec<u32>, Polynomial)>,
}

impl Prepared {
    fn obstructed(&self, x: &PuiseuxPoint, last: &Rational) -> bool {
        certificate(&self.atom.poly, &self.table, x, last).is_some_and(|s| !self.atom.rel.holds(s))
    }

    /// `D_{k e_i}` at `x` for `k ≥ 1`, as (k, valuation, leading coefficient).
    fn axis_terms(&self, x: &PuiseuxPoint, i: usize) -> Vec<(u32, Rational, Rational)> {
        self.table
            .iter()
            .filter(|(a, _)| a[i] > 0 && a.iter().enumerate().all(|(j, &aj)| j == i || aj == 0))
            .filter_map(|(a, d)| leading(&x.eval(d)).map(|(v, c)| (a[i], v, c)))
            .collect()
    }
}

struct Search<'a> {
    config: &'a PuiseuxConfig,
    nodes: usize,
    exhausted: bool,
    irrational: bool,
}

impl Search<'_> {
    fn exponent_ok(&self, e: &Rational, last: &Rational) -> bool {
        e > last && e <= &qi(self.config.max_exponent) && e.denom() <= &self.config.max_denominator.into()
    }

    fn grid(&self, last: &Rational) -> Vec<Rational> {
        let mut out: Vec<Rational> = (1..=self.config.max_denominator)
            .flat_map(|d| (1..=self.config.max_exponent * d).map(move |k| q(k, d)))
            .filter(|e| e > last)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn with_correction(x: &PuiseuxPoint, i: usize, s: &Rational, e: &Rational) -> PuiseuxPoint {
        let mut y = x.clone();
        y.coords[i] = y.coords[i].add(&PuiseuxSeries::monomial(s.clone(), e.clone()));
        y
    }

    /// Corrections cancelling the leading term of `g(x)`: Newton polygon
    /// of the points `(0, v(G))` and `(k, v(D_{k e_i}))` per coordinate.
    fn equality_children(&mut self, a: &Prepared, x: &PuiseuxPoint, last: &Rational) -> Vec<(PuiseuxPoint, Rational)> {
        let Some((w0, c0)) = leading(&x.eval(&a.atom.poly)) else { return vec![] };
        let mut out = Vec::new();
        for i in 0..x.dim() {
            let mut pts = vec![(0u32, w0.clone(), c0.clone())];
            pts.extend(a.axis_terms(x, i));
            if pts.len() < 2 {
                continue;
            }
            // slopes through the k = 0 point first, then the others
            let mut slopes: Vec<Rational> = Vec::new();
            for (j, (k1, v1, _)) in pts.iter().enumerate() {
                for (k2, v2, _) in &pts[j + 1..] {
                    if k1 != k2 {
                        slopes.push((v1 - v2) / qi(*k2 as i64 - *k1 as i64));
                    }
                }
            }
            let first = pts[1..]
                .iter()
                .map(|(k, v, _)| (&w0 - v) / qi(*k as i64))
                .max()
                .expect("nonempty");
            slopes.retain(|e| e != &first);
            slopes.sort();
            slopes.dedup();
            slopes.insert(0, first);
            for e in slopes {
                if !self.exponent_ok(&e, last) {
                    continue;
                }
                let vals: Vec<Rational> = pts.iter().map(|(k, v, _)| v + &e * qi(*k as i64)).collect();
                let m = vals.iter().min().expect("nonempty").clone();
                let on: Vec<usize> = (0..pts.len()).filter(|&j| vals[j] == m).collect();
                if on.len() < 2 {
                    continue;
                }
                let deg = on.iter().map(|&j| pts[j].0).max().unwrap_or(0) as usize;
                let mut coeffs = vec![Rational::zero(); deg + 1];
                for &j in &on {
                    coeffs[pts[j].0 as usize] += &pts[j].2;
                }
                let poly = UniPoly::new(coeffs);
                let mut roots: Vec<Rational> = Vec::new();
                for r in poly.real_roots() {
                    match r.as_rational() {
                        Some(s) if !s.is_zero() => roots.push(s),
                        Some(_) => {}
                        None => self.irrational = true,
                    }
                }
                roots.sort_by_key(|s| (s.is_negative(), s.abs()));
                for s in roots {
                    out.push((Self::with_correction(x, i, &s, &e), e.clone()));
                }
            }
        }
        out
    }

    /// Corrections moving `g(x)` to the required sign: a term `±t^e` along
    /// an axis that dominates (or matches) the current leading term.
    fn sign_children(&mut self, a: &Prepared, x: &PuiseuxPoint, last: &Rational) -> Vec<(PuiseuxPoint, Rational)> {
        let w0 = leading(&x.eval(&a.atom.poly)).map(|(v, _)| v);
        let grid = self.grid(last);
        let mut out = Vec::new();
        for i in 0..x.dim() {
            let terms = a.axis_terms(x, i);
            if terms.is_empty() {
                continue;
            }
            let exps: Vec<Rational> = match &w0 {
                // any correction makes an exact zero nonzero; the highest
                // disturbs the other atoms least, the lowest leaves room
                // for more corrections
                None => {
                    let mut v: Vec<Rational> = grid.last().into_iter().chain(grid.first()).cloned().collect();
                    v.dedup();
                    v
                }
                Some(w0) => {
                    let cap = terms.iter().map(|(k, v, _)| (w0 - v) / qi(*k as i64)).max().expect("nonempty");
                    let below = grid.iter().rfind(|e| *e < &cap).cloned();
                    below.into_iter().chain(grid.iter().find(|e| *e == &cap).cloned()).collect()
                }
            };
            for e in exps {
                for s in [qi(1), qi(-1), qi(2), qi(-2)] {
                    let child = Self::with_correction(x, i, &s, &e);
                    if atom_at_puiseux(&a.atom, &child).is_true() {
                        out.push((child, e.clone()));
                    }
                }
            }
        }
        out
    }

    fn dfs(&mut self, atoms: &[Prepared], x: PuiseuxPoint, last: Rational, depth: usize) -> Option<PuiseuxPoint> {
        if self.nodes >= self.config.node_budget {
            self.exhausted = true;
            return None;
        }
        self.nodes += 1;
        let failing = |want_eq: bool| {
            atoms
                .iter()
                .find(|a| (a.atom.rel == Rel::Eq) == want_eq && !atom_at_puiseux(&a.atom, &x).is_true())
        };
        let Some(bad) = failing(true).or_else(|| failing(false)) else {
            return Some(x);
        };
        if depth == self.config.max_corrections {
            return None;
        }
        let children = if bad.atom.rel == Rel::Eq {
            self.equality_children(bad, &x, &last)
        } else {
            self.sign_children(bad, &x, &last)
        };
        for (child, e) in children {
            if atoms.iter().any(|a| a.obstructed(&child, &e)) {
                continue;
            }
            if let Some(w) = self.dfs(atoms, child, e, depth + 1) {
                return Some(w);
            }
            if self.exhausted {
                return None;
            }
        }
        None
    }
}

/// Curve search with certified obstruction; see the module docs.
pub fn cone_membership_puiseux(q: &ConeQuery, config: &PuiseuxConfig) -> ConeVerdict {
    let engine = Engine::Puiseux;
    let disjuncts: Vec<Vec<Prepared>> = q
        .set
        .formula()
        .dnf()
        .into_iter()
        .map(|conj| {
            conj.into_iter()
                .map(|atom| Prepared { table: taylor_table(&atom.poly), atom })
                .collect()
        })
        .collect();
    let zero_dir = q.y_is_zero();
    let last = if zero_dir { Rational::zero() } else { Rational::one() };
    let ray = PuiseuxPoint::ray(&q.p, &q.y);
    let open: Vec<&Vec<Prepared>> =
        disjuncts.iter().filter(|d| !d.iter().any(|a| a.obstructed(&ray, &last))).collect();
    if open.is_empty() {
        return ConeVerdict::unsupported(engine, true, "leading terms fix a violated sign on every disjunct");
    }
    let mut search = Search { config, nodes: 0, exhausted: false, irrational: false };
    for (idx, lambda) in config.scales.iter().enumerate() {
        if idx > 0 && !search.irrational {
            break;
        }
        let scaled: Vec<Rational> = q.y.iter().map(|c| c * lambda).collect();
        let x0 = PuiseuxPoint::ray(&q.p, &scaled);
        for d in &open {
            if let Some(curve) = search.dfs(d, x0.clone(), last.clone(), 0) {
                if let Some(w) = verified_witness(q, curve, lambda) {
                    return w;
                }
            }
            if search.exhausted {
                return ConeVerdict::indeterminate(engine, "search budget exhausted");
            }
        }
    }
    ConeVerdict::indeterminate(engine, "no curve found within the correction ansatz")
}

/// Checks membership and `(curve − p)/t → λ y` before reporting.
fn verified_witness(q: &ConeQuery, curve: PuiseuxPoint, lambda: &Rational) -> Option<ConeVerdict> {
    if !q.set.eval_puiseux(&curve).ok()?.is_true() {
        return None;
    }
    let rel = curve.sub(&PuiseuxPoint::from_rational(&q.p));
    let lim = if q.y_is_zero() {
        rel.limit().ok()?
    } else {
        PuiseuxPoint::new(rel.coords.iter().map(|c| c.shift(&-Rational::one())).collect()).limit().ok()?
    };
    let want: Vec<Rational> = q.y.iter().map(|c| c * lambda).collect();
    (lim == want).then(|| {
        ConeVerdict::supported(Engine::Puiseux, Some(Witness::Curve { curve, scale: lambda.clone() }), true)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::ConeStatus;
    use crate::semialg::SemialgebraicSet;

    fn query(set: &str, p: &[i64], y: &[i64]) -> ConeQuery {
        let s: SemialgebraicSet = set.parse().unwrap();
        ConeQuery::new(s, p.iter().map(|&c| qi(c)).collect(), y.iter().map(|&c| qi(c)).collect()).unwrap()
    }

    fn run(set: &str, p: &[i64], y: &[i64]) -> ConeVerdict {
        cone_membership_puiseux(&query(set, p, y), &PuiseuxConfig::default())
    }

    #[test]
    fn taylor_table_of_cubic() {
        let s: SemialgebraicSet = "x^3 - y^2 = 0".parse().unwrap();
        let g = &s.formula().atoms()[0].poly;
        let t = taylor_table(g);
        let names: Vec<Vec<u32>> = t.iter().map(|(a, _)| a.clone()).collect();
        assert_eq!(names, vec![vec![0, 1], vec![0, 2], vec![1, 0], vec![2, 0], vec![3, 0]]);
        let (_, d) = t.iter().find(|(a, _)| a == &vec![2, 0]).unwrap();
        assert_eq!(d.coefficient(&[1, 0]), qi(3));
    }

    #[test]
    fn cusp_tangent_has_half_integer_witness() {
        let v = run("x^3 - y^2 = 0", &[0, 0], &[1, 0]);
        assert_eq!(v.status, ConeStatus::Supported);
        let Some(Witness::Curve { curve, scale }) = v.witness else { panic!() };
        assert_eq!(scale, qi(1));
        assert_eq!(curve.to_string(), "(t, t^(3/2))");
    }

    #[test]
    fn cusp_other_directions_are_certified_out() {
        for y in [[-1, 0], [0, 1], [0, -1], [1, 1], [-2, 1]] {
            let v = run("x^3 - y^2 = 0", &[0, 0], &y);
            assert!(v.is_certified_unsupported(), "{y:?}: {v:?}");
        }
    }

    #[test]
    fn surface_directions() {
        let x = "x^3 - y^2 - z^2 = 0";
        assert_eq!(run(x, &[0, 0, 0], &[1, 0, 0]).status, ConeStatus::Supported);
        assert!(run(x, &[0, 0, 0], &[-1, 0, 0]).is_certified_unsupported());
        assert!(run(x, &[0, 0, 0], &[1, 1, 0]).is_certified_unsupported());
        assert!(run(x, &[0, 0, 0], &[2, -1, 2]).is_certified_unsupported());
    }

    #[test]
    fn zero_direction() {
        assert_eq!(run("x^3 - y^2 = 0", &[0, 0], &[0, 0]).status, ConeStatus::Supported);
        assert!(run("x^2 + y^2 = 1", &[0, 0], &[0, 0]).is_certified_unsupported());
        assert_eq!(run("x^2 + y^2 < 1", &[1, 0], &[0, 0]).status, ConeStatus::Supported);
    }

    #[test]
    fn empty_set_is_certified_empty() {
        assert!(run("vars x, y; 1 = 0", &[0, 0], &[1, 0]).is_certified_unsupported());
    }

    #[test]
    fn irrational_leading_coefficient_needs_rescaling() {
        // y = ±√2 x^{3/2} for λ = 1, but λ = 2 gives y = ±4 t^{3/2}
        let v = run("y^2 - 2x^3 = 0", &[0, 0], &[1, 0]);
        assert_eq!(v.status, ConeStatus::Supported);
        let Some(Witness::Curve { scale, .. }) = v.witness else { panic!() };
        assert_eq!(scale, qi(2));
    }

    #[test]
    fn open_conditions_and_sign_repair() {
        // the region above a parabola: y > x² touches the x-axis tangentially
        assert_eq!(run("y > x^2", &[0, 0], &[1, 0]).status, ConeStatus::Supported);
        assert!(run("y > x^2", &[0, 0], &[1, -1]).is_certified_unsupported());
        // a horn: x > 0, y > 0, y < x^2
        let horn = "x > 0 && y > 0 && y < x^2";
        assert_eq!(run(horn, &[0, 0], &[1, 0]).status, ConeStatus::Supported);
        assert!(run(horn, &[0, 0], &[1, 1]).is_certified_unsupported());
    }

    #[test]
    fn tangent_parabolas_stay_open() {
        let v = run("y - x^2 = 0 && y + x^2 = 0", &[0, 0], &[1, 0]);
        assert_eq!(v.status, ConeStatus::Indeterminate);
    }

    #[test]
    fn certificate_signs() {
        let s: SemialgebraicSet = "x^3 - y^2 = 0".parse().unwrap();
        let g = &s.formula().atoms()[0].poly;
        let ray = PuiseuxPoint::ray(&[qi(0), qi(0)], &[qi(-1), qi(0)]);
        assert_eq!(obstruction_certificate(g, &ray, &qi(1)), Some(Ordering::Less));
        let ray = PuiseuxPoint::ray(&[qi(0), qi(0)], &[qi(1), qi(0)]);
        assert_eq!(obstruction_certificate(g, &ray, &qi(1)), None);
    }
}
