use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Rel, SemialgebraicSet};
use crate::poly::{rational_to_f64, Polynomial};

/// Relative tolerance for float membership. A polynomial value counts as
/// zero when `|f(x)| <= FLOAT_TOLERANCE · scale(f, x)`, where
/// `scale(f, x) = Σ |c_α x^α| + ‖x‖_∞ · Σ_α Σ_i α_i |c_α x^(α − e_i)|`.
/// The first sum makes the test relative to the size of the terms; the
/// second lets a point at relative distance `~tol` from a smooth zero set
/// pass even when every term of `f` is tiny there.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Newton iterations stop once every residual is this small relative to
/// its scale.
const NEWTON_TOLERANCE: f64 = 1e-12;

type Terms = Vec<(Vec<u32>, f64)>;

/// Float copy of a polynomial with its gradient, for fast repeated
/// evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    nvars: usize,
    terms: Terms,
    grad: Vec<Terms>,
    /// `(α − e_i, α_i |c_α|)` for every term and every `i` with `α_i > 0`
    slope: Terms,
}

fn to_terms(p: &Polynomial) -> Terms {
    p.terms().map(|(m, c)| (m.clone(), rational_to_f64(c))).collect()
}

fn monomial_value(m: &[u32], x: &[f64]) -> f64 {
    m.iter().zip(x).fold(1.0, |acc, (&e, &xi)| if e == 0 { acc } else { acc * xi.powi(e as i32) })
}

fn slope_terms(p: &Polynomial) -> Terms {
    let mut out = Vec::new();
    for (m, c) in p.terms() {
        let c = rational_to_f64(c).abs();
        for (i, &e) in m.iter().enumerate() {
            if e > 0 {
                let mut d = m.clone();
                d[i] -= 1;
                out.push((d, e as f64 * c));
            }
        }
    }
    out
}

fn eval_terms(terms: &Terms, x: &[f64]) -> (f64, f64) {
    let mut value = 0.0;
    let mut mag = 0.0;
    for (m, c) in terms {
        let v = c * monomial_value(m, x);
        value += v;
        mag += v.abs();
    }
    (value, mag)
}

impl FloatPoly {
    pub fn new(p: &Polynomial) -> Self {
        FloatPoly {
            nvars: p.nvars(),
            terms: to_terms(p),
            grad: p.gradient().iter().map(to_terms).collect(),
            slope: slope_terms(p),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        eval_terms(&self.terms, x).0
    }

    /// Value together with its scale (see [`FLOAT_TOLERANCE`]).
    pub fn eval_mag(&self, x: &[f64]) -> (f64, f64) {
        let (value, mag) = eval_terms(&self.terms, x);
        let xmax = x.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let slope = if xmax == 0.0 { 0.0 } else { eval_terms(&self.slope, x).1 };
        (value, mag + xmax * slope)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| eval_terms(g, x).0).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.iter().all(|&e| e == 0))
    }
}

/// Sign of a float polynomial value, with values below `tol · mag`
/// counted as zero.
pub fn tolerant_sign(value: f64, mag: f64, tol: f64) -> Ordering {
    if value.abs() <= tol * mag {
        Ordering::Equal
    } else if value > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

#[derive(Clone, Debug)]
pub struct CompiledConj {
    pub atoms: Vec<(FloatPoly, Rel)>,
    eqs: Vec<usize>,
}

impl CompiledConj {
    pub fn equalities(&self) -> Vec<&FloatPoly> {
        self.eqs.iter().map(|&i| &self.atoms[i].0).collect()
    }

    pub fn holds(&self, x: &[f64], tol: f64) -> bool {
        self.atoms.iter().all(|(p, rel)| {
            let (v, m) = p.eval_mag(x);
            rel.holds(tolerant_sign(v, m, tol))
        })
    }
}

/// A set in disjunctive normal form with float polynomials.
#[derive(Clone, Debug)]
pub struct CompiledSet {
    n: usize,
    pub disjuncts: Vec<CompiledConj>,
}

impl CompiledSet {
    pub fn new(set: &SemialgebraicSet) -> Self {
        let disjuncts = set
            .formula()
            .dnf()
            .into_iter()
            .map(|conj| {
                let atoms: Vec<(FloatPoly, Rel)> =
                    conj.iter().map(|a| (FloatPoly::new(&a.poly), a.rel)).collect();
                let eqs = atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, r))| *r == Rel::Eq)
                    .map(|(i, _)| i)
                    .collect();
                CompiledConj { atoms, eqs }
            })
            .collect();
        CompiledSet { n: set.dim(), disjuncts }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_tol(x, FLOAT_TOLERANCE)
    }

    pub fn contains_tol(&self, x: &[f64], tol: f64) -> bool {
        self.disjuncts.iter().any(|d| d.holds(x, tol))
    }

    pub fn satisfied(&self, x: &[f64]) -> Vec<usize> {
        (0..self.disjuncts.len()).filter(|&i| self.disjuncts[i].holds(x, FLOAT_TOLERANCE)).collect()
    }
}

fn residual_ok(eqs: &[&FloatPoly], x: &[f64]) -> (bool, f64) {
    let mut ok = true;
    let mut norm = 0.0;
    for e in eqs {
        let (v, m) = e.eval_mag(x);
        if v.abs() > NEWTON_TOLERANCE * m {
            ok = false;
        }
        norm += v * v;
    }
    (ok, norm.sqrt())
}

/// Jacobian of `eqs` at `x`, one row per equation.
pub fn jacobian(eqs: &[&FloatPoly], x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(eqs.len(), n);
    for (r, e) in eqs.iter().enumerate() {
        for (c, g) in e.gradient(x).into_iter().enumerate() {
            j[(r, c)] = g;
        }
    }
    j
}

/// Cholesky factor of `J Jᵀ` when `J` has full row rank with some margin.
fn well_conditioned_cholesky(j: &DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if j.nrows() > j.ncols() {
        return None;
    }
    let ch = (j * j.transpose()).cholesky()?;
    let d = ch.l_dirty().diagonal();
    let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    (hi > 0.0 && lo > hi * 1e-6).then_some(ch)
}

/// Damped minimum-norm Newton iteration onto `{eqs = 0}` starting at `x0`.
/// With `basis` (an `n × k` matrix) the steps are restricted to its column
/// span. Returns `None` when the iteration stalls.
pub fn newton_project(
    eqs: &[&FloatPoly],
    x0: &[f64],
    basis: Option<&DMatrix<f64>>,
    max_iter: usize,
) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    if eqs.is_empty() {
        return Some(x);
    }
    let (mut ok, mut norm) = residual_ok(eqs, &x);
    for _ in 0..max_iter {
        if ok {
            return Some(x);
        }
        let f = DVector::from_iterator(eqs.len(), eqs.iter().map(|e| e.eval(&x)));
        let j = jacobian(eqs, &x);
        let jr = match basis {
            Some(b) => &j * b,
            None => j,
        };
        let step = if jr.nrows() == 1 {
            let g2 = jr.norm_squared();
            if g2 == 0.0 || !g2.is_finite() {
                return None;
            }
            jr.transpose() * (f / g2)
        } else if let Some(ch) = well_conditioned_cholesky(&jr) {
            jr.transpose() * ch.solve(&f)
        } else {
            let svd = jr.svd(true, true);
            let smax = svd.singular_values.max();
            if smax == 0.0 || !smax.is_finite() {
                return None;
            }
            svd.pseudo_inverse(smax * 1e-12).ok()? * f
        };
        let dx = match basis {
            Some(b) => b * step,
            None => step,
        };
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..12 {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(xi, di)| xi - lambda * di).collect();
            let (tok, tnorm) = residual_ok(eqs, &trial);
            if tok || tnorm < norm {
                x = trial;
                ok = tok;
                norm = tnorm;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved {
            return None;
        }
    }
    if ok {
        Some(x)
    } else {
        None
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleResult {
    pub points: Vec<Vec<f64>>,
    pub starved: bool,
    pub attempts: usize,
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, p: &[f64], radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = p.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let r2: f64 = v.iter().map(|c| c * c).sum();
        if r2 < 1.0 {
            return p.iter().zip(v).map(|(pi, vi)| pi + radius * vi).collect();
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Up to `count` points of the set within `radius` of `p`. Candidates are
/// uniform in the ball, pushed onto the equalities of one disjunct (taken
/// round-robin) by Newton projection, and kept if they pass the membership
/// test. At most `100 · count` candidates are tried; `starved` reports a
/// shortfall.
pub fn sample_near(
    set: &SemialgebraicSet,
    p: &[f64],
    radius: f64,
    count: usize,
    seed: u64,
) -> SampleResult {
    assert!(radius > 0.0, "radius must be positive");
    assert_eq!(p.len(), set.dim(), "dimension mismatch");
    let compiled = set.compile();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 100 * count.max(1);
    let mut points = Vec::new();
    let mut attempts = 0;
    while points.len() < count && attempts < budget {
        let d = &compiled.disjuncts[attempts % compiled.disjuncts.len()];
        attempts += 1;
        let x0 = uniform_in_ball(&mut rng, p, radius);
        let Some(x) = newton_project(&d.equalities(), &x0, None, 60) else {
            continue;
        };
        if dist(&x, p) < radius && compiled.contains(&x) {
            points.push(x);
        }
    }
    SampleResult { starved: points.len() < count, points, attempts }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    /// Every sample was a smooth point of a complete intersection.
    High,
    /// Some sample had a rank-deficient Jacobian, so `n − rank` is only an
    /// upper bound there.
    Low,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionEstimate {
    pub dim: Option<usize>,
    pub confidence: Confidence,
    pub samples: usize,
}

/// Numerical rank with singular values below `rel · σ_max` dropped.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel * smax).count()
}

/// Local dimension near `p`: the largest `n − rank J` over sampled points
/// and the disjuncts they satisfy, `J` being the Jacobian of that
/// disjunct's equalities.
pub fn local_dimension_estimate(set: &SemialgebraicSet, p: &[f64], seed: u64) -> DimensionEstimate {
    let n = set.dim();
    let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
    let radius = 0.05 * norm.max(1.0);
    let sample = sample_near(set, p, radius, 30, seed);
    if sample.points.is_empty() {
        return DimensionEstimate { dim: None, confidence: Confidence::Unknown, samples: 0 };
    }
    let compiled = set.compile();
    let mut best = 0;
    let mut singular = false;
    for x in &sample.points {
        for d in compiled.satisfied(x) {
            let eqs = compiled.disjuncts[d].equalities();
            let r = if eqs.is_empty() { 0 } else { numerical_rank(&jacobian(&eqs, x), 1e-8) };
            if r < eqs.len() {
                singular = true;
            }
            best = best.max(n - r);
        }
    }
    let confidence = if singular || sample.starved { Confidence::Low } else { Confidence::High };
    DimensionEstimate { dim: Some(best), confidence, samples: sample.points.len() }
}
