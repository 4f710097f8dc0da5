use std::fmt;

use num_traits::{One, Zero};

use super::series::{PuiseuxSeries, Valuation};
use super::PuiseuxError;
use crate::poly::{Polynomial, Rational};
use crate::verdict::Verdict3;

/// A point of `R^n` over the series field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PuiseuxPoint {
    pub coords: Vec<PuiseuxSeries>,
}

impl PuiseuxPoint {
    pub fn new(coords: Vec<PuiseuxSeries>) -> Self {
        PuiseuxPoint { coords }
    }

    pub fn zero(n: usize) -> Self {
        PuiseuxPoint { coords: vec![PuiseuxSeries::zero(); n] }
    }

    /// Exact constant point.
    pub fn from_rational(p: &[Rational]) -> Self {
        PuiseuxPoint { coords: p.iter().map(|c| PuiseuxSeries::constant(c.clone())).collect() }
    }

    /// The ray germ `p + t·y`.
    pub fn ray(p: &[Rational], y: &[Rational]) -> Self {
        assert_eq!(p.len(), y.len(), "dimension mismatch");
        let t = PuiseuxSeries::t();
        PuiseuxPoint {
            coords: p
                .iter()
                .zip(y)
                .map(|(pi, yi)| PuiseuxSeries::constant(pi.clone()).add(&t.scale(yi)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Smallest truncation order over the coordinates; `None` if all exact.
    pub fn order(&self) -> Option<Rational> {
        self.coords.iter().filter_map(|c| c.order().cloned()).min()
    }

    pub fn truncate(&self, n: &Rational) -> Self {
        PuiseuxPoint { coords: self.coords.iter().map(|c| c.truncate(n)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        PuiseuxPoint { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        PuiseuxPoint { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.sub(b)).collect() }
    }

    /// Multiplies every coordinate by the series `s`.
    pub fn scale(&self, s: &PuiseuxSeries) -> Self {
        PuiseuxPoint { coords: self.coords.iter().map(|c| c.mul(s)).collect() }
    }

    pub fn eval(&self, f: &Polynomial) -> PuiseuxSeries {
        f.eval(&self.coords)
    }

    /// `v̂`: minimum of the coordinate valuations.
    pub fn vhat(&self) -> Valuation {
        self.coords.iter().fold(Valuation::Infinite, |acc, c| acc.min(&c.valuation()))
    }

    /// `rv̂`: the valuation together with the leading residue vector.
    pub fn rvhat(&self) -> Result<RvClass, PuiseuxError> {
        let gamma = match self.vhat() {
            Valuation::Infinite => return Ok(RvClass::Zero),
            Valuation::AtLeast(v) => {
                return Err(PuiseuxError::Indeterminate(format!(
                    "point is zero up to O(t^{v})"
                )))
            }
            Valuation::Finite(g) => g,
        };
        let residue = self
            .coords
            .iter()
            .map(|c| {
                c.coefficient(&gamma).ok_or_else(|| {
                    PuiseuxError::Indeterminate(format!(
                        "leading residue at t^{gamma} is past the truncation order"
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RvClass::Class { gamma, residue })
    }

    /// `dir`: the line spanned by the leading residue vector.
    pub fn direction(&self) -> Result<Direction, PuiseuxError> {
        match self.rvhat()? {
            RvClass::Zero => Err(PuiseuxError::ZeroDirection),
            RvClass::Class { residue, .. } => Ok(Direction::from_vector(&residue)?),
        }
    }

    /// Limit as `t → 0⁺` of a bounded curve.
    pub fn limit(&self) -> Result<Vec<Rational>, PuiseuxError> {
        self.coords
            .iter()
            .map(|c| match c.residue() {
                Err(PuiseuxError::NotInValuationRing) => Err(PuiseuxError::UnboundedCurve),
                r => r,
            })
            .collect()
    }

    pub fn eval_f64(&self, t: f64) -> Vec<f64> {
        self.coords.iter().map(|c| c.eval_f64(t)).collect()
    }
}

/// Free-function form of [`PuiseuxPoint::limit`].
pub fn ps_limit(curve: &PuiseuxPoint) -> Result<Vec<Rational>, PuiseuxError> {
    curve.limit()
}

impl fmt::Display for PuiseuxPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Element of `RV^(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RvClass {
    Zero,
    Class { gamma: Rational, residue: Vec<Rational> },
}

impl fmt::Display for RvClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RvClass::Zero => write!(f, "rv(0)"),
            RvClass::Class { gamma, residue } => {
                let r: Vec<String> = residue.iter().map(|c| c.to_string()).collect();
                write!(f, "rv(gamma={gamma}, ({}))", r.join(", "))
            }
        }
    }
}

/// Point of projective space over the residue field, stored with its
/// first nonzero coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction(Vec<Rational>);

impl Direction {
    pub fn from_vector(v: &[Rational]) -> Result<Self, PuiseuxError> {
        let lead = v.iter().find(|c| !c.is_zero()).ok_or(PuiseuxError::ZeroDirection)?;
        let inv = lead.recip();
        Ok(Direction(v.iter().map(|c| c * &inv).collect()))
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", r.join(" : "))
    }
}

/// Valuative ball `{x : v̂(x − center) > radius}` (open) or `>= radius`
/// (closed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub center: PuiseuxPoint,
    pub radius: Rational,
    pub closed: bool,
}

impl Ball {
    pub fn open(center: PuiseuxPoint, radius: Rational) -> Self {
        Ball { center, radius, closed: false }
    }

    pub fn closed(center: PuiseuxPoint, radius: Rational) -> Self {
        Ball { center, radius, closed: true }
    }

    pub fn contains(&self, x: &PuiseuxPoint) -> Verdict3 {
        assert_eq!(x.dim(), self.center.dim(), "dimension mismatch");
        x.sub(&self.center).vhat().exceeds(&self.radius, self.closed)
    }
}

/// Free-function form of [`Ball::contains`].
pub fn ball_contains(ball: &Ball, x: &PuiseuxPoint) -> Verdict3 {
    ball.contains(x)
}

/// Primitive integer representative of a rational ray, used to compare
/// directions up to positive scaling.
pub fn primitive_ray(v: &[Rational]) -> Option<Vec<num_bigint::BigInt>> {
    use num_integer::Integer;
    if v.iter().all(|c| c.is_zero()) {
        return None;
    }
    let lcm = v.iter().fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<num_bigint::BigInt> =
        v.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, c| acc.gcd(c));
    Some(ints.into_iter().map(|c| c / &g).collect())
}

/// True when `a = λ b` for some `λ > 0`.
pub fn same_ray(a: &[Rational], b: &[Rational]) -> bool {
    match (primitive_ray(a), primitive_ray(b)) {
        (Some(x), Some(y)) => x == y,
        (None, None) => true,
        _ => false,
    }
}

/// Sign-insensitive check used for `dir`, which is a line, not a ray.
pub fn same_line(a: &[Rational], b: &[Rational]) -> bool {
    match (primitive_ray(a), primitive_ray(b)) {
        (Some(x), Some(y)) => x == y || x.iter().zip(&y).all(|(p, q)| *p == -q),
        (None, None) => true,
        _ => false,
    }
}
