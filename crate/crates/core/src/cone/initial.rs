use num_traits::Zero;

use super::ConeError;
use crate::poly::{Polynomial, Rational};
use crate::semialg::{Formula, Rel, SemialgebraicSet};

fn initial_at(f: &Polynomial, p: &[Rational]) -> Result<Polynomial, ConeError> {
    if p.len() != f.nvars() {
        return Err(ConeError::Dimension { expected: f.nvars(), found: p.len() });
    }
    if f.is_zero() {
        return Err(ConeError::ZeroPolynomial);
    }
    Ok(f.translate(p)?.initial_form()?)
}

/// `{in_p(f) = 0}`: the zero set of the lowest-degree homogeneous part of
/// `f(p + ·)`. It contains the tangent cone of `{f = 0}` at `p`, often
/// strictly (`x² + y² = 0` versus `x² − y³ = 0`, say).
pub fn initial_form_cone(f: &Polynomial, p: &[Rational], vars: &[String]) -> Result<SemialgebraicSet, ConeError> {
    let g = initial_at(f, p)?;
    if vars.len() != f.nvars() {
        return Err(ConeError::Dimension { expected: f.nvars(), found: vars.len() });
    }
    Ok(SemialgebraicSet::new(vars.to_vec(), Formula::atom(g, Rel::Eq)))
}

/// True when `in_p(f)(y) ≠ 0`, which certifies `y ∉ C_p({f = 0})`.
pub fn initial_form_excludes(f: &Polynomial, p: &[Rational], y: &[Rational]) -> Result<bool, ConeError> {
    let g = initial_at(f, p)?;
    if y.len() != f.nvars() {
        return Err(ConeError::Dimension { expected: f.nvars(), found: y.len() });
    }
    Ok(!g.eval_rational(y)?.is_zero())
}
