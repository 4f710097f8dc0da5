use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConeError, ConeQuery, ConeVerdict, Engine, Witness};
use crate::poly::rational_to_f64;
use crate::semialg::{newton_project, CompiledSet, FloatPoly};

/// ε schedule and per-ε candidate budget for the float engines.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericConfig {
    pub schedule: Vec<f64>,
    pub budget: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { schedule: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6], budget: 10_000 }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<(), ConeError> {
        let positive = self.schedule.iter().all(|e| *e > 0.0 && e.is_finite());
        let decreasing = self.schedule.windows(2).all(|w| w[1] < w[0]);
        if self.schedule.is_empty() || !positive || !decreasing || self.budget == 0 {
            return Err(ConeError::BadSchedule);
        }
        Ok(())
    }
}

/// `x ∈ X` with `‖x − p‖ < ε` and `‖a(x − p) − ŷ‖ < ε`, where `ŷ = y/‖y‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericWitness {
    pub eps: f64,
    pub x: Vec<f64>,
    pub a: f64,
    pub residual: f64,
}

/// `(x, r)` with `p + r x ∈ X`, `0 < r < ε` and `‖x − ŷ‖ < ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationWitness {
    pub eps: f64,
    pub x: Vec<f64>,
    pub r: f64,
}

pub(crate) fn mix_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Orthonormal basis of `ŷ^⊥` as the columns of an `n × (n−1)` matrix.
fn normal_basis(yhat: &[f64]) -> DMatrix<f64> {
    let n = yhat.len();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for b in std::iter::once(yhat).chain(cols.iter().map(|c| c.as_slice())) {
            let d: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(b).for_each(|(a, b)| *a -= d * b);
        }
        let l = norm(&v);
        if l > 1e-8 {
            cols.push(v.iter().map(|c| c / l).collect());
        }
        if cols.len() + 1 == n {
            break;
        }
    }
    DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}

/// Candidates near `p` in (roughly) direction `ŷ`: a base point
/// `p + r ŷ` with `r = ε^u`, `u ∈ [1, 4]`, then one of three moves:
/// Newton onto a disjunct's equalities within the normal slice at the
/// base, Newton in full space, or a plain random perturbation.
struct Generator<'a> {
    eqs: Vec<Vec<&'a FloatPoly>>,
    p: Vec<f64>,
    yhat: Option<Vec<f64>>,
    normal: Option<DMatrix<f64>>,
}

impl<'a> Generator<'a> {
    fn new(compiled: &'a CompiledSet, p: Vec<f64>, yhat: Option<Vec<f64>>) -> Self {
        let eqs = compiled.disjuncts.iter().map(|d| d.equalities()).collect();
        let normal = yhat.as_deref().filter(|y| y.len() > 1).map(normal_basis);
        Generator { eqs, p, yhat, normal }
    }

    fn candidate(&self, rng: &mut ChaCha8Rng, eps: f64) -> Option<Vec<f64>> {
        if self.eqs.is_empty() {
            return None;
        }
        let n = self.p.len();
        let r = eps.powf(rng.random_range(1.0..4.0));
        let dir = match &self.yhat {
            Some(y) => y.clone(),
            None => {
                let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let l = norm(&v).max(1e-300);
                v.into_iter().map(|c| c / l).collect()
            }
        };
        let base: Vec<f64> = self.p.iter().zip(&dir).map(|(p, d)| p + r * d).collect();
        let mode = rng.random_range(0..4u8);
        let sigma = if mode == 3 && rng.random_bool(0.5) { 0.0 } else { 10f64.powf(rng.random_range(-4.0..0.0)) };
        let mut noise: Vec<f64> = (0..n).map(|_| r * sigma * rng.random_range(-1.0..1.0)).collect();
        let eqs = &self.eqs[rng.random_range(0..self.eqs.len())];
        match (mode, &self.normal) {
            (0 | 1, Some(b)) => {
                // keep the noise in the slice so the base direction survives
                let coef = b.transpose() * nalgebra::DVector::from_column_slice(&noise);
                let proj = b * coef;
                noise.copy_from_slice(proj.as_slice());
                let x0: Vec<f64> = base.iter().zip(&noise).map(|(a, b)| a + b).collect();
                newton_project(eqs, &x0, Some(b), 20)
            }
            (3, _) => Some(base.iter().zip(&noise).map(|(a, b)| a + b).collect()),
            _ => {
                let x0: Vec<f64> = base.iter().zip(&noise).map(|(a, b)| a + b).collect();
                newton_project(eqs, &x0, None, 20)
            }
        }
    }
}

/// Members of `X` within `ε` of `p` in random directions, to tell an
/// empty neighbourhood from a direction that is merely missed.
fn probe(compiled: &CompiledSet, p: &[f64], eps: f64, budget: usize, rng: &mut ChaCha8Rng) -> usize {
    let gen = Generator::new(compiled, p.to_vec(), None);
    (0..budget)
        .filter_map(|_| gen.candidate(rng, eps))
        .filter(|x| compiled.contains(x) && norm(&x.iter().zip(p).map(|(a, b)| a - b).collect::<Vec<_>>()) < eps)
        .take(1)
        .count()
}

enum Outcome<W> {
    Witnessed(Vec<W>),
    Missed { eps: f64, hits: usize },
}

/// Runs the schedule, stopping at the first ε without a witness.
fn search<W>(
    q: &ConeQuery,
    config: &NumericConfig,
    seed: u64,
    mut accept: impl FnMut(&CompiledSet, &[f64], Option<&[f64]>, &[f64], f64) -> Option<W>,
) -> Result<Outcome<W>, ConeError> {
    config.validate()?;
    let compiled = q.set.compile();
    let p: Vec<f64> = q.p.iter().map(rational_to_f64).collect();
    let y: Vec<f64> = q.y.iter().map(rational_to_f64).collect();
    let ny = norm(&y);
    let yhat = (!q.y_is_zero()).then(|| y.iter().map(|c| c / ny).collect::<Vec<_>>());
    let gen = Generator::new(&compiled, p.clone(), yhat.clone());
    // a tenth of the budget without a single point of X ends the search
    let early = (config.budget / 10).max(1);
    let mut witnesses = Vec::new();
    for (k, &eps) in config.schedule.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, k as u64));
        let mut hits = 0;
        let mut found = None;
        for i in 0..config.budget {
            if i == early && hits == 0 {
                break;
            }
            let Some(x) = gen.candidate(&mut rng, eps) else { continue };
            if !compiled.contains(&x) {
                continue;
            }
            hits += 1;
            if let Some(w) = accept(&compiled, &p, yhat.as_deref(), &x, eps) {
                found = Some(w);
                break;
            }
        }
        match found {
            Some(w) => witnesses.push(w),
            None => {
                if hits == 0 {
                    hits = probe(&compiled, &p, eps, early, &mut rng);
                }
                return Ok(Outcome::Missed { eps, hits });
            }
        }
    }
    Ok(Outcome::Witnessed(witnesses))
}

fn missed(engine: Engine, eps: f64, hits: usize) -> ConeVerdict {
    if hits == 0 {
        ConeVerdict::indeterminate(engine, format!("sampling starved at eps={eps:e}"))
    } else {
        ConeVerdict::unsupported(engine, false, format!("no witness at eps={eps:e}"))
    }
}

/// ε-form search: for every ε of the schedule look for `x ∈ X` and `a > 0`
/// with `‖x − p‖ < ε` and `‖a(x − p) − ŷ‖ < ε`. The best `a` for a given `x`
/// is `⟨x − p, ŷ⟩ / ‖x − p‖²`.
pub fn cone_membership_numeric(
    q: &ConeQuery,
    config: &NumericConfig,
    seed: u64,
) -> Result<ConeVerdict, ConeError> {
    let out = search(q, config, seed, |_, p, yhat, x, eps| {
        let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let nd = norm(&d);
        if nd >= eps {
            return None;
        }
        let Some(yhat) = yhat else {
            return Some(NumericWitness { eps, x: x.to_vec(), a: 1.0, residual: nd });
        };
        if nd == 0.0 {
            return None;
        }
        let a = d.iter().zip(yhat).map(|(u, v)| u * v).sum::<f64>() / (nd * nd);
        if a <= 0.0 {
            return None;
        }
        let residual = norm(&d.iter().zip(yhat).map(|(u, v)| a * u - v).collect::<Vec<_>>());
        (residual < eps).then(|| NumericWitness { eps, x: x.to_vec(), a, residual })
    })?;
    Ok(match out {
        Outcome::Witnessed(w) => ConeVerdict::supported(Engine::Numeric, Some(Witness::Sequence(w)), false),
        Outcome::Missed { eps, hits } => missed(Engine::Numeric, eps, hits),
    })
}

/// Asks whether `(ŷ, 0)` lies in the closure of `D(X − p)`: points
/// `(x, r)` with `0 < r < ε`, `‖x − ŷ‖ < ε` and `p + r x ∈ X`, the last
/// condition re-checked on the reconstructed point.
pub fn deformation_slice_check(
    q: &ConeQuery,
    config: &NumericConfig,
    seed: u64,
) -> Result<ConeVerdict, ConeError> {
    let out = search(q, config, seed, |compiled, p, yhat, z, eps| {
        let d: Vec<f64> = z.iter().zip(p).map(|(a, b)| a - b).collect();
        let nd = norm(&d);
        let (r, x) = match yhat {
            None => {
                let r = eps / 2.0;
                let x: Vec<f64> = d.iter().map(|c| c / r).collect();
                if norm(&x) >= eps {
                    return None;
                }
                (r, x)
            }
            Some(yhat) => {
                if nd == 0.0 {
                    return None;
                }
                let a = d.iter().zip(yhat).map(|(u, v)| u * v).sum::<f64>() / (nd * nd);
                if a <= 1.0 / eps {
                    return None;
                }
                let x: Vec<f64> = d.iter().map(|c| a * c).collect();
                if norm(&x.iter().zip(yhat).map(|(u, v)| u - v).collect::<Vec<_>>()) >= eps {
                    return None;
                }
                (1.0 / a, x)
            }
        };
        let back: Vec<f64> = p.iter().zip(&x).map(|(pi, xi)| pi + r * xi).collect();
        compiled.contains(&back).then_some(DeformationWitness { eps, x, r })
    })?;
    Ok(match out {
        Outcome::Witnessed(w) => {
            ConeVerdict::supported(Engine::Deformation, Some(Witness::Deformation(w)), false)
        }
        Outcome::Missed { eps, hits } => missed(Engine::Deformation, eps, hits),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::ConeStatus;
    use crate::poly::qi;
    use crate::semialg::SemialgebraicSet;

    fn query(set: &str, p: &[i64], y: &[i64]) -> ConeQuery {
        let s: SemialgebraicSet = set.parse().unwrap();
        ConeQuery::new(s, p.iter().map(|&c| qi(c)).collect(), y.iter().map(|&c| qi(c)).collect()).unwrap()
    }

    #[test]
    fn cusp() {
        let cfg = NumericConfig::default();
        let yes = cone_membership_numeric(&query("x^3 - y^2 = 0", &[0, 0], &[1, 0]), &cfg, 1).unwrap();
        assert_eq!(yes.status, ConeStatus::Supported);
        let Some(Witness::Sequence(ws)) = &yes.witness else { panic!() };
        assert_eq!(ws.len(), 6);
        for w in ws {
            let d = (w.x[0].powi(2) + w.x[1].powi(2)).sqrt();
            assert!(d < w.eps && w.a > 0.0 && w.residual < w.eps);
        }
        for y in [[-1, 0], [0, 1], [1, 1]] {
            let no = cone_membership_numeric(&query("x^3 - y^2 = 0", &[0, 0], &y), &cfg, 1).unwrap();
            assert_eq!(no.status, ConeStatus::Unsupported, "{y:?}");
            assert!(!no.certified);
        }
    }

    #[test]
    fn half_line_deformation() {
        let cfg = NumericConfig::default();
        let yes = deformation_slice_check(&query("x > 0", &[0], &[1]), &cfg, 3).unwrap();
        assert_eq!(yes.status, ConeStatus::Supported);
        let no = deformation_slice_check(&query("x > 0", &[0], &[-1]), &cfg, 3).unwrap();
        assert_eq!(no.status, ConeStatus::Unsupported);
    }

    #[test]
    fn empty_set_starves() {
        let v = cone_membership_numeric(&query("vars x, y; 1 = 0", &[0, 0], &[1, 0]), &NumericConfig::default(), 0)
            .unwrap();
        assert_eq!(v.status, ConeStatus::Indeterminate);
    }

    #[test]
    fn zero_direction_needs_p_in_closure() {
        let cfg = NumericConfig::default();
        let v = cone_membership_numeric(&query("x^2 + y^2 < 1", &[1, 0], &[0, 0]), &cfg, 0).unwrap();
        assert_eq!(v.status, ConeStatus::Supported);
        let v = cone_membership_numeric(&query("x^2 + y^2 < 1", &[2, 0], &[0, 0]), &cfg, 0).unwrap();
        assert_ne!(v.status, ConeStatus::Supported);
    }

    #[test]
    fn schedule_validation() {
        let bad = NumericConfig { schedule: vec![1e-2, 1e-1], budget: 10 };
        assert_eq!(bad.validate(), Err(ConeError::BadSchedule));
    }

    #[test]
    fn normal_basis_is_orthonormal() {
        let y = [0.6, 0.8, 0.0];
        let b = normal_basis(&y);
        assert_eq!(b.ncols(), 2);
        let g = b.transpose() * &b;
        assert!((g - DMatrix::<f64>::identity(2, 2)).norm() < 1e-12);
        let yb = DMatrix::from_row_slice(1, 3, &y) * b;
        assert!(yb.norm() < 1e-12);
    }
}
