//! Whitney conditions on samples.
//!
//! For strata `S_i` (small) and `S_j` (big), pick base points `y ∈ S_i`
//! and, at radii `r₀, r₀/2, r₀/4, …`, points `x ∈ S_j` within that radius
//! of `y`. With `T = T_x S_j`:
//!
//! * (a) defect: the largest distance from a unit vector of `T_y S_i` to
//!   `T`;
//! * (b) defect: the distance from the unit secant `(x − y')/‖x − y'‖` to
//!   `T`, where `y'` is `x` pushed back onto `S_i`.
//!
//! Both are sines of angles. A violation needs the worst defect above
//! tolerance at each of the last three radii, so one bad sample at a
//! coarse radius is not enough.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{is_trivially_empty, StratError, Stratification};
use crate::cone::mix_seed;
use crate::semialg::{newton_project, sample_near, SemialgebraicSet, FLOAT_TOLERANCE};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhitneyConfig {
    pub tol: f64,
    pub ratio: f64,
    pub levels: usize,
    pub r0: f64,
    pub base_points: usize,
    pub per_level: usize,
    /// Base points are sampled in the unit ball around this point.
    pub center: Option<Vec<f64>>,
}

impl Default for WhitneyConfig {
    fn default() -> Self {
        WhitneyConfig { tol: 1e-3, ratio: 0.5, levels: 12, r0: 1e-3, base_points: 4, per_level: 6, center: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelStats {
    pub radius: f64,
    pub samples: usize,
    pub max_a: f64,
    pub max_b: f64,
}

/// Points from which a defect can be recomputed with [`whitney_defects`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhitneyWitness {
    pub base: Vec<f64>,
    pub x: Vec<f64>,
    pub partner: Vec<f64>,
    pub defect_a: f64,
    pub defect_b: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum WhitneyVerdict {
    NoViolation,
    Violation { condition: char, witness: WhitneyWitness },
    Indeterminate { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhitneyReport {
    pub pair: (usize, usize),
    pub seed: u64,
    /// No base points or no approaching samples: nothing to check.
    pub vacuous: bool,
    pub bases: Vec<Vec<f64>>,
    /// Per radius, worst defects over all base points.
    pub levels: Vec<LevelStats>,
    pub singular_skipped: usize,
    pub verdict: WhitneyVerdict,
}

impl WhitneyReport {
    pub fn finest(&self) -> Option<&LevelStats> {
        self.levels.iter().rev().find(|l| l.samples > 0)
    }

    pub fn max_defect_at_finest(&self) -> f64 {
        self.finest().map_or(0.0, |l| l.max_a.max(l.max_b))
    }

    pub fn is_violation(&self) -> bool {
        matches!(self.verdict, WhitneyVerdict::Violation { .. })
    }
}

fn active_equalities(set: &SemialgebraicSet, x: &[f64]) -> Result<Vec<crate::semialg::FloatPoly>, StratError> {
    let compiled = set.compile();
    let d = compiled
        .disjuncts
        .iter()
        .find(|d| d.holds(x, FLOAT_TOLERANCE))
        .ok_or(StratError::NotInSet)?;
    Ok(d.equalities().into_iter().filter(|e| !e.is_constant()).cloned().collect())
}

/// Orthonormal basis (as columns) of the kernel of the Jacobian of the
/// equalities active at `x`, i.e. the tangent space of a smooth point.
pub fn tangent_space(set: &SemialgebraicSet, x: &[f64]) -> Result<DMatrix<f64>, StratError> {
    let n = set.dim();
    if x.len() != n {
        return Err(StratError::Dimension { expected: n, found: x.len() });
    }
    let eqs = active_equalities(set, x)?;
    if eqs.is_empty() {
        return Ok(DMatrix::identity(n, n));
    }
    // pad to a square matrix so the SVD returns a full V
    let rows = eqs.len().max(n);
    let mut j = DMatrix::zeros(rows, n);
    for (r, e) in eqs.iter().enumerate() {
        for (c, g) in e.gradient(x).into_iter().enumerate() {
            j[(r, c)] = g;
        }
    }
    let svd = j.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-8 * smax && smax > 0.0).count();
    if rank < eqs.len() {
        return Err(StratError::Singular { rank, eqs: eqs.len() });
    }
    let kernel: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| !(svd.singular_values[k] > 1e-8 * smax)).collect();
    Ok(DMatrix::from_fn(n, kernel.len(), |r, c| v_t[(kernel[c], r)]))
}

/// Distance from the unit vector `u` to the column span of `t`.
fn distance_to_span(t: &DMatrix<f64>, u: &[f64]) -> f64 {
    let u = nalgebra::DVector::from_column_slice(u);
    let proj = t * (t.transpose() * &u);
    (u - proj).norm()
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let l = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    (l > 0.0).then(|| v.iter().map(|c| c / l).collect())
}

/// Recomputes the (a) and (b) defects for `x ∈ big`, base `y ∈ small` and
/// secant partner `partner ∈ small`.
pub fn whitney_defects(
    small: &SemialgebraicSet,
    big: &SemialgebraicSet,
    y: &[f64],
    x: &[f64],
    partner: &[f64],
) -> Result<(f64, f64), StratError> {
    let t = tangent_space(big, x)?;
    let ty = tangent_space(small, y)?;
    let a = (0..ty.ncols())
        .map(|c| distance_to_span(&t, ty.column(c).as_slice()))
        .fold(0.0, f64::max);
    let secant: Vec<f64> = x.iter().zip(partner).map(|(u, v)| u - v).collect();
    let b = unit(&secant).map_or(0.0, |s| distance_to_span(&t, &s));
    Ok((a, b))
}

/// Pushes `x` onto the equalities of a disjunct of `small` that holds at
/// `y`; falls back to `y`.
fn partner_of(small: &SemialgebraicSet, y: &[f64], x: &[f64]) -> Vec<f64> {
    let compiled = small.compile();
    if let Some(d) = compiled.disjuncts.iter().find(|d| d.holds(y, FLOAT_TOLERANCE)) {
        if let Some(p) = newton_project(&d.equalities(), x, None, 60) {
            if compiled.contains(&p) {
                return p;
            }
        }
    }
    y.to_vec()
}

/// Samples Whitney (a)/(b) defects for the pair `(i, j)`.
pub fn whitney_check(
    s: &Stratification,
    pair: (usize, usize),
    config: &WhitneyConfig,
    seed: u64,
) -> Result<WhitneyReport, StratError> {
    let (i, j) = pair;
    if i >= j {
        return Err(StratError::Pair { i, j });
    }
    let small = s.stratum(i)?;
    let big = s.stratum(j)?;
    let n = s.ambient_dim();
    let mut report = WhitneyReport {
        pair,
        seed,
        vacuous: true,
        bases: Vec::new(),
        levels: Vec::new(),
        singular_skipped: 0,
        verdict: WhitneyVerdict::NoViolation,
    };
    if is_trivially_empty(small) || is_trivially_empty(big) {
        return Ok(report);
    }
    let center = config.center.clone().unwrap_or_else(|| vec![0.0; n]);
    let mut bases = Vec::new();
    if small.eval_f64(&center)? {
        bases.push(center.clone());
    }
    let more = config.base_points.saturating_sub(bases.len());
    bases.extend(sample_near(small, &center, 1.0, more, mix_seed(seed, 0)).points);
    if bases.is_empty() {
        return Ok(report);
    }
    let mut worst: Option<WhitneyWitness> = None;
    for level in 0..config.levels {
        let radius = config.r0 * config.ratio.powi(level as i32);
        let mut stats = LevelStats { radius, samples: 0, max_a: 0.0, max_b: 0.0 };
        let mut level_worst: Option<WhitneyWitness> = None;
        for (b, y) in bases.iter().enumerate() {
            let sample = sample_near(big, y, radius, config.per_level, mix_seed(seed, 1 + (level * 1000 + b) as u64));
            for x in sample.points {
                let partner = partner_of(small, y, &x);
                match whitney_defects(small, big, y, &x, &partner) {
                    Ok((a, bb)) => {
                        stats.samples += 1;
                        stats.max_a = stats.max_a.max(a);
                        stats.max_b = stats.max_b.max(bb);
                        let w = WhitneyWitness { base: y.clone(), x, partner, defect_a: a, defect_b: bb, radius };
                        if level_worst.as_ref().is_none_or(|o| a.max(bb) > o.defect_a.max(o.defect_b)) {
                            level_worst = Some(w);
                        }
                    }
                    Err(StratError::Singular { .. }) | Err(StratError::NotInSet) => report.singular_skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        if level + 1 == config.levels {
            worst = level_worst;
        }
        report.levels.push(stats);
    }
    report.bases = bases;
    let data: Vec<&LevelStats> = report.levels.iter().filter(|l| l.samples > 0).collect();
    report.vacuous = data.is_empty();
    let tail = &report.levels[report.levels.len().saturating_sub(3)..];
    let consistent = |f: fn(&LevelStats) -> f64| tail.len() == 3 && tail.iter().all(|l| l.samples > 0 && f(l) > config.tol);
    let bad_a = consistent(|l| l.max_a);
    let bad_b = consistent(|l| l.max_b);
    report.verdict = match (bad_a || bad_b, worst) {
        (true, Some(w)) => WhitneyVerdict::Violation { condition: if bad_a { 'a' } else { 'b' }, witness: w },
        (true, None) => WhitneyVerdict::Indeterminate { reason: "no witness at the finest radius".into() },
        (false, _) => {
            let all_singular = report.singular_skipped > 0 && data.is_empty();
            if all_singular {
                WhitneyVerdict::Indeterminate { reason: "every sample was singular".into() }
            } else {
                WhitneyVerdict::NoViolation
            }
        }
    };
    Ok(report)
}

/// [`whitney_check`] for several seeds.
pub fn whitney_check_seeds(
    s: &Stratification,
    pair: (usize, usize),
    config: &WhitneyConfig,
    seeds: &[u64],
) -> Result<Vec<WhitneyReport>, StratError> {
    seeds.iter().map(|&seed| whitney_check(s, pair, config, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strat::tests::surface_first;

    fn set(src: &str) -> SemialgebraicSet {
        src.parse().unwrap()
    }

    #[test]
    fn tangent_spaces() {
        let surface = set("vars x, y, z; x^3 - y^2 - z^2 = 0");
        let t = tangent_space(&surface, &[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(t.ncols(), 2);
        let normal = [3.0, -2.0, 0.0];
        for c in 0..2 {
            let dot: f64 = t.column(c).iter().zip(normal).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-12);
        }
        let circle = set("x^2 + y^2 = 1");
        let t = tangent_space(&circle, &[1.0, 0.0]).unwrap();
        assert!((t[(0, 0)]).abs() < 1e-12 && (t[(1, 0)].abs() - 1.0).abs() < 1e-12);
        let cusp = set("x^3 - y^2 = 0");
        assert!(matches!(tangent_space(&cusp, &[0.0, 0.0]), Err(StratError::Singular { .. })));
        assert_eq!(tangent_space(&cusp, &[1.0, 0.0]), Err(StratError::NotInSet));
    }

    #[test]
    fn surface_origin_pair_passes() {
        let s = surface_first();
        let r = whitney_check(&s, (0, 2), &WhitneyConfig::default(), 11).unwrap();
        assert_eq!(r.verdict, WhitneyVerdict::NoViolation);
        assert!(!r.vacuous);
        assert!(r.max_defect_at_finest() < 1e-3, "{}", r.max_defect_at_finest());
        // coarse radii see the curvature
        assert!(r.levels[0].max_b > r.max_defect_at_finest());
    }

    #[test]
    fn empty_pair_is_vacuous() {
        let r = whitney_check(&surface_first(), (1, 2), &WhitneyConfig::default(), 0).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.verdict, WhitneyVerdict::NoViolation);
        assert!(whitney_check(&surface_first(), (2, 1), &WhitneyConfig::default(), 0).is_err());
    }

    fn vars3() -> Vec<String> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn cuspidal_edge_passes() {
        let v = vars3();
        let s1 = SemialgebraicSet::parse_with_vars("x = 0 && y = 0", &v).unwrap();
        let s2 = SemialgebraicSet::parse_with_vars("x^3 - y^2 = 0 && x > 0", &v).unwrap();
        let s = Stratification::from_indexed(&v, [(1, s1), (2, s2)]).unwrap();
        let r = whitney_check(&s, (1, 2), &WhitneyConfig::default(), 4).unwrap();
        assert!(!r.vacuous);
        assert_eq!(r.verdict, WhitneyVerdict::NoViolation);
    }

    #[test]
    fn transverse_line_violates_a() {
        let v = vars3();
        let s1 = SemialgebraicSet::parse_with_vars("x = 0 && y = 0", &v).unwrap();
        let s2 = SemialgebraicSet::parse_with_vars("z = 0 && x^2 + y^2 > 0", &v).unwrap();
        let s = Stratification::from_indexed(&v, [(1, s1), (2, s2)]).unwrap();
        let r = whitney_check(&s, (1, 2), &WhitneyConfig::default(), 9).unwrap();
        let WhitneyVerdict::Violation { condition, witness } = &r.verdict else {
            panic!("{:?}", r.verdict);
        };
        assert_eq!(*condition, 'a');
        assert!((witness.defect_a - 1.0).abs() < 1e-9);
        let again = whitney_defects(
            s.stratum(1).unwrap(),
            s.stratum(2).unwrap(),
            &witness.base,
            &witness.x,
            &witness.partner,
        )
        .unwrap();
        assert_eq!(again, (witness.defect_a, witness.defect_b));
    }
}
