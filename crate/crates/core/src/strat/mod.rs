//! Stratifications and the checks around them: the dimension bound
//! `dim S_{≤d} ≤ d`, the strata induced on a tangent cone, Whitney
//! conditions (a) and (b) on samples, and lifting a risometry to the cone.

mod induced;
mod lift;
mod whitney;

pub use induced::{
    cone_dimension_from_grid, induced_cone_strata, induced_membership, Diagnostic, InducedConeStrata,
    InducedStratum, PrefixCone,
};
pub use lift::{
    cone_risometry_lift, lift_sample_pairs, risometry_implies_equal_cones_check, ConeDifference,
    EqualConesReport, LiftConfig, LiftReport, RisometrySummary,
};
pub use whitney::{
    tangent_space, whitney_check, whitney_check_seeds, whitney_defects, LevelStats, WhitneyConfig,
    WhitneyReport, WhitneyVerdict, WhitneyWitness,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cone::ConeError;
use crate::poly::{qi, PolyError, Polynomial};
use crate::puiseux::PuiseuxError;
use crate::semialg::{local_dimension_estimate, sample_near, Confidence, Formula, Rel, SemialgError, SemialgebraicSet};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum StratError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("a stratification of R^{n} needs {} strata, found {found}", n + 1)]
    StrataCount { n: usize, found: usize },
    #[error("strata use different variables")]
    Variables,
    #[error("stratum index {index} out of range")]
    Index { index: usize },
    #[error("pair ({i}, {j}) must satisfy i < j")]
    Pair { i: usize, j: usize },
    #[error("singular sample: Jacobian of the active equalities has rank {rank} < {eqs}")]
    Singular { rank: usize, eqs: usize },
    #[error("point is not in the set")]
    NotInSet,
    #[error("not a lift candidate: component {component} has a nonzero constant term")]
    NotLiftCandidate { component: usize },
    #[error(transparent)]
    Semialg(#[from] SemialgError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Puiseux(#[from] PuiseuxError),
}

/// The empty set over `vars`, written `1 = 0`.
pub fn empty_set(vars: &[String]) -> SemialgebraicSet {
    SemialgebraicSet::new(vars.to_vec(), Formula::atom(Polynomial::one(vars.len()), Rel::Eq))
}

/// True when every disjunct contains a constant atom that fails, so the
/// set is empty without any sampling.
pub fn is_trivially_empty(set: &SemialgebraicSet) -> bool {
    set.formula().dnf().iter().all(|conj| {
        conj.iter().any(|a| {
            a.poly.is_constant() && !a.rel.holds(a.poly.constant_term().cmp(&qi(0)))
        })
    })
}

/// Strata `S_0, …, S_n` of `R^n`; `S_d` is meant to have dimension `d`
/// where nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification {
    vars: Vec<String>,
    strata: Vec<SemialgebraicSet>,
}

impl Stratification {
    pub fn new(strata: Vec<SemialgebraicSet>) -> Result<Self, StratError> {
        let Some(first) = strata.first() else {
            return Err(StratError::StrataCount { n: 0, found: 0 });
        };
        let vars = first.vars().to_vec();
        if strata.iter().any(|s| s.vars() != vars.as_slice()) {
            return Err(StratError::Variables);
        }
        if strata.len() != vars.len() + 1 {
            return Err(StratError::StrataCount { n: vars.len(), found: strata.len() });
        }
        Ok(Stratification { vars, strata })
    }

    /// Builds from per-index formulas; missing indices are empty.
    pub fn from_indexed(
        vars: &[String],
        parts: impl IntoIterator<Item = (usize, SemialgebraicSet)>,
    ) -> Result<Self, StratError> {
        let mut strata: Vec<SemialgebraicSet> = (0..=vars.len()).map(|_| empty_set(vars)).collect();
        for (i, s) in parts {
            if i > vars.len() {
                return Err(StratError::Index { index: i });
            }
            if s.vars() != vars {
                return Err(StratError::Variables);
            }
            strata[i] = s;
        }
        Stratification::new(strata)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn ambient_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn strata(&self) -> &[SemialgebraicSet] {
        &self.strata
    }

    pub fn stratum(&self, i: usize) -> Result<&SemialgebraicSet, StratError> {
        self.strata.get(i).ok_or(StratError::Index { index: i })
    }

    /// `S_{≤d}`, built from `S_0, …, S_d` only.
    pub fn prefix(&self, d: usize) -> Result<SemialgebraicSet, StratError> {
        if d > self.ambient_dim() {
            return Err(StratError::Index { index: d });
        }
        let parts: Vec<&SemialgebraicSet> = self.strata[..=d].iter().filter(|s| !is_trivially_empty(s)).collect();
        Ok(match parts.split_first() {
            None => empty_set(&self.vars),
            Some((head, rest)) => rest.iter().fold((*head).clone(), |acc, s| acc.union(s)),
        })
    }

    /// Sampled partition check: random points of the box `[-1, 1]^n` and
    /// points sampled on each stratum must lie in exactly one stratum.
    pub fn check_partition(&self, count: usize, seed: u64) -> PartitionReport {
        let n = self.ambient_dim();
        let compiled: Vec<_> = self.strata.iter().map(|s| s.compile()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<Vec<f64>> = (0..count).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        for (i, s) in self.strata.iter().enumerate() {
            if !is_trivially_empty(s) {
                points.extend(sample_near(s, &vec![0.0; n], 1.0, count / 4 + 1, seed ^ (i as u64 + 1)).points);
            }
        }
        let mut overlaps = Vec::new();
        let mut uncovered = Vec::new();
        for x in &points {
            let hits: Vec<usize> = (0..compiled.len()).filter(|&i| compiled[i].contains(x)).collect();
            match hits.len() {
                0 => uncovered.push(x.clone()),
                1 => {}
                _ => overlaps.push((x.clone(), hits)),
            }
        }
        PartitionReport { points: points.len(), overlaps, uncovered }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub points: usize,
    pub overlaps: Vec<(Vec<f64>, Vec<usize>)>,
    pub uncovered: Vec<Vec<f64>>,
}

impl PartitionReport {
    pub fn ok(&self) -> bool {
        self.overlaps.is_empty() && self.uncovered.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionRow {
    pub d: usize,
    /// `None` when no sample of `S_{≤d}` was found.
    pub estimate: Option<usize>,
    pub confidence: Confidence,
    /// `Some(false)` flags `dim S_{≤d} > d`.
    pub holds: Option<bool>,
}

/// Estimated dimension of a set: the largest local estimate at the origin
/// and at a few points sampled in the unit ball, maximized over `seeds`.
pub fn set_dimension_estimate(set: &SemialgebraicSet, seeds: &[u64]) -> (Option<usize>, Confidence) {
    let n = set.dim();
    if is_trivially_empty(set) {
        return (None, Confidence::High);
    }
    let mut best: Option<usize> = None;
    let mut confidence = Confidence::High;
    for &seed in seeds {
        let mut centers = vec![vec![0.0; n]];
        centers.extend(sample_near(set, &vec![0.0; n], 1.0, 4, seed).points);
        for (k, c) in centers.iter().enumerate() {
            let e = local_dimension_estimate(set, c, seed.wrapping_add(k as u64 * 7919));
            if let Some(d) = e.dim {
                best = Some(best.map_or(d, |b| b.max(d)));
                if e.confidence == Confidence::Low {
                    confidence = Confidence::Low;
                }
            }
        }
    }
    if best.is_none() {
        confidence = Confidence::Unknown;
    }
    (best, confidence)
}

/// `dim S_{≤d} ≤ d` for every `d`, by sampling.
pub fn dimension_condition_check(s: &Stratification, seeds: &[u64]) -> Result<Vec<DimensionRow>, StratError> {
    (0..=s.ambient_dim())
        .map(|d| {
            let prefix = s.prefix(d)?;
            let (estimate, confidence) = set_dimension_estimate(&prefix, seeds);
            let holds = match (estimate, confidence) {
                (Some(e), _) => Some(e <= d),
                (None, Confidence::High) => Some(true),
                (None, _) => None,
            };
            Ok(DimensionRow { d, estimate, confidence, holds })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars3() -> Vec<String> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    fn set(src: &str) -> SemialgebraicSet {
        SemialgebraicSet::parse_with_vars(src, &vars3()).unwrap()
    }

    pub(crate) fn surface_first() -> Stratification {
        let origin = "x = 0 && y = 0 && z = 0";
        Stratification::from_indexed(
            &vars3(),
            [
                (0, set(origin)),
                (2, set(&format!("x^3 - y^2 - z^2 = 0 && !({origin})"))),
                (3, set("x^3 - y^2 - z^2 != 0")),
            ],
        )
        .unwrap()
    }

    pub(crate) fn surface_second() -> Stratification {
        let origin = "x = 0 && y = 0 && z = 0";
        let axis = "y = 0 && z = 0 && x > 0";
        Stratification::from_indexed(
            &vars3(),
            [
                (0, set(origin)),
                (1, set(axis)),
                (2, set(&format!("x^3 - y^2 - z^2 = 0 && !({origin})"))),
                (3, set(&format!("x^3 - y^2 - z^2 != 0 && !({axis})"))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn prefixes_and_partition() {
        let s = surface_first();
        assert!(is_trivially_empty(s.stratum(1).unwrap()));
        assert_eq!(s.prefix(1).unwrap(), s.prefix(0).unwrap());
        assert!(s.prefix(3).unwrap().eval_f64(&[0.3, -0.2, 0.9]).unwrap());
        let r = s.check_partition(200, 5);
        assert!(r.ok(), "{r:?}");
        let r = surface_second().check_partition(200, 6);
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn overlapping_strata_are_caught() {
        let s = Stratification::from_indexed(
            &vars3(),
            [(0, set("x = 0 && y = 0 && z = 0")), (3, set("0 = 0"))],
        )
        .unwrap();
        let r = s.check_partition(50, 1);
        assert!(!r.overlaps.is_empty());
    }

    #[test]
    fn dimension_bounds_of_the_surface() {
        let rows = dimension_condition_check(&surface_first(), &[1, 2]).unwrap();
        let est: Vec<Option<usize>> = rows.iter().map(|r| r.estimate).collect();
        assert_eq!(est, vec![Some(0), Some(0), Some(2), Some(3)]);
        assert!(rows.iter().all(|r| r.holds == Some(true)));
    }

    #[test]
    fn line_declared_as_points_is_flagged() {
        let v: Vec<String> = vec!["x".into(), "y".into()];
        let line = SemialgebraicSet::parse_with_vars("y = 0", &v).unwrap();
        let rest = SemialgebraicSet::parse_with_vars("y != 0", &v).unwrap();
        let s = Stratification::from_indexed(&v, [(0, line), (2, rest)]).unwrap();
        let rows = dimension_condition_check(&s, &[3]).unwrap();
        assert_eq!(rows[0].estimate, Some(1));
        assert_eq!(rows[0].holds, Some(false));
    }

    #[test]
    fn construction_errors() {
        let v = vars3();
        assert_eq!(
            Stratification::new(vec![empty_set(&v)]).unwrap_err(),
            StratError::StrataCount { n: 3, found: 1 }
        );
        assert_eq!(Stratification::from_indexed(&v, [(4, empty_set(&v))]).unwrap_err(), StratError::Index { index: 4 });
    }
}
