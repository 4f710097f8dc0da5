//! Lifting a risometry `φ` fixing 0 to its tangent cones.
//!
//! Along the ray `t·x` the map gives `φ(t·x)/t`, whose `t⁰` coefficient
//! is the degree-1 homogeneous part of `φ`. So `ψ` is read off exactly;
//! a constant term would make `φ(t·x)/t` blow up and disqualifies `φ`.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::StratError;
use crate::cone::{cone_scan, decide, ConeQuery, ConeStatus, EngineConfig, ScanResult};
use crate::poly::{q, PolyMap, Rational};
use crate::puiseux::{risometry_check, same_ray, PuiseuxPoint, PuiseuxSeries, RisometryReport};
use crate::semialg::SemialgebraicSet;

#[derive(Clone, Debug)]
pub struct LiftConfig {
    pub pairs: usize,
    /// Pairs are placed at scales `t^1, …, t^max_scale`.
    pub max_scale: u32,
    pub resolution: usize,
    pub seed: u64,
    pub engines: EngineConfig,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig { pairs: 1000, max_scale: 4, resolution: 16, seed: 0, engines: EngineConfig::default() }
    }
}

/// Pass/fail counts of a [`RisometryReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RisometrySummary {
    pub passed: usize,
    pub failed: usize,
    pub indeterminate: usize,
}

impl From<&RisometryReport> for RisometrySummary {
    fn from(r: &RisometryReport) -> Self {
        RisometrySummary { passed: r.passed, failed: r.failed, indeterminate: r.indeterminate }
    }
}

impl RisometrySummary {
    pub fn all_pass(&self) -> bool {
        self.failed == 0 && self.indeterminate == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    /// Components of `ψ`, printed with the set's variables.
    pub psi: Vec<String>,
    #[serde(skip)]
    pub psi_map: PolyMap,
    pub psi_is_identity: bool,
    pub phi_risometry: RisometrySummary,
    pub psi_risometry: RisometrySummary,
    /// Supported directions of `X` on the grid.
    pub source_directions: usize,
    /// Images `ψ(y)` that are not supported for `Y`.
    pub unmapped: Vec<Vec<String>>,
    /// Images whose status for `Y` is indeterminate.
    pub undecided: Vec<Vec<String>>,
    /// Supported directions of `Y` not hit by any `ψ(y)`.
    pub missed: Vec<Vec<String>>,
    /// `ψ` carries the sampled cone of `X` onto that of `Y`.
    pub onto: bool,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.phi_risometry.all_pass() && self.psi_risometry.all_pass() && self.onto
    }
}

fn fmt_dir(y: &[Rational]) -> Vec<String> {
    y.iter().map(|c| c.to_string()).collect()
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.random_range(-9..=9), rng.random_range(1..=4))
}

/// `count` pairs of points of `R^n` over the series field, spread over the
/// scales `t^1..t^max_scale`; each coordinate is `a·t^k + b·t^(k+1/2)`.
/// The two points of a pair differ in their leading part.
pub fn lift_sample_pairs(n: usize, count: usize, max_scale: u32, seed: u64) -> Vec<(PuiseuxPoint, PuiseuxPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng, k: u32| -> (Vec<Rational>, PuiseuxPoint) {
        let lead: Vec<Rational> = (0..n).map(|_| random_rational(rng)).collect();
        let coords = lead
            .iter()
            .map(|a| {
                let e = Rational::from_integer(k.into());
                PuiseuxSeries::from_terms([(e.clone(), a.clone()), (e + q(1, 2), random_rational(rng))], None)
            })
            .collect();
        (lead, PuiseuxPoint::new(coords))
    };
    (0..count)
        .map(|i| {
            let k = 1 + (i as u32) % max_scale.max(1);
            let (la, a) = point(&mut rng, k);
            loop {
                let (lb, b) = point(&mut rng, k);
                if lb != la {
                    return (a.clone(), b);
                }
            }
        })
        .collect()
}

fn linear_lift(phi: &PolyMap) -> Result<PolyMap, StratError> {
    if let Some(component) = phi.components().iter().position(|c| !c.constant_term().is_zero()) {
        return Err(StratError::NotLiftCandidate { component });
    }
    Ok(phi.linear_part())
}

/// Builds `ψ` from `φ`, checks both are risometries on sampled pairs and
/// that `ψ` maps the sampled cone of `X` at 0 onto that of `Y`.
pub fn cone_risometry_lift(
    phi: &PolyMap,
    x: &SemialgebraicSet,
    y: &SemialgebraicSet,
    config: &LiftConfig,
) -> Result<LiftReport, StratError> {
    let n = x.dim();
    if phi.dim() != n || y.dim() != n {
        return Err(StratError::Dimension { expected: n, found: if phi.dim() != n { phi.dim() } else { y.dim() } });
    }
    let psi = linear_lift(phi)?;
    let pairs = lift_sample_pairs(n, config.pairs, config.max_scale, config.seed);
    let phi_risometry = RisometrySummary::from(&risometry_check(phi, &pairs));
    let psi_risometry = RisometrySummary::from(&risometry_check(&psi, &pairs));

    let zero = vec![q(0, 1); n];
    let scan_x = cone_scan(x, &zero, config.resolution, &config.engines)?;
    let scan_y = cone_scan(y, &zero, config.resolution, &config.engines)?;
    let sources = scan_x.supported();
    let images: Vec<Vec<Rational>> = sources.iter().map(|d| psi.apply(d)).collect();
    let mut unmapped = Vec::new();
    let mut undecided = Vec::new();
    for image in &images {
        let status = decide(&ConeQuery::new(y.clone(), zero.clone(), image.clone())?, &config.engines).status;
        match status {
            ConeStatus::Supported => {}
            ConeStatus::Unsupported => unmapped.push(fmt_dir(image)),
            ConeStatus::Indeterminate => undecided.push(fmt_dir(image)),
        }
    }
    let missed: Vec<Vec<String>> = scan_y
        .supported()
        .into_iter()
        .filter(|z| !images.iter().any(|im| same_ray(im, z)))
        .map(fmt_dir)
        .collect();
    let onto = unmapped.is_empty() && undecided.is_empty() && missed.is_empty();
    Ok(LiftReport {
        psi: psi.components().iter().map(|c| c.display_with(x.vars()).to_string()).collect(),
        psi_is_identity: psi.is_identity(),
        psi_map: psi,
        phi_risometry,
        psi_risometry,
        source_directions: sources.len(),
        unmapped,
        undecided,
        missed,
        onto,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeDifference {
    pub y: Vec<String>,
    pub status_x: ConeStatus,
    pub status_y: ConeStatus,
    /// Both answers carry a certificate (an exact witness or an exact
    /// obstruction).
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EqualConesReport {
    pub p: Vec<String>,
    pub resolution: usize,
    pub compared: usize,
    /// Directions left out because one side is indeterminate.
    pub excluded: usize,
    pub differences: Vec<ConeDifference>,
    /// Scans agree on every compared direction.
    pub equal: bool,
    /// Some difference is certified on both sides, so no risometry can
    /// carry one germ onto the other.
    pub certified_difference: bool,
    pub phi_risometry: Option<RisometrySummary>,
}

fn certified(scan: &ScanResult, k: usize) -> bool {
    let d = &scan.entries[k].decision;
    match d.status {
        ConeStatus::Supported => d.verdicts.iter().any(|v| v.is_supported() && v.certified),
        ConeStatus::Unsupported => d.verdicts.iter().any(|v| v.is_certified_unsupported()),
        ConeStatus::Indeterminate => false,
    }
}

/// Compares the scanned cones of `X` and `Y` at `p`. Equal germs up to a
/// risometry have equal cones, so a certified difference rules out any
/// risometry between them.
pub fn risometry_implies_equal_cones_check(
    phi: Option<&PolyMap>,
    x: &SemialgebraicSet,
    y: &SemialgebraicSet,
    p: &[Rational],
    resolution: usize,
    config: &EngineConfig,
) -> Result<EqualConesReport, StratError> {
    if y.dim() != x.dim() {
        return Err(StratError::Dimension { expected: x.dim(), found: y.dim() });
    }
    let phi_risometry = match phi {
        Some(m) => {
            linear_lift(m)?;
            let pairs = lift_sample_pairs(x.dim(), 1000, 4, config.seed);
            Some(RisometrySummary::from(&risometry_check(m, &pairs)))
        }
        None => None,
    };
    let sx = cone_scan(x, p, resolution, config)?;
    let sy = cone_scan(y, p, resolution, config)?;
    let mut excluded = 0;
    let mut differences = Vec::new();
    for k in 0..sx.entries.len() {
        let (a, b) = (sx.entries[k].decision.status, sy.entries[k].decision.status);
        if a == ConeStatus::Indeterminate || b == ConeStatus::Indeterminate {
            excluded += 1;
        } else if a != b {
            differences.push(ConeDifference {
                y: fmt_dir(&sx.entries[k].y),
                status_x: a,
                status_y: b,
                certified: certified(&sx, k) && certified(&sy, k),
            });
        }
    }
    Ok(EqualConesReport {
        p: fmt_dir(p),
        resolution,
        compared: sx.entries.len() - excluded,
        excluded,
        equal: differences.is_empty(),
        certified_difference: differences.iter().any(|d| d.certified),
        differences,
        phi_risometry,
    })
}
