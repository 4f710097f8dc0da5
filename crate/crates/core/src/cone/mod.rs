//! Tangent cones `C_p(X)`: is `y` a limit of `a_μ (x_μ − p)` with
//! `x_μ ∈ X`, `x_μ → p`, `a_μ > 0`?
//!
//! Several independent engines answer the question:
//!
//! * [`cone_membership_numeric`]: ε-witness search with floating points.
//!   Positive answers carry a witness per ε; negative answers only mean
//!   nothing was found within budget.
//! * [`deformation_slice_check`]: the same question asked of the closure of
//!   `D(X) = {(x, r) : p + r x ∈ X}` at `(y, 0)`.
//! * [`cone_membership_puiseux`]: searches for a curve `p + λ t y + …` with
//!   rational Puiseux corrections lying in `X`, and can certify that no
//!   curve exists by a leading-term sign argument.
//! * [`plane_curve_cone`]: exact ray set of a plane curve from its Newton
//!   polygon.
//! * [`initial_form_cone`]: the zero set of the lowest-degree form, which
//!   contains the cone of a hypersurface.

pub mod grid;
mod initial;
mod numeric;
pub(crate) use numeric::mix_seed;
mod plane;
mod puiseux_engine;
mod scan;

pub use grid::sphere_grid;
pub use initial::{initial_form_cone, initial_form_excludes};
pub use numeric::{
    cone_membership_numeric, deformation_slice_check, DeformationWitness, NumericConfig,
    NumericWitness,
};
pub use plane::{plane_curve_cone, PlaneDirection, RaySet};
pub use puiseux_engine::{cone_membership_puiseux, obstruction_certificate, PuiseuxConfig};
pub use scan::{cone_scan, ScanEntry, ScanResult};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{PolyError, Polynomial, Rational};
use crate::puiseux::PuiseuxPoint;
use crate::semialg::{Formula, Rel, SemialgError, SemialgebraicSet};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ConeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("expected a polynomial in two variables")]
    NotPlaneCurve,
    #[error("epsilon schedule must be positive and strictly decreasing")]
    BadSchedule,
    #[error(transparent)]
    Semialg(#[from] SemialgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Numeric,
    Puiseux,
    PlaneCurve,
    InitialForm,
    Deformation,
}

impl Engine {
    pub const ALL: [Engine; 5] =
        [Engine::Numeric, Engine::Puiseux, Engine::PlaneCurve, Engine::InitialForm, Engine::Deformation];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Numeric => "numeric",
            Engine::Puiseux => "puiseux",
            Engine::PlaneCurve => "plane-curve",
            Engine::InitialForm => "initial-form",
            Engine::Deformation => "deformation",
        }
    }

    pub fn parse(s: &str) -> Option<Engine> {
        Engine::ALL.into_iter().find(|e| e.name() == s || (s == "plane" && *e == Engine::PlaneCurve))
    }

    /// Exact engines may certify negative answers.
    pub fn is_exact(self) -> bool {
        matches!(self, Engine::Puiseux | Engine::PlaneCurve | Engine::InitialForm)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeStatus {
    Supported,
    Unsupported,
    Indeterminate,
}

impl fmt::Display for ConeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConeStatus::Supported => "supported",
            ConeStatus::Unsupported => "unsupported",
            ConeStatus::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// One witness per ε of the schedule.
    Sequence(Vec<NumericWitness>),
    /// A curve in `X` with `(curve − p)/t → scale · y`.
    Curve { curve: PuiseuxPoint, scale: Rational },
    /// Branch data from the Newton polygon.
    Branch(String),
    Deformation(Vec<DeformationWitness>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeVerdict {
    pub engine: Engine,
    pub status: ConeStatus,
    /// True when the status is a proof rather than a search outcome.
    pub certified: bool,
    pub witness: Option<Witness>,
    pub reason: Option<String>,
}

impl ConeVerdict {
    pub fn supported(engine: Engine, witness: Option<Witness>, certified: bool) -> Self {
        ConeVerdict { engine, status: ConeStatus::Supported, certified, witness, reason: None }
    }

    pub fn unsupported(engine: Engine, certified: bool, reason: impl Into<String>) -> Self {
        ConeVerdict {
            engine,
            status: ConeStatus::Unsupported,
            certified,
            witness: None,
            reason: Some(reason.into()),
        }
    }

    pub fn indeterminate(engine: Engine, reason: impl Into<String>) -> Self {
        ConeVerdict {
            engine,
            status: ConeStatus::Indeterminate,
            certified: false,
            witness: None,
            reason: Some(reason.into()),
        }
    }

    pub fn is_supported(&self) -> bool {
        self.status == ConeStatus::Supported
    }

    pub fn is_certified_unsupported(&self) -> bool {
        self.status == ConeStatus::Unsupported && self.certified
    }
}

/// "Is `y` in `C_p(X)`?"
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeQuery {
    pub set: SemialgebraicSet,
    pub p: Vec<Rational>,
    pub y: Vec<Rational>,
}

impl ConeQuery {
    pub fn new(set: SemialgebraicSet, p: Vec<Rational>, y: Vec<Rational>) -> Result<Self, ConeError> {
        for found in [p.len(), y.len()] {
            if found != set.dim() {
                return Err(ConeError::Dimension { expected: set.dim(), found });
            }
        }
        Ok(ConeQuery { set, p, y })
    }

    pub fn y_is_zero(&self) -> bool {
        self.y.iter().all(|c| c == &Rational::from_integer(0.into()))
    }
}

/// The defining polynomial when `X = {f = 0}` is a single equation.
pub fn single_equation(set: &SemialgebraicSet) -> Option<&Polynomial> {
    match set.formula() {
        Formula::Atom(a) if a.rel == Rel::Eq => Some(&a.poly),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub engines: Vec<Engine>,
    pub numeric: NumericConfig,
    pub puiseux: PuiseuxConfig,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            engines: vec![Engine::Numeric, Engine::Puiseux],
            numeric: NumericConfig::default(),
            puiseux: PuiseuxConfig::default(),
            seed: 0,
        }
    }
}

impl EngineConfig {
    pub fn with_engines(engines: &[Engine]) -> Self {
        EngineConfig { engines: engines.to_vec(), ..Default::default() }
    }
}

/// Runs one engine. Engines that do not apply to the query (plane-curve
/// on a non-curve, say) answer indeterminate.
pub fn run_engine(q: &ConeQuery, engine: Engine, config: &EngineConfig, seed: u64) -> ConeVerdict {
    match engine {
        Engine::Numeric => cone_membership_numeric(q, &config.numeric, seed)
            .unwrap_or_else(|e| ConeVerdict::indeterminate(engine, e.to_string())),
        Engine::Deformation => deformation_slice_check(q, &config.numeric, seed)
            .unwrap_or_else(|e| ConeVerdict::indeterminate(engine, e.to_string())),
        Engine::Puiseux => cone_membership_puiseux(q, &config.puiseux),
        Engine::PlaneCurve => match single_equation(&q.set) {
            Some(f) if f.nvars() == 2 => match plane_curve_cone(f, &q.p) {
                Ok(rays) => rays.verdict(&q.y),
                Err(e) => ConeVerdict::indeterminate(engine, e.to_string()),
            },
            _ => ConeVerdict::indeterminate(engine, "not a single plane-curve equation"),
        },
        Engine::InitialForm => match single_equation(&q.set) {
            Some(f) => match initial_form_excludes(f, &q.p, &q.y) {
                Ok(true) => ConeVerdict::unsupported(engine, true, "initial form does not vanish at y"),
                Ok(false) => ConeVerdict::indeterminate(engine, "initial form vanishes at y (over-approximation)"),
                Err(e) => ConeVerdict::indeterminate(engine, e.to_string()),
            },
            None => ConeVerdict::indeterminate(engine, "not a single equation"),
        },
    }
}

/// Verdicts of several engines folded into one answer.
#[derive(Clone, Debug)]
pub struct Decision {
    pub status: ConeStatus,
    pub verdicts: Vec<ConeVerdict>,
    /// Some engine found support while another certified its absence.
    pub conflict: bool,
    /// All determinate verdicts agree.
    pub agree: bool,
}

/// Exact determinate verdicts win; otherwise the numeric engines decide.
/// A conflict between a supported and a certified-unsupported verdict
/// makes the decision indeterminate.
pub fn combine(verdicts: Vec<ConeVerdict>) -> Decision {
    let any_supported = verdicts.iter().any(|v| v.is_supported());
    let any_certified_no = verdicts.iter().any(|v| v.is_certified_unsupported());
    let conflict = any_supported && any_certified_no;
    let determinate: Vec<ConeStatus> = verdicts
        .iter()
        .map(|v| v.status)
        .filter(|s| *s != ConeStatus::Indeterminate)
        .collect();
    let agree = determinate.windows(2).all(|w| w[0] == w[1]);
    let exact = verdicts
        .iter()
        .find(|v| v.engine.is_exact() && v.status != ConeStatus::Indeterminate)
        .map(|v| v.status);
    let status = if conflict {
        ConeStatus::Indeterminate
    } else if let Some(s) = exact {
        s
    } else if any_supported {
        ConeStatus::Supported
    } else if verdicts.iter().any(|v| v.status == ConeStatus::Unsupported) {
        ConeStatus::Unsupported
    } else {
        ConeStatus::Indeterminate
    };
    Decision { status, verdicts, conflict, agree }
}

pub fn decide(q: &ConeQuery, config: &EngineConfig) -> Decision {
    decide_seeded(q, config, config.seed)
}

pub fn decide_seeded(q: &ConeQuery, config: &EngineConfig, seed: u64) -> Decision {
    combine(config.engines.iter().map(|&e| run_engine(q, e, config, seed)).collect())
}
