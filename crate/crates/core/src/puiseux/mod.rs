//! Truncated Puiseux series over the rationals: a concrete non-archimedean
//! real closed valued field with value group ℚ and residue field ℚ.
//!
//! `t` is a positive infinitesimal, so a series is positive exactly when
//! its leading coefficient is. Every operation tracks how far its result is
//! known; questions that hinge on unknown coefficients are answered with
//! an error or [`Verdict3::Indeterminate`](crate::verdict::Verdict3).

mod point;
mod risometry;
mod series;

pub use point::{
    ball_contains, primitive_ray, ps_limit, same_line, same_ray, Ball, Direction, PuiseuxPoint,
    RvClass,
};
pub use risometry::{is_isometry_on, risometry_check, FnMap, PairVerdict, PointMap, RisometryReport};
pub use series::{parse_series, PuiseuxSeries, Valuation, DEFAULT_TRUNCATION};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PuiseuxError {
    #[error("indeterminate divisor: series is zero up to truncation")]
    IndeterminateDivisor,
    #[error("not in valuation ring: negative valuation")]
    NotInValuationRing,
    #[error("unbounded curve: a coordinate has negative valuation")]
    UnboundedCurve,
    #[error("zero vector has no direction")]
    ZeroDirection,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("indeterminate: {0}")]
    Indeterminate(String),
}
