use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;
use serde::Serialize;

use super::{is_trivially_empty, StratError, Stratification};
use crate::cone::grid::cube_radius;
use crate::cone::{cone_scan, decide, ConeQuery, ConeStatus, EngineConfig, ScanResult};
use crate::poly::Rational;
use crate::verdict::Verdict3;

/// Cone of one prefix `S_{≤d}` on the grid, plus the apex.
#[derive(Clone, Debug)]
pub struct PrefixCone {
    pub d: usize,
    pub apex: ConeStatus,
    pub scan: ScanResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedStratum {
    pub index: usize,
    pub apex: bool,
    /// Grid directions in `C_{p,index}`.
    pub directions: Vec<Vec<String>>,
    /// Dimension estimated from the grid; `None` when empty.
    pub dim: Option<usize>,
}

impl InducedStratum {
    pub fn is_empty(&self) -> bool {
        !self.apex && self.directions.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnostic {
    /// A nonempty stratum whose dimension is below its index, which rules
    /// out a Whitney stratification with the usual indexing.
    DimensionDeficit { index: usize, dim: usize },
    /// `dim C_{p,≤d} > d`.
    DimensionExcess { index: usize, dim: usize },
    /// A direction supported for `S_{≤d}` but not for `S_{≤d+1}`; an
    /// engine inconsistency since prefixes grow.
    NonMonotone { direction: Vec<String>, index: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DimensionDeficit { index, dim } => write!(
                f,
                "C_p,{index} is nonempty with estimated dimension {dim} < {index}: the induced strata cannot be a Whitney stratification"
            ),
            Diagnostic::DimensionExcess { index, dim } => {
                write!(f, "C_p,<={index} has estimated dimension {dim} > {index}")
            }
            Diagnostic::NonMonotone { direction, index } => write!(
                f,
                "direction ({}) supported for S<={index} but not for S<={}",
                direction.join(", "),
                index + 1
            ),
        }
    }
}

/// The strata `C_{p,0} = C_p(S_0)` and
/// `C_{p,i+1} = C_p(S_{≤i+1}) ∖ C_p(S_{≤i})` on a direction grid.
#[derive(Clone, Debug)]
pub struct InducedConeStrata {
    pub p: Vec<Rational>,
    pub resolution: usize,
    pub prefixes: Vec<PrefixCone>,
    pub strata: Vec<InducedStratum>,
    /// Directions whose index is undecided because some prefix is
    /// indeterminate before the first supported one.
    pub undetermined: Vec<Vec<String>>,
    pub diagnostics: Vec<Diagnostic>,
}

fn fmt_dir(y: &[Rational]) -> Vec<String> {
    y.iter().map(|c| c.to_string()).collect()
}

/// Membership of `y` in `C_{p,i}` from the statuses of `S_{≤i−1}` and
/// `S_{≤i}`.
fn membership_from(prev: Option<ConeStatus>, cur: ConeStatus) -> Verdict3 {
    let supported = |s: ConeStatus| match s {
        ConeStatus::Supported => Verdict3::True,
        ConeStatus::Unsupported => Verdict3::False,
        ConeStatus::Indeterminate => Verdict3::Indeterminate("engine indeterminate".into()),
    };
    let here = supported(cur);
    match prev {
        None => here,
        Some(s) => here.and(supported(s).not()),
    }
}

/// Membership of `y` in `C_{p,i}`. Only `S_0, …, S_i` are consulted.
pub fn induced_membership(
    s: &Stratification,
    p: &[Rational],
    i: usize,
    y: &[Rational],
    config: &EngineConfig,
) -> Result<Verdict3, StratError> {
    let status = |d: usize| -> Result<ConeStatus, StratError> {
        let q = ConeQuery::new(s.prefix(d)?, p.to_vec(), y.to_vec())?;
        Ok(decide(&q, config).status)
    };
    let cur = status(i)?;
    let prev = if i == 0 { None } else { Some(status(i - 1)?) };
    Ok(membership_from(prev, cur))
}

/// Dimension of a cone from its grid directions on the cube `‖v‖∞ = m`:
/// 0 for the apex alone, otherwise one more than the largest number of
/// unit moves within a face of the cube that stay inside the set.
pub fn cone_dimension_from_grid(directions: &[Vec<Rational>], apex: bool, m: i64) -> Option<usize> {
    if directions.is_empty() {
        return apex.then_some(0);
    }
    let n = directions[0].len();
    let set: BTreeSet<Vec<Rational>> = directions.iter().cloned().collect();
    let m = Rational::from_integer(m.into());
    let mut best = 0;
    for v in directions {
        let mut free = 0;
        for i in (0..n).filter(|&i| v[i].abs() < m) {
            let moves = [Rational::from_integer(1.into()), Rational::from_integer((-1).into())];
            let ok = moves.iter().any(|dlt| {
                let mut w = v.clone();
                w[i] += dlt;
                set.contains(&w)
            });
            if ok {
                free += 1;
            }
        }
        best = best.max(free.min(n - 1));
    }
    Some(1 + best)
}

/// Scans every prefix `S_{≤d}` and splits the grid into induced strata.
pub fn induced_cone_strata(
    s: &Stratification,
    p: &[Rational],
    resolution: usize,
    config: &EngineConfig,
) -> Result<InducedConeStrata, StratError> {
    let n = s.ambient_dim();
    if p.len() != n {
        return Err(StratError::Dimension { expected: n, found: p.len() });
    }
    let zero = vec![Rational::from_integer(0.into()); n];
    let mut prefixes = Vec::with_capacity(n + 1);
    for d in 0..=n {
        let set = s.prefix(d)?;
        let scan = cone_scan(&set, p, resolution, config)?;
        let apex = if is_trivially_empty(&set) {
            ConeStatus::Unsupported
        } else {
            decide(&ConeQuery::new(set, p.to_vec(), zero.clone())?, config).status
        };
        prefixes.push(PrefixCone { d, apex, scan });
    }

    let m = cube_radius(resolution);
    let mut dirs: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); n + 1];
    let mut undetermined = Vec::new();
    let mut diagnostics = Vec::new();
    let count = prefixes[0].scan.entries.len();
    for k in 0..count {
        let y = &prefixes[0].scan.entries[k].y;
        let statuses: Vec<ConeStatus> = prefixes.iter().map(|pc| pc.scan.entries[k].decision.status).collect();
        match first_supported(&statuses) {
            Ok(Some(i)) => dirs[i].push(y.clone()),
            Ok(None) => {}
            Err(()) => undetermined.push(fmt_dir(y)),
        }
        for d in 0..n {
            if statuses[d] == ConeStatus::Supported && statuses[d + 1] == ConeStatus::Unsupported {
                diagnostics.push(Diagnostic::NonMonotone { direction: fmt_dir(y), index: d });
            }
        }
    }
    let apex_statuses: Vec<ConeStatus> = prefixes.iter().map(|pc| pc.apex).collect();
    let apex_index = first_supported(&apex_statuses).ok().flatten();

    let strata: Vec<InducedStratum> = (0..=n)
        .map(|i| {
            let apex = apex_index == Some(i);
            InducedStratum {
                index: i,
                apex,
                directions: dirs[i].iter().map(|y| fmt_dir(y)).collect(),
                dim: cone_dimension_from_grid(&dirs[i], apex, m),
            }
        })
        .collect();
    for st in &strata {
        if let Some(dim) = st.dim {
            if dim < st.index {
                diagnostics.push(Diagnostic::DimensionDeficit { index: st.index, dim });
            }
        }
    }
    for d in 0..=n {
        let union: Vec<Vec<Rational>> = dirs[..=d].iter().flatten().cloned().collect();
        let apex = apex_index.is_some_and(|i| i <= d);
        if let Some(dim) = cone_dimension_from_grid(&union, apex, m) {
            if dim > d {
                diagnostics.push(Diagnostic::DimensionExcess { index: d, dim });
            }
        }
    }
    Ok(InducedConeStrata { p: p.to_vec(), resolution, prefixes, strata, undetermined, diagnostics })
}

/// Index of the first supported prefix; `Err` if an indeterminate prefix
/// comes first.
fn first_supported(statuses: &[ConeStatus]) -> Result<Option<usize>, ()> {
    for (i, s) in statuses.iter().enumerate() {
        match s {
            ConeStatus::Supported => return Ok(Some(i)),
            ConeStatus::Indeterminate => return Err(()),
            ConeStatus::Unsupported => {}
        }
    }
    Ok(None)
}

impl InducedConeStrata {
    /// Membership of a grid direction in `C_{p,i}`.
    pub fn membership(&self, i: usize, y: &[Rational]) -> Option<Verdict3> {
        let k = self.prefixes[0].scan.entries.iter().position(|e| e.y == y)?;
        let status = |d: usize| self.prefixes[d].scan.entries[k].decision.status;
        Some(membership_from(if i == 0 { None } else { Some(status(i - 1)) }, status(i)))
    }

    /// Index of the stratum holding grid direction `y`.
    pub fn index_of(&self, y: &[Rational]) -> Option<usize> {
        let s: Vec<String> = fmt_dir(y);
        self.strata.iter().find(|st| st.directions.contains(&s)).map(|st| st.index)
    }

    pub fn has_structural_failure(&self) -> bool {
        self.diagnostics.iter().any(|d| matches!(d, Diagnostic::DimensionDeficit { .. }))
    }
}
