use rayon::prelude::*;

use super::numeric::mix_seed;
use super::{decide_seeded, sphere_grid, ConeError, ConeQuery, ConeStatus, Decision, EngineConfig};
use crate::poly::Rational;
use crate::semialg::SemialgebraicSet;

#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub y: Vec<Rational>,
    pub decision: Decision,
}

/// Cone membership of every grid direction at one point.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub p: Vec<Rational>,
    pub resolution: usize,
    pub entries: Vec<ScanEntry>,
}

impl ScanResult {
    pub fn with_status(&self, status: ConeStatus) -> Vec<&[Rational]> {
        self.entries.iter().filter(|e| e.decision.status == status).map(|e| e.y.as_slice()).collect()
    }

    pub fn supported(&self) -> Vec<&[Rational]> {
        self.with_status(ConeStatus::Supported)
    }

    pub fn conflicts(&self) -> usize {
        self.entries.iter().filter(|e| e.decision.conflict).count()
    }

    /// Directions where engines returned different determinate answers.
    pub fn disagreements(&self) -> usize {
        self.entries.iter().filter(|e| !e.decision.agree).count()
    }

    pub fn status_of(&self, y: &[Rational]) -> Option<ConeStatus> {
        self.entries.iter().find(|e| e.y == y).map(|e| e.decision.status)
    }
}

/// Runs the configured engines on every direction of [`sphere_grid`], in
/// parallel. Direction `k` uses a seed derived from `config.seed` and `k`,
/// so results do not depend on scheduling.
pub fn cone_scan(
    set: &SemialgebraicSet,
    p: &[Rational],
    resolution: usize,
    config: &EngineConfig,
) -> Result<ScanResult, ConeError> {
    if p.len() != set.dim() {
        return Err(ConeError::Dimension { expected: set.dim(), found: p.len() });
    }
    config.numeric.validate()?;
    let grid = sphere_grid(set.dim(), resolution);
    let entries = grid
        .into_par_iter()
        .enumerate()
        .map(|(k, y)| {
            let q = ConeQuery::new(set.clone(), p.to_vec(), y.clone())?;
            let decision = decide_seeded(&q, config, mix_seed(config.seed, k as u64 + 0x5ca7));
            Ok(ScanEntry { y, decision })
        })
        .collect::<Result<Vec<_>, ConeError>>()?;
    Ok(ScanResult { p: p.to_vec(), resolution, entries })
}
