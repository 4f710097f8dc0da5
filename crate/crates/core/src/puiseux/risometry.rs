use super::point::{PuiseuxPoint, RvClass};
use super::series::Valuation;
use super::PuiseuxError;
use crate::poly::{PolyMap, Rational};

/// Anything that maps points of `R^n` over the series field.
pub trait PointMap {
    fn apply(&self, x: &PuiseuxPoint) -> Result<PuiseuxPoint, PuiseuxError>;
}

impl PointMap for PolyMap {
    fn apply(&self, x: &PuiseuxPoint) -> Result<PuiseuxPoint, PuiseuxError> {
        if x.dim() != self.dim() {
            return Err(PuiseuxError::Dimension { expected: self.dim(), found: x.dim() });
        }
        Ok(PuiseuxPoint::new(PolyMap::apply(self, &x.coords)))
    }
}

/// Adapter for closures.
pub struct FnMap<F>(pub F);

impl<F> PointMap for FnMap<F>
where
    F: Fn(&PuiseuxPoint) -> Result<PuiseuxPoint, PuiseuxError>,
{
    fn apply(&self, x: &PuiseuxPoint) -> Result<PuiseuxPoint, PuiseuxError> {
        (self.0)(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairVerdict {
    Pass,
    Fail { before: RvClass, after: RvClass },
    Indeterminate(String),
}

#[derive(Clone, Debug, Default)]
pub struct RisometryReport {
    pub verdicts: Vec<PairVerdict>,
    pub passed: usize,
    pub failed: usize,
    pub indeterminate: usize,
    /// Pairs whose image carried less precision than the input.
    pub precision_loss: usize,
    /// Passing pairs with `v̂(φx − φy) ≠ v̂(x − y)`; always zero unless
    /// something is badly wrong, since equal `rv̂` forces equal `v̂`.
    pub isometry_violations: usize,
}

impl RisometryReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0 && self.indeterminate == 0
    }

    pub fn first_failure(&self) -> Option<(usize, &PairVerdict)> {
        self.verdicts.iter().enumerate().find(|(_, v)| matches!(v, PairVerdict::Fail { .. }))
    }
}

fn common_truncate(a: &PuiseuxPoint, b: &PuiseuxPoint) -> (PuiseuxPoint, PuiseuxPoint) {
    match (a.order(), b.order()) {
        (None, None) => (a.clone(), b.clone()),
        (x, y) => {
            let n: Rational = match (x, y) {
                (Some(x), Some(y)) => x.min(y),
                (Some(x), None) | (None, Some(x)) => x,
                _ => unreachable!(),
            };
            (a.truncate(&n), b.truncate(&n))
        }
    }
}

/// Checks `rv̂(φ(x) − φ(y)) = rv̂(x − y)` on each sample pair.
pub fn risometry_check<M: PointMap + ?Sized>(
    map: &M,
    pairs: &[(PuiseuxPoint, PuiseuxPoint)],
) -> RisometryReport {
    let mut report = RisometryReport::default();
    for (x, y) in pairs {
        let verdict = match (map.apply(x), map.apply(y)) {
            (Ok(fx), Ok(fy)) => {
                let before = x.sub(y);
                let after = fx.sub(&fy);
                let lost = match (before.order(), after.order()) {
                    (Some(a), Some(b)) => b < a,
                    (None, Some(_)) => true,
                    _ => false,
                };
                if lost {
                    report.precision_loss += 1;
                }
                let (before, after) = common_truncate(&before, &after);
                match (before.rvhat(), after.rvhat()) {
                    (Ok(b), Ok(a)) if a == b => {
                        if before.vhat() != after.vhat() {
                            report.isometry_violations += 1;
                        }
                        PairVerdict::Pass
                    }
                    (Ok(b), Ok(a)) => PairVerdict::Fail { before: b, after: a },
                    (Err(e), _) | (_, Err(e)) => PairVerdict::Indeterminate(e.to_string()),
                }
            }
            (Err(e), _) | (_, Err(e)) => PairVerdict::Indeterminate(e.to_string()),
        };
        match &verdict {
            PairVerdict::Pass => report.passed += 1,
            PairVerdict::Fail { .. } => report.failed += 1,
            PairVerdict::Indeterminate(_) => report.indeterminate += 1,
        }
        report.verdicts.push(verdict);
    }
    report
}

/// `v̂(φx − φy) = v̂(x − y)` for every pair where both sides are decided.
pub fn is_isometry_on<M: PointMap + ?Sized>(map: &M, pairs: &[(PuiseuxPoint, PuiseuxPoint)]) -> bool {
    pairs.iter().all(|(x, y)| match (map.apply(x), map.apply(y)) {
        (Ok(fx), Ok(fy)) => match (x.sub(y).vhat(), fx.sub(&fy).vhat()) {
            (Valuation::AtLeast(_), _) | (_, Valuation::AtLeast(_)) => true,
            (a, b) => a == b,
        },
        _ => true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn pt(lits: &[&str]) -> PuiseuxPoint {
        PuiseuxPoint::new(lits.iter().map(|s| s.parse().unwrap()).collect())
    }

    #[test]
    fn identity_passes() {
        let pairs = vec![(pt(&["t", "t^2"]), pt(&["0", "1"])), (pt(&["1 + t", "t"]), pt(&["1", "t"]))];
        let r = risometry_check(&PolyMap::identity(2), &pairs);
        assert!(r.all_pass());
        assert_eq!(r.passed, 2);
    }

    #[test]
    fn swap_fails() {
        let swap = PolyMap::new(vec![Polynomial::var(2, 1), Polynomial::var(2, 0)]).unwrap();
        let r = risometry_check(&swap, &[(pt(&["t", "0"]), pt(&["0", "0"]))]);
        assert_eq!(r.failed, 1);
    }

    #[test]
    fn closure_map() {
        let double = FnMap(|x: &PuiseuxPoint| {
            Ok(x.scale(&crate::puiseux::PuiseuxSeries::constant(crate::poly::qi(2))))
        });
        let r = risometry_check(&double, &[(pt(&["t", "0"]), pt(&["0", "0"]))]);
        assert_eq!(r.failed, 1);
        assert!(is_isometry_on(&double, &[(pt(&["t", "0"]), pt(&["0", "0"]))]));
    }
}
