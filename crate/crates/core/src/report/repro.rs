//! Built-in examples: the cusp `x³ = y²` and the surface
//! `x³ − y² − z² = 0` with two stratifications of `R³`.
//!
//! The surface's cone at the origin is the half-line `R≥0 × 0 × 0`. With
//! strata `{0}`, the smooth part and the complement, that half-line lands
//! in `C_{0,2}` although it has dimension 1, so the induced strata cannot
//! be Whitney. Moving the half-line `{y = z = 0, x > 0}` into `S_1` fixes
//! this: then `C_{0,1}` is the half-line and `C_{0,2}` is empty.

use serde::Serialize;
use serde_json::{json, Value};

use super::run::{induced_json, nonempty_pairs, scan_json, strings, verdict_json, whitney_run};
use super::{Outcome, Report, ReportError, Settings};
use crate::cone::grid::cube_radius;
use crate::cone::{
    cone_membership_puiseux, cone_scan, decide, plane_curve_cone, single_equation, sphere_grid, ConeQuery,
    ConeStatus, Witness,
};
use crate::poly::{qi, Rational};
use crate::semialg::SemialgebraicSet;
use crate::strat::{dimension_condition_check, induced_cone_strata, Diagnostic, InducedConeStrata, Stratification};

use super::script::Example;

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn set3(src: &str) -> SemialgebraicSet {
    SemialgebraicSet::parse_with_vars(src, &vars(&["x", "y", "z"])).expect("built-in formula parses")
}

pub fn cusp() -> SemialgebraicSet {
    SemialgebraicSet::parse_with_vars("x^3 - y^2 = 0", &vars(&["x", "y"])).expect("built-in formula parses")
}

pub fn surface() -> SemialgebraicSet {
    set3("x^3 - y^2 - z^2 = 0")
}

const ORIGIN: &str = "x = 0 && y = 0 && z = 0";
const HALF_AXIS: &str = "y = 0 && z = 0 && x > 0";

/// `S_0 = {0}`, `S_2 = X ∖ {0}`, `S_3 = R³ ∖ X`.
pub fn surface_whitney_stratification() -> Stratification {
    Stratification::from_indexed(
        &vars(&["x", "y", "z"]),
        [
            (0, set3(ORIGIN)),
            (2, set3(&format!("x^3 - y^2 - z^2 = 0 && !({ORIGIN})"))),
            (3, set3("x^3 - y^2 - z^2 != 0")),
        ],
    )
    .expect("built-in stratification is well formed")
}

/// As [`surface_whitney_stratification`] with the open half-axis moved
/// from `S_3` into `S_1`.
pub fn surface_refined_stratification() -> Stratification {
    Stratification::from_indexed(
        &vars(&["x", "y", "z"]),
        [
            (0, set3(ORIGIN)),
            (1, set3(HALF_AXIS)),
            (2, set3(&format!("x^3 - y^2 - z^2 = 0 && !({ORIGIN})"))),
            (3, set3(&format!("x^3 - y^2 - z^2 != 0 && !({HALF_AXIS})"))),
        ],
    )
    .expect("built-in stratification is well formed")
}

#[derive(Clone, Debug, Serialize)]
struct Check {
    name: String,
    expected: String,
    found: String,
    ok: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: &str, expected: impl ToString, found: impl ToString) {
        let (expected, found) = (expected.to_string(), found.to_string());
        let ok = expected == found;
        self.0.push(Check { name: name.into(), expected, found, ok });
    }

    fn flag(&mut self, name: &str, ok: bool, found: impl ToString) {
        self.0.push(Check { name: name.into(), expected: "true".into(), found: found.to_string(), ok });
    }

    fn outcome(&self) -> Outcome {
        if self.0.iter().all(|c| c.ok) {
            Outcome::Pass
        } else {
            Outcome::Violation
        }
    }

    fn summary(&self) -> String {
        let failed: Vec<&str> = self.0.iter().filter(|c| !c.ok).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            format!("all {} checks reproduced", self.0.len())
        } else {
            format!("{} of {} checks differ: {}", failed.len(), self.0.len(), failed.join(", "))
        }
    }
}

fn dirs(list: &[Vec<String>]) -> String {
    let parts: Vec<String> = list.iter().map(|d| format!("({})", d.join(", "))).collect();
    format!("{{{}}}", parts.join(", "))
}

fn plus_x(n: usize, grid: usize) -> Vec<Vec<String>> {
    let mut v = vec![Rational::from_integer(0.into()); n];
    v[0] = Rational::from_integer(cube_radius(grid).into());
    vec![strings(&v)]
}

fn stratum_text(r: &InducedConeStrata, i: usize) -> String {
    let s = &r.strata[i];
    match (s.apex, s.directions.is_empty()) {
        (true, true) => "{0}".into(),
        (false, true) => "empty".into(),
        (apex, false) => format!("{}{}", if apex { "0 + " } else { "" }, dirs(&s.directions)),
    }
}

fn surface_example(settings: &Settings) -> Result<(Checks, Value), ReportError> {
    let config = settings.engine_config();
    let grid = settings.grid;
    let zero = vec![qi(0); 3];
    let total = sphere_grid(3, grid).len();
    let axis = dirs(&plus_x(3, grid));
    let mut checks = Checks::default();

    let x = surface();
    let scan = cone_scan(&x, &zero, grid, &config)?;
    let supported: Vec<Vec<String>> = scan.supported().into_iter().map(strings).collect();
    checks.add("C_0(X) on the grid", &axis, dirs(&supported));
    checks.add("engine disagreements", 0, scan.disagreements());
    let apex = decide(&ConeQuery::new(x.clone(), zero.clone(), zero.clone())?, &config).status;
    checks.add("0 in C_0(X)", ConeStatus::Supported, apex);

    let first = induced_cone_strata(&surface_whitney_stratification(), &zero, grid, &config)?;
    checks.add("first: C_0,0", "{0}", stratum_text(&first, 0));
    checks.add("first: C_0,1", "empty", stratum_text(&first, 1));
    checks.add("first: C_0,2", &axis, stratum_text(&first, 2));
    checks.add("first: |C_0,3|", total - 1, first.strata[3].directions.len());
    checks.add("first: undetermined", 0, first.undetermined.len());
    let expected = vec![Diagnostic::DimensionDeficit { index: 2, dim: 1 }];
    checks.add("first: diagnostics", format!("{expected:?}"), format!("{:?}", first.diagnostics));

    let refined = surface_refined_stratification();
    let second = induced_cone_strata(&refined, &zero, grid, &config)?;
    checks.add("second: C_0,0", "{0}", stratum_text(&second, 0));
    checks.add("second: C_0,1", &axis, stratum_text(&second, 1));
    checks.add("second: C_0,2", "empty", stratum_text(&second, 2));
    checks.add("second: |C_0,3|", total - 1, second.strata[3].directions.len());
    checks.add("second: undetermined", 0, second.undetermined.len());
    checks.add("second: diagnostics", "[]", format!("{:?}", second.diagnostics));

    let pairs = nonempty_pairs(&refined);
    let (whitney, whitney_summary, whitney_json) = whitney_run(&refined, &pairs, &settings.whitney_seeds)?;
    checks.flag("second: Whitney (a), (b)", whitney == Outcome::Pass, whitney_summary);

    let mut dims = Vec::new();
    for (label, s) in [("first", surface_whitney_stratification()), ("second", refined)] {
        let rows = dimension_condition_check(&s, &settings.whitney_seeds)?;
        let holds = rows.iter().all(|r| r.holds == Some(true));
        let found: Vec<String> = rows.iter().map(|r| format!("{:?}", r.estimate)).collect();
        checks.flag(&format!("{label}: dim S<=d <= d"), holds, found.join(", "));
        dims.push(json!({"stratification": label, "rows": rows}));
    }

    let details = json!({
        "cone": scan_json(&scan),
        "first": induced_json(&first),
        "second": induced_json(&second),
        "whitney": whitney_json,
        "dims": dims,
    });
    Ok((checks, details))
}

fn cusp_example(settings: &Settings) -> Result<(Checks, Value), ReportError> {
    let config = settings.engine_config();
    let x = cusp();
    let zero = vec![qi(0); 2];
    let mut checks = Checks::default();

    let f = single_equation(&x).expect("cusp is one equation");
    let rays = plane_curve_cone(f, &zero)?;
    checks.add("plane-curve cone", "{(1, 0)}", rays.to_string());

    let query = |y: [i64; 2]| ConeQuery::new(x.clone(), zero.clone(), vec![qi(y[0]), qi(y[1])]);
    let positive = cone_membership_puiseux(&query([1, 0])?, &config.puiseux);
    let curve = match &positive.witness {
        Some(Witness::Curve { curve, .. }) => curve.to_string(),
        _ => "none".into(),
    };
    checks.add("series witness for (1, 0)", "(t, t^(3/2))", curve);
    let mut verdicts = vec![verdict_json(&positive)];
    for y in [[-1, 0], [0, 1], [0, -1]] {
        let v = cone_membership_puiseux(&query(y)?, &config.puiseux);
        let found = if v.is_certified_unsupported() { "certified unsupported" } else { "not certified" };
        checks.add(&format!("({}, {}) excluded", y[0], y[1]), "certified unsupported", found);
        verdicts.push(verdict_json(&v));
    }

    let scan = cone_scan(&x, &zero, settings.grid, &config)?;
    let supported: Vec<Vec<String>> = scan.supported().into_iter().map(strings).collect();
    checks.add("C_0(X) on the grid", dirs(&plus_x(2, settings.grid)), dirs(&supported));
    checks.add("engine disagreements", 0, scan.disagreements());

    let details = json!({"rays": rays.to_string(), "series": verdicts, "cone": scan_json(&scan)});
    Ok((checks, details))
}

pub(super) fn run_example(example: Example, settings: &Settings) -> Result<(Outcome, String, Value), ReportError> {
    let (checks, details) = match example {
        Example::Surface3d => surface_example(settings)?,
        Example::Cusp => cusp_example(settings)?,
    };
    let result = json!({"example": example.name(), "checks": checks.0, "details": details});
    Ok((checks.outcome(), checks.summary(), result))
}

/// Runs one built-in example as a one-command report.
pub fn repro_example(example: Example, settings: &Settings) -> Report {
    let script = super::Script {
        commands: vec![super::Command {
            line: 1,
            text: format!("repro-example {}", example.name()),
            kind: super::CommandKind::Repro { example },
        }],
        ..Default::default()
    };
    super::run_parsed(&script, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_reproduces() {
        let r = repro_example(Example::Cusp, &Settings::default());
        let c = &r.commands[0];
        assert_eq!(c.outcome, Outcome::Pass, "{}", c.summary);
        assert_eq!(c.result["example"], "cusp");
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn surface_reproduces() {
        let r = repro_example(Example::Surface3d, &Settings::default());
        let c = &r.commands[0];
        assert_eq!(c.outcome, Outcome::Pass, "{}\n{:#}", c.summary, c.result["checks"]);
        let first = &c.result["details"]["first"];
        assert_eq!(first["diagnostics"].as_array().unwrap().len(), 1);
    }
}
