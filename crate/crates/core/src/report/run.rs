use serde_json::{json, Value};

use super::script::{Command, CommandKind, Script};
use super::{repro, Outcome, ReportError, Settings};
use crate::cone::{
    cone_scan, decide, initial_form_cone, plane_curve_cone, single_equation, ConeQuery, ConeStatus, ConeVerdict,
    Decision, EngineConfig, ScanResult, Witness,
};
use crate::poly::{PolyMap, Rational};
use crate::puiseux::risometry_check;
use crate::semialg::SemialgebraicSet;
use crate::strat::{
    cone_risometry_lift, dimension_condition_check, induced_cone_strata, is_trivially_empty, lift_sample_pairs,
    risometry_implies_equal_cones_check, whitney_check, InducedConeStrata, LiftConfig, Stratification,
    WhitneyVerdict,
};

pub(super) struct Done {
    pub outcome: Outcome,
    pub summary: String,
    pub result: Value,
}

pub(super) fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

pub(super) fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Sequence(steps) => json!({
            "kind": "sequence",
            "steps": steps.iter().map(|s| json!({"eps": s.eps, "x": s.x, "a": s.a, "residual": s.residual})).collect::<Vec<_>>(),
        }),
        Witness::Curve { curve, scale } => json!({"kind": "curve", "curve": curve.to_string(), "scale": scale.to_string()}),
        Witness::Branch(b) => json!({"kind": "branch", "branch": b}),
        Witness::Deformation(steps) => json!({
            "kind": "deformation",
            "steps": steps.iter().map(|s| json!({"eps": s.eps, "x": s.x, "r": s.r})).collect::<Vec<_>>(),
        }),
    }
}

pub(super) fn verdict_json(v: &ConeVerdict) -> Value {
    json!({
        "engine": v.engine,
        "status": v.status,
        "certified": v.certified,
        "reason": v.reason,
        "witness": v.witness.as_ref().map(witness_json),
    })
}

pub(super) fn decision_json(d: &Decision) -> Value {
    json!({
        "status": d.status,
        "conflict": d.conflict,
        "agree": d.agree,
        "verdicts": d.verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
    })
}

fn decision_summary(d: &Decision) -> String {
    let mut parts = Vec::new();
    for v in &d.verdicts {
        let mut s = format!("{}: {}", v.engine, v.status);
        if v.certified {
            s.push_str(" (certified)");
        }
        if let Some(Witness::Curve { curve, .. }) = &v.witness {
            s.push_str(&format!(" via {curve}"));
        }
        parts.push(s);
    }
    let extra = if d.conflict { ", engines conflict" } else { "" };
    format!("{}{extra} [{}]", d.status, parts.join("; "))
}

pub(super) fn scan_json(scan: &ScanResult) -> Value {
    let pick = |s: ConeStatus| scan.with_status(s).into_iter().map(strings).collect::<Vec<_>>();
    json!({
        "p": strings(&scan.p),
        "grid": scan.resolution,
        "directions": scan.entries.len(),
        "supported": pick(ConeStatus::Supported),
        "indeterminate": pick(ConeStatus::Indeterminate),
        "unsupported_count": scan.with_status(ConeStatus::Unsupported).len(),
        "conflicts": scan.conflicts(),
        "disagreements": scan.disagreements(),
    })
}

fn scan_summary(scan: &ScanResult) -> String {
    let count = |s| scan.with_status(s).len();
    let mut s = format!(
        "{} supported, {} unsupported, {} indeterminate of {} directions",
        count(ConeStatus::Supported),
        count(ConeStatus::Unsupported),
        count(ConeStatus::Indeterminate),
        scan.entries.len()
    );
    if scan.disagreements() > 0 {
        s.push_str(&format!("; engines disagree on {}", scan.disagreements()));
    }
    s
}

pub(super) fn induced_json(r: &InducedConeStrata) -> Value {
    json!({
        "p": strings(&r.p),
        "grid": r.resolution,
        "strata": r.strata,
        "undetermined": r.undetermined,
        "diagnostics": r.diagnostics.iter().map(|d| {
            let mut v = serde_json::to_value(d).expect("diagnostic serializes");
            v["message"] = Value::String(d.to_string());
            v
        }).collect::<Vec<_>>(),
        "prefixes": r.prefixes.iter().map(|pc| json!({
            "d": pc.d,
            "apex": pc.apex,
            "supported": pc.scan.supported().len(),
            "indeterminate": pc.scan.with_status(ConeStatus::Indeterminate).len(),
        })).collect::<Vec<_>>(),
    })
}

pub(super) fn induced_summary(r: &InducedConeStrata) -> String {
    let parts: Vec<String> = r
        .strata
        .iter()
        .map(|s| {
            let body = match (s.apex, s.directions.len()) {
                (false, 0) => "empty".to_string(),
                (true, 0) => "{0}".to_string(),
                (apex, k) => format!("{}{k} direction(s), dim {}", if apex { "{0} + " } else { "" }, s.dim.unwrap_or(0)),
            };
            format!("C{} = {body}", s.index)
        })
        .collect();
    let mut s = parts.join("; ");
    for d in &r.diagnostics {
        s.push_str(&format!("; {d}"));
    }
    if !r.undetermined.is_empty() {
        s.push_str(&format!("; {} direction(s) undetermined", r.undetermined.len()));
    }
    s
}

pub(super) fn induced_outcome(r: &InducedConeStrata) -> Outcome {
    if r.has_structural_failure() {
        Outcome::Violation
    } else if !r.undetermined.is_empty() {
        Outcome::Indeterminate
    } else {
        Outcome::Pass
    }
}

/// Pairs `(i, j)`, `i < j`, of strata that are not trivially empty.
pub(super) fn nonempty_pairs(s: &Stratification) -> Vec<(usize, usize)> {
    let live: Vec<usize> = (0..s.strata().len()).filter(|&i| !is_trivially_empty(&s.strata()[i])).collect();
    let mut out = Vec::new();
    for (a, &i) in live.iter().enumerate() {
        for &j in &live[a + 1..] {
            out.push((i, j));
        }
    }
    out
}

/// Whitney checks over pairs and seeds, folded into one outcome.
pub(super) fn whitney_run(
    s: &Stratification,
    pairs: &[(usize, usize)],
    seeds: &[u64],
) -> Result<(Outcome, String, Value), ReportError> {
    let config = crate::strat::WhitneyConfig::default();
    let mut outcome = Outcome::Pass;
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    for &pair in pairs {
        let mut worst: f64 = 0.0;
        let mut verdicts = Vec::new();
        for &seed in seeds {
            let r = whitney_check(s, pair, &config, seed)?;
            worst = worst.max(r.max_defect_at_finest());
            match &r.verdict {
                WhitneyVerdict::NoViolation => {}
                WhitneyVerdict::Violation { condition, .. } => {
                    outcome = outcome.max(Outcome::Violation);
                    verdicts.push(format!("seed {seed}: ({condition}) violated"));
                }
                WhitneyVerdict::Indeterminate { reason } => {
                    outcome = outcome.max(Outcome::Indeterminate);
                    verdicts.push(format!("seed {seed}: {reason}"));
                }
            }
            reports.push(r);
        }
        let status = if verdicts.is_empty() { "no violation".to_string() } else { verdicts.join(", ") };
        lines.push(format!("({}, {}): {status}, finest defect {worst:.1e}", pair.0, pair.1));
    }
    let summary = if lines.is_empty() { "no nonempty pairs".to_string() } else { lines.join("; ") };
    Ok((outcome, summary, json!({"tolerance": config.tol, "checks": reports})))
}

fn set<'a>(script: &'a Script, name: &str) -> &'a SemialgebraicSet {
    &script.sets[name]
}

fn config_with(settings: &Settings, engines: &Option<Vec<crate::cone::Engine>>) -> EngineConfig {
    let mut c = settings.engine_config();
    if let Some(e) = engines {
        c.engines = e.clone();
    }
    c
}

pub(super) fn execute(script: &Script, cmd: &Command, settings: &Settings) -> Result<Done, ReportError> {
    let grid = |g: &Option<usize>| g.unwrap_or(settings.grid);
    Ok(match &cmd.kind {
        CommandKind::Cone { set: name, p, y, engines } => {
            let q = ConeQuery::new(set(script, name).clone(), p.clone(), y.clone())?;
            let d = decide(&q, &config_with(settings, engines));
            let outcome = if d.status == ConeStatus::Indeterminate { Outcome::Indeterminate } else { Outcome::Pass };
            let mut result = decision_json(&d);
            result["set"] = json!(name);
            result["p"] = json!(strings(p));
            result["y"] = json!(strings(y));
            Done { outcome, summary: decision_summary(&d), result }
        }
        CommandKind::ConeScan { set: name, p, grid: g, engines } => {
            let scan = cone_scan(set(script, name), p, grid(g), &config_with(settings, engines))?;
            let outcome = if scan.with_status(ConeStatus::Indeterminate).is_empty() {
                Outcome::Pass
            } else {
                Outcome::Indeterminate
            };
            let mut result = scan_json(&scan);
            result["set"] = json!(name);
            Done { outcome, summary: scan_summary(&scan), result }
        }
        CommandKind::ConeExact { set: name, p } => {
            let s = set(script, name);
            let f = single_equation(s).ok_or_else(|| ReportError::Command {
                message: "cone-exact needs a set given by a single equation".into(),
            })?;
            let initial = initial_form_cone(f, p, s.vars())?;
            let mut result = json!({"set": name, "p": strings(p), "initial_form": initial.to_string()});
            if s.dim() == 2 {
                let rays = plane_curve_cone(f, p)?;
                result["rays"] = json!(rays
                    .rays
                    .iter()
                    .map(|r| json!({"direction": r.direction.to_string(), "branch": r.branch}))
                    .collect::<Vec<_>>());
                result["undecided"] = json!(rays
                    .undecided
                    .iter()
                    .map(|(d, why)| json!({"direction": d.to_string(), "reason": why}))
                    .collect::<Vec<_>>());
                result["cone"] = json!(rays.to_string());
                let outcome = if rays.is_complete() { Outcome::Pass } else { Outcome::Indeterminate };
                Done { outcome, summary: rays.to_string(), result }
            } else {
                let summary = format!("contained in {initial}");
                Done { outcome: Outcome::Pass, summary, result }
            }
        }
        CommandKind::InducedStrata { strat, p, grid: g } => {
            let r = induced_cone_strata(&script.strats[strat], p, grid(g), &settings.engine_config())?;
            Done { outcome: induced_outcome(&r), summary: induced_summary(&r), result: induced_json(&r) }
        }
        CommandKind::Whitney { strat, pair, seeds } => {
            let s = &script.strats[strat];
            let pairs = match pair {
                Some(pr) => vec![*pr],
                None => nonempty_pairs(s),
            };
            let seeds = seeds.clone().unwrap_or_else(|| settings.whitney_seeds.clone());
            let (outcome, summary, result) = whitney_run(s, &pairs, &seeds)?;
            Done { outcome, summary, result }
        }
        CommandKind::Risometry { map, pairs } => {
            let phi: &PolyMap = &script.maps[map];
            let count = pairs.unwrap_or(settings.lift_pairs);
            let sample = lift_sample_pairs(phi.dim(), count, 4, settings.seed);
            let r = risometry_check(phi, &sample);
            let first = r.first_failure().map(|(k, v)| format!("pair {k}: {v:?}"));
            let outcome = if r.failed > 0 {
                Outcome::Violation
            } else if r.indeterminate > 0 {
                Outcome::Indeterminate
            } else {
                Outcome::Pass
            };
            let summary = format!("{} passed, {} failed, {} indeterminate", r.passed, r.failed, r.indeterminate);
            let result = json!({
                "map": phi.display_with(&script.vars),
                "pairs": count,
                "passed": r.passed,
                "failed": r.failed,
                "indeterminate": r.indeterminate,
                "first_failure": first,
            });
            Done { outcome, summary, result }
        }
        CommandKind::Lift { map, from, to, grid: g } => {
            let config = LiftConfig {
                pairs: settings.lift_pairs,
                max_scale: 4,
                resolution: grid(g),
                seed: settings.seed,
                engines: settings.engine_config(),
            };
            let r = cone_risometry_lift(&script.maps[map], set(script, from), set(script, to), &config)?;
            let outcome = if r.passed() {
                Outcome::Pass
            } else if r.unmapped.is_empty() && r.missed.is_empty() && r.phi_risometry.failed == 0 && r.psi_risometry.failed == 0 {
                Outcome::Indeterminate
            } else {
                Outcome::Violation
            };
            let summary = format!(
                "psi = ({}){}; psi risometry {}/{} passed; cone of {from} {} onto cone of {to}",
                r.psi.join(", "),
                if r.psi_is_identity { " (identity)" } else { "" },
                r.psi_risometry.passed,
                config.pairs,
                if r.onto { "maps" } else { "does not map" },
            );
            Done { outcome, summary, result: serde_json::to_value(&r).expect("lift report serializes") }
        }
        CommandKind::EqualCones { x, y, p, map, grid: g } => {
            let phi = map.as_ref().map(|m| &script.maps[m]);
            let r = risometry_implies_equal_cones_check(
                phi,
                set(script, x),
                set(script, y),
                p,
                grid(g),
                &settings.engine_config(),
            )?;
            let claimed = r.phi_risometry.as_ref().is_some_and(|s| s.all_pass());
            let outcome = if claimed && !r.equal {
                Outcome::Violation
            } else if r.compared == 0 {
                Outcome::Indeterminate
            } else {
                Outcome::Pass
            };
            let summary = if r.equal {
                format!("cones agree on {} directions ({} excluded)", r.compared, r.excluded)
            } else {
                let dirs: Vec<String> = r.differences.iter().map(|d| format!("({})", d.y.join(", "))).collect();
                let verdict = if r.certified_difference {
                    format!("certified: no risometry carries {x} onto {y} near p")
                } else {
                    "not certified".to_string()
                };
                format!("cones differ at {}; {verdict}", dirs.join(", "))
            };
            Done { outcome, summary, result: serde_json::to_value(&r).expect("equal-cones report serializes") }
        }
        CommandKind::Dims { strat } => {
            let rows = dimension_condition_check(&script.strats[strat], &settings.whitney_seeds)?;
            let outcome = if rows.iter().any(|r| r.holds == Some(false)) {
                Outcome::Violation
            } else if rows.iter().any(|r| r.holds.is_none()) {
                Outcome::Indeterminate
            } else {
                Outcome::Pass
            };
            let summary = rows
                .iter()
                .map(|r| {
                    let e = r.estimate.map_or("empty".to_string(), |e| e.to_string());
                    format!("dim S<={} = {e}", r.d)
                })
                .collect::<Vec<_>>()
                .join(", ");
            Done { outcome, summary, result: json!({"rows": rows}) }
        }
        CommandKind::Repro { example } => {
            let (outcome, summary, result) = repro::run_example(*example, settings)?;
            Done { outcome, summary, result }
        }
    })
}
