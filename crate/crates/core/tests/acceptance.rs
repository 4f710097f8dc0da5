//! Acceptance suite. Runs every criterion, prints one line per criterion
//! and fails if any of them fails or runs over its time limit.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tancone::cone::grid::{angle, cube_radius};
use tancone::cone::{
    cone_membership_puiseux, cone_scan, plane_curve_cone, single_equation, sphere_grid, ConeQuery, ConeStatus,
    Engine, EngineConfig, Witness,
};
use tancone::poly::{q, qi, PolyMap, Rational};
use tancone::puiseux::{PuiseuxPoint, PuiseuxSeries, Valuation};
use tancone::report::{
    cusp, run_script, surface, surface_refined_stratification, surface_whitney_stratification, Settings,
};
use tancone::semialg::{parse_polynomial, SemialgebraicSet};
use tancone::strat::{
    cone_risometry_lift, induced_cone_strata, is_trivially_empty, risometry_implies_equal_cones_check,
    whitney_check_seeds, Diagnostic, LiftConfig, WhitneyConfig, WhitneyVerdict,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn set(src: &str) -> SemialgebraicSet {
    src.parse().unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&c| qi(c)).collect()
}

fn show(y: &[Rational]) -> String {
    let parts: Vec<String> = y.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Grid directions within 1e-6 rad of `+x`: the oracle for the cones of the
/// cusp and the surface.
fn near_plus_x(y: &[Rational]) -> bool {
    let mut e = vec![qi(0); y.len()];
    e[0] = qi(1);
    angle(y, &e) < 1e-6
}

fn acc1() -> Outcome {
    let x = cusp();
    let zero = ints(&[0, 0]);
    let rays = plane_curve_cone(single_equation(&x).unwrap(), &zero).map_err(|e| e.to_string())?;
    ensure(rays.rays.len() == 1 && rays.is_complete(), format!("rays {rays}"))?;
    let d = rays.rays[0].direction.to_f64();
    ensure(d[0] > 0.0 && d[1] == 0.0, format!("ray direction {d:?}"))?;

    let config = EngineConfig::default().puiseux;
    let query = |y: &[i64]| ConeQuery::new(x.clone(), zero.clone(), ints(y)).unwrap();
    let v = cone_membership_puiseux(&query(&[1, 0]), &config);
    let curve = match &v.witness {
        Some(Witness::Curve { curve, .. }) => curve.to_string(),
        other => return Err(format!("(1, 0): witness {other:?}")),
    };
    ensure(v.is_supported() && v.certified && curve == "(t, t^(3/2))", format!("(1, 0): {curve}"))?;
    for y in [[-1, 0], [0, 1]] {
        let v = cone_membership_puiseux(&query(&y), &config);
        ensure(v.is_certified_unsupported(), format!("{y:?} not certified unsupported"))?;
    }
    Ok(format!("one ray {rays}, witness {curve}"))
}

fn acc2() -> Outcome {
    let scan = cone_scan(&surface(), &ints(&[0, 0, 0]), 16, &EngineConfig::default()).map_err(|e| e.to_string())?;
    let got: Vec<String> = scan.supported().into_iter().map(show).collect();
    let want: Vec<String> = sphere_grid(3, 16).iter().filter(|y| near_plus_x(y)).map(|y| show(y)).collect();
    ensure(got == want, format!("supported {got:?}, expected {want:?}"))?;
    ensure(scan.disagreements() == 0 && scan.conflicts() == 0, "engines disagree")?;
    let undecided = scan.with_status(ConeStatus::Indeterminate).len();
    ensure(undecided == 0, format!("{undecided} indeterminate directions"))?;
    Ok(format!("{} of {} directions supported: {}", got.len(), scan.entries.len(), got.join(" ")))
}

/// Expected index of a grid direction for the two surface stratifications.
fn surface_index(y: &[Rational], refined: bool) -> usize {
    match (near_plus_x(y), refined) {
        (true, true) => 1,
        (true, false) => 2,
        (false, _) => 3,
    }
}

fn check_induced(refined: bool) -> Result<tancone::strat::InducedConeStrata, String> {
    let s = if refined { surface_refined_stratification() } else { surface_whitney_stratification() };
    let zero = ints(&[0, 0, 0]);
    let r = induced_cone_strata(&s, &zero, 16, &EngineConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.undetermined.is_empty(), format!("undetermined {:?}", r.undetermined))?;
    ensure(r.strata[0].apex && !r.strata[1..].iter().any(|st| st.apex), "apex not only in C_0,0")?;
    let grid = sphere_grid(3, 16);
    let wrong: Vec<String> = grid
        .iter()
        .filter(|y| r.index_of(y) != Some(surface_index(y, refined)))
        .map(|y| format!("{} -> {:?}", show(y), r.index_of(y)))
        .collect();
    ensure(wrong.is_empty(), format!("{} disagreements: {}", wrong.len(), wrong.join(", ")))?;
    let empty = if refined { 2 } else { 1 };
    ensure(r.strata[empty].is_empty(), format!("C_0,{empty} is not empty"))?;
    Ok(r)
}

fn acc3() -> Outcome {
    let r = check_induced(false)?;
    let want = vec![Diagnostic::DimensionDeficit { index: 2, dim: 1 }];
    ensure(r.diagnostics == want, format!("diagnostics {:?}", r.diagnostics))?;
    ensure(r.strata[2].dim == Some(1), format!("dim C_0,2 = {:?}", r.strata[2].dim))?;
    Ok(format!("0 disagreements on {} directions; {}", sphere_grid(3, 16).len(), r.diagnostics[0]))
}

fn acc4() -> Outcome {
    let r = check_induced(true)?;
    ensure(r.diagnostics.is_empty(), format!("diagnostics {:?}", r.diagnostics))?;
    let s = surface_refined_stratification();
    let config = WhitneyConfig::default();
    let nonempty: Vec<usize> = (0..=3).filter(|&i| !is_trivially_empty(s.stratum(i).unwrap())).collect();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (k, &i) in nonempty.iter().enumerate() {
        for &j in &nonempty[k + 1..] {
            for report in whitney_check_seeds(&s, (i, j), &config, &[1, 2, 3]).map_err(|e| e.to_string())? {
                ensure(
                    report.verdict == WhitneyVerdict::NoViolation,
                    format!("pair ({i}, {j}) seed {}: {:?}", report.seed, report.verdict),
                )?;
                if !report.vacuous {
                    let d = report.max_defect_at_finest();
                    ensure(d < 1e-3, format!("pair ({i}, {j}) seed {}: finest defect {d:.2e}", report.seed))?;
                    worst = worst.max(d);
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("C_0,1 = +x, C_0,2 empty; {checked} Whitney runs, max finest defect {worst:.1e}"))
}

const MONOMIALS: [&str; 9] = ["x", "y", "x^2", "x*y", "y^2", "x^3", "x^2*y", "x*y^2", "y^3"];
const RELATIONS: [&str; 5] = ["=", ">=", ">", "<=", "="];

fn random_plane_set(rng: &mut ChaCha8Rng) -> String {
    let count = rng.random_range(2..=4);
    let mut terms = Vec::new();
    for _ in 0..count {
        let c = loop {
            let c: i64 = rng.random_range(-3..=3);
            if c != 0 {
                break c;
            }
        };
        terms.push(format!("{c}*{}", MONOMIALS[rng.random_range(0..MONOMIALS.len())]));
    }
    format!("{} {} 0", terms.join(" + "), RELATIONS[rng.random_range(0..RELATIONS.len())])
}

fn acc5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let config = EngineConfig::default();
    let zero = ints(&[0, 0]);
    let (mut compared, mut violations) = (0usize, Vec::new());
    for k in 0..50 {
        let (ta, tb) = (random_plane_set(&mut rng), random_plane_set(&mut rng));
        let a = set(&format!("vars x, y; {ta}"));
        let b = set(&format!("vars x, y; {tb}"));
        let scans: Vec<_> = [a.clone(), b.clone(), a.union(&b), a.intersection(&b)]
            .iter()
            .map(|s| cone_scan(s, &zero, 16, &config))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for i in 0..scans[0].entries.len() {
            let st: Vec<Option<bool>> = scans
                .iter()
                .map(|s| match s.entries[i].decision.status {
                    ConeStatus::Supported => Some(true),
                    ConeStatus::Unsupported => Some(false),
                    ConeStatus::Indeterminate => None,
                })
                .collect();
            let y = show(&scans[0].entries[i].y);
            let mut fail = |what: &str| violations.push(format!("pair {k} ({ta} | {tb}) at {y}: {what}"));
            if let (Some(ca), Some(cb), Some(cu)) = (st[0], st[1], st[2]) {
                compared += 1;
                if (ca || cb) && !cu {
                    fail("monotonicity");
                }
                if cu != (ca || cb) {
                    fail("union");
                }
            }
            if let (Some(ca), Some(cb), Some(ci)) = (st[0], st[1], st[3]) {
                if ci && !(ca && cb) {
                    fail("intersection");
                }
            }
        }
    }
    ensure(violations.is_empty(), violations.join("; "))?;
    Ok(format!("50 pairs, {compared} determinate directions, 0 violations"))
}

fn acc6() -> Outcome {
    let corpus = [
        ("cusp", "x^3 - y^2"),
        ("nodal cubic", "y^2 - x^2 - x^3"),
        ("parabola", "y - x^2"),
        ("tacnode", "y^2 - x^4"),
    ];
    let config = EngineConfig::with_engines(&[Engine::Numeric]);
    let zero = ints(&[0, 0]);
    let mut grid = sphere_grid(2, 64);
    let theta = |y: &[Rational]| {
        let u = tancone::cone::grid::unit(y);
        u[1].atan2(u[0]).rem_euclid(2.0 * PI)
    };
    grid.sort_by(|a, b| theta(a).total_cmp(&theta(b)));
    let n = grid.len();
    ensure(n == 64, format!("grid has {n} directions"))?;
    let mut flagged = Vec::new();
    for (name, f) in corpus {
        let x = set(&format!("vars x, y; {f} = 0"));
        let rays = plane_curve_cone(single_equation(&x).unwrap(), &zero).map_err(|e| e.to_string())?;
        ensure(rays.is_complete(), format!("{name}: exact cone incomplete"))?;
        let truth: Vec<bool> = grid.iter().map(|y| rays.contains(y).is_true()).collect();
        let scan = cone_scan(&x, &zero, 64, &config).map_err(|e| e.to_string())?;
        for (k, y) in grid.iter().enumerate() {
            let numeric = scan.status_of(y).unwrap() == ConeStatus::Supported;
            if numeric != truth[k] {
                let boundary = truth[(k + 1) % n] != truth[k] || truth[(k + n - 1) % n] != truth[k];
                ensure(boundary, format!("{name}: interior disagreement at {}", show(y)))?;
                flagged.push(format!("{name} {} (boundary cell)", show(y)));
            }
        }
    }
    ensure(flagged.len() <= 2, format!("{} disagreements: {}", flagged.len(), flagged.join(", ")))?;
    if flagged.is_empty() {
        Ok("4 curves x 64 directions, numeric engine equals exact ray sets".into())
    } else {
        Ok(format!("flagged: {}", flagged.join(", ")))
    }
}

/// Plain exponent -> coefficient maps: the oracle side of the valued-field
/// checks.
type Raw = BTreeMap<Rational, Rational>;

fn raw_series(rng: &mut ChaCha8Rng) -> Raw {
    let mut m = Raw::new();
    for _ in 0..rng.random_range(0..5) {
        let e = q(rng.random_range(-3..12), rng.random_range(1..4));
        let c = qi(rng.random_range(-5..=5));
        *m.entry(e).or_insert_with(|| qi(0)) += c;
    }
    m.retain(|_, c| *c != qi(0));
    m
}

fn raw_add(a: &Raw, b: &Raw, sign: i64) -> Raw {
    let mut m = a.clone();
    for (e, c) in b {
        *m.entry(e.clone()).or_insert_with(|| qi(0)) += c * qi(sign);
    }
    m.retain(|_, c| *c != qi(0));
    m
}

fn raw_val(a: &Raw) -> Option<Rational> {
    a.keys().next().cloned()
}

fn to_series(a: &Raw) -> PuiseuxSeries {
    PuiseuxSeries::from_terms(a.iter().map(|(e, c)| (e.clone(), c.clone())), None)
}

fn val(s: &PuiseuxSeries) -> Option<Rational> {
    match s.valuation() {
        Valuation::Finite(v) => Some(v),
        _ => None,
    }
}

fn vhat_raw(x: &[Raw]) -> Option<Rational> {
    x.iter().filter_map(raw_val).min()
}

fn acc7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checks = 0usize;
    let fail = |what: String| -> Result<(), String> { Err(what) };
    while checks < 100_000 {
        let (a, b) = (raw_series(&mut rng), raw_series(&mut rng));
        let (sa, sb) = (to_series(&a), to_series(&b));

        let want = match (raw_val(&a), raw_val(&b)) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        if val(&sa.mul(&sb)) != want {
            fail(format!("v(ab) for {sa} and {sb}"))?;
        }

        let sum = raw_val(&raw_add(&a, &b, 1));
        if val(&sa.add(&sb)) != sum {
            fail(format!("v(a+b) for {sa} and {sb}"))?;
        }
        if let (Some(x), Some(y)) = (raw_val(&a), raw_val(&b)) {
            let m = x.clone().min(y.clone());
            let ok = match &sum {
                Some(s) if x != y => *s == m,
                Some(s) => *s >= m,
                None => x == y,
            };
            if !ok {
                fail(format!("ultrametric for {sa} and {sb}"))?;
            }
        }

        let x: Vec<Raw> = (0..2).map(|_| if rng.random_bool(0.1) { Raw::new() } else { raw_series(&mut rng) }).collect();
        let y: Vec<Raw> = if rng.random_bool(0.1) {
            x.clone()
        } else {
            let shift = qi(rng.random_range(-1..5));
            x.iter()
                .map(|c| {
                    let d = raw_series(&mut rng);
                    let moved: Raw = d.into_iter().map(|(e, v)| (e + shift.clone(), v)).collect();
                    raw_add(c, &moved, 1)
                })
                .collect()
        };
        let diff: Vec<Raw> = x.iter().zip(&y).map(|(a, b)| raw_add(a, b, -1)).collect();
        let criterion = match (vhat_raw(&x), vhat_raw(&y), vhat_raw(&diff)) {
            (None, None, _) => true,
            (Some(vx), _, Some(vd)) => vd > vx,
            (Some(_), _, None) => true,
            (None, Some(_), _) => false,
        };
        let px = PuiseuxPoint::new(x.iter().map(to_series).collect());
        let py = PuiseuxPoint::new(y.iter().map(to_series).collect());
        let same = px.rvhat().map_err(|e| e.to_string())? == py.rvhat().map_err(|e| e.to_string())?;
        if same != criterion {
            fail(format!("rv classes of {px:?} and {py:?}"))?;
        }
        checks += 4;
    }
    Ok(format!("{checks} checks, 0 failures"))
}

fn acc8() -> Outcome {
    let vars = ["x".to_string(), "y".to_string()];
    let poly = |s: &str| parse_polynomial(s, &vars).unwrap();
    let phi = PolyMap::new(vec![poly("x"), poly("y + x^2")]).map_err(|e| e.to_string())?;
    let line = set("vars x, y; y = 0");
    let parabola = set("vars x, y; y - x^2 = 0");
    let r = cone_risometry_lift(&phi, &line, &parabola, &LiftConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.psi_is_identity, format!("psi = {:?}", r.psi))?;
    ensure(r.psi_risometry.all_pass() && r.psi_risometry.passed == 1000, format!("psi: {:?}", r.psi_risometry))?;
    ensure(r.phi_risometry.all_pass(), format!("phi: {:?}", r.phi_risometry))?;
    ensure(r.onto, format!("unmapped {:?}, missed {:?}, undecided {:?}", r.unmapped, r.missed, r.undecided))?;
    Ok(format!(
        "psi = ({}), 1000/1000 pairs at t^1..t^4, {} cone directions carried onto",
        r.psi.join(", "),
        r.source_directions
    ))
}

fn acc9() -> Outcome {
    let line = set("vars x, y; y = 0");
    let r = risometry_implies_equal_cones_check(None, &cusp(), &line, &ints(&[0, 0]), 16, &EngineConfig::default())
        .map_err(|e| e.to_string())?;
    let m = cube_radius(16);
    let witness = ints(&[-m, 0]);
    let found = r.differences.iter().find(|d| d.y == show_list(&witness));
    ensure(found.is_some_and(|d| d.certified), format!("no certified difference at (-1, 0): {:?}", r.differences))?;
    ensure(r.certified_difference && !r.equal, "cones not certified different")?;
    Ok(format!("cones differ at {}: no risometry between the germs", show(&witness)))
}

fn show_list(y: &[Rational]) -> Vec<String> {
    y.iter().map(|c| c.to_string()).collect()
}

fn acc10() -> Outcome {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/scripts");
    let mut sizes = Vec::new();
    for name in ["plane.tc", "surface.tc"] {
        let text = std::fs::read_to_string(format!("{dir}/{name}")).map_err(|e| e.to_string())?;
        let settings = Settings::default();
        let first = run_script(&text, &settings).map_err(|e| e.to_string())?.to_json();
        let second = run_script(&text, &settings).map_err(|e| e.to_string())?.to_json();
        ensure(first == second, format!("{name}: JSON differs between runs"))?;
        sizes.push(format!("{name} {} bytes", first.len()));
    }
    Ok(format!("identical JSON: {}", sizes.join(", ")))
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "cusp cone", 1, acc1),
        (2, "surface cone scan", 30, acc2),
        (3, "induced strata, first stratification", 30, acc3),
        (4, "induced strata and Whitney, second stratification", 60, acc4),
        (5, "cone calculus on random plane sets", 120, acc5),
        (6, "numeric engine vs exact plane-curve cones", 120, acc6),
        (7, "valued-field axioms", 30, acc7),
        (8, "cone risometry lift", 10, acc8),
        (9, "different cones rule out a risometry", 5, acc9),
        (10, "deterministic JSON", 120, acc10),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= Duration::from_secs(limit) => (true, d),
            Ok(d) => (false, format!("over the {limit} s limit; {d}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "ACC {id:>2} {} {name} ({:.2} s, limit {limit} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
