use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tancone::cone::Engine;
use tancone::report::{emit_json, repro_example, run_script, Example, Report, Settings};

/// Tangent cones, induced cone strata and Whitney checks for
/// semialgebraic sets described in a small script language.
#[derive(Debug, Parser)]
#[command(name = "tancone", version)]
struct Args {
    /// Script to run.
    #[arg(long, value_name = "FILE", required_unless_present = "repro", conflicts_with = "repro")]
    script: Option<PathBuf>,
    /// Run a built-in example (`cusp` or `surface3d`) instead of a script.
    #[arg(long, value_name = "NAME", value_parser = parse_example)]
    repro: Option<Example>,
    /// Also write the report as JSON.
    #[arg(long, value_name = "OUT")]
    json: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Comma-separated radii for the numeric engine, largest first.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    eps_schedule: Option<Vec<f64>>,
    /// Largest correction exponent tried by the series engine.
    #[arg(long, value_name = "ORDER")]
    trunc: Option<i64>,
    /// Stop at the first failed command or violation.
    #[arg(long)]
    strict: bool,
    /// Comma-separated engines, e.g. `numeric,puiseux`.
    #[arg(long, value_name = "LIST", value_delimiter = ',', value_parser = parse_engine)]
    engines: Option<Vec<Engine>>,
    /// Directions per side of the direction grid.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
}

fn parse_example(s: &str) -> Result<Example, String> {
    Example::parse(s).ok_or_else(|| format!("unknown example `{s}` (expected cusp or surface3d)"))
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    Engine::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Engine::ALL.iter().map(|e| e.name()).collect();
        format!("unknown engine `{s}` (expected one of {})", names.join(", "))
    })
}

fn settings(args: &Args) -> Result<Settings, String> {
    let mut s = Settings { strict: args.strict, ..Settings::default() };
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(list) = &args.eps_schedule {
        if list.is_empty() || list.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err("--eps-schedule needs positive radii".into());
        }
        s.eps_schedule = list.clone();
    }
    if let Some(t) = args.trunc {
        if t < 1 {
            return Err("--trunc must be at least 1".into());
        }
        s.trunc = t;
    }
    if let Some(e) = &args.engines {
        s.engines = e.clone();
    }
    if let Some(g) = args.grid {
        if g == 0 {
            return Err("--grid must be positive".into());
        }
        s.grid = g;
    }
    Ok(s)
}

fn run(args: &Args) -> Result<Report, String> {
    let settings = settings(args)?;
    let report = match (&args.script, args.repro) {
        (_, Some(example)) => repro_example(example, &settings),
        (Some(path), None) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            run_script(&text, &settings).map_err(|e| format!("{}: {e}", path.display()))?
        }
        (None, None) => unreachable!("clap requires --script or --repro"),
    };
    if let Some(out) = &args.json {
        emit_json(&report, out).map_err(|e| e.to_string())?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&args) {
        Ok(report) => {
            print!("{}", report.render_text());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
