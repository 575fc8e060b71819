//! `trstl` — synthesize control inputs that satisfy an STL specification
//! with maximal (or exactly targeted) time robustness, or monitor recorded
//! traces.

use clap::{Args, Parser};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use trstl_cli::run::{exit_code, run_scenario, RunOptions};
use trstl_cli::scenario::{Scenario, SolverSettings};
use trstl_cli::{bundled, bundled_scenarios};
use trstl_core::monitor::Side;
use trstl_core::synthesis::Mode;

#[derive(Parser)]
#[command(
    name = "trstl",
    version,
    about = "Time-robust STL control synthesis and monitoring"
)]
enum Cli {
    /// Synthesize an input sequence for one or more scenarios.
    Synth(SynthArgs),
    /// Evaluate robustness of a recorded trace against a scenario's formula.
    Monitor(MonitorArgs),
    /// List bundled scenarios or write them out as files.
    Scenarios(ScenariosArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Scenario files, or bundled scenarios as `bundled:<name>`.
    #[arg(required = true)]
    scenarios: Vec<String>,
    /// Override the objective: max or feas.
    #[arg(long, value_parser = ["max", "feas"])]
    mode: Option<String>,
    /// Robustness lower bound for max mode.
    #[arg(long)]
    theta_star: Option<i64>,
    /// Exact robustness for feas mode.
    #[arg(long, conflicts_with = "theta_star")]
    theta_target: Option<i64>,
    /// Override the trajectory horizon.
    #[arg(long)]
    horizon: Option<usize>,
    /// Robustness side: right or left.
    #[arg(long, value_parser = ["right", "left"])]
    side: Option<String>,
    /// TOML file with solver adapter settings (command, dialect,
    /// time_limit, mip_gap).
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Write the LP file here before solving.
    #[arg(long)]
    emit_lp: Option<PathBuf>,
    /// Write the encoder variable map here.
    #[arg(long)]
    emit_varmap: Option<PathBuf>,
    /// Output directory for artifacts (per-scenario subdirectories in
    /// batch mode).
    #[arg(long, default_value = "trstl-out")]
    out_dir: PathBuf,
    /// Additional subformula indices to profile.
    #[arg(long)]
    node: Vec<usize>,
    /// Run the scenarios in parallel, one solver process each.
    #[arg(long)]
    batch: bool,
}

#[derive(Args)]
struct MonitorArgs {
    /// Scenario file or `bundled:<name>`.
    scenario: String,
    /// Trace CSV: header row of variable names, one row per step.
    #[arg(long)]
    trace: PathBuf,
    /// Subformula indices to profile in addition to the root.
    #[arg(long)]
    node: Vec<usize>,
    /// Robustness side override.
    #[arg(long, value_parser = ["right", "left"])]
    side: Option<String>,
    #[arg(long, default_value = "trstl-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ScenariosArgs {
    /// Write every bundled scenario (and the reference trace) here.
    #[arg(long)]
    emit_dir: Option<PathBuf>,
}

fn load_scenario(spec: &str) -> Result<Scenario, String> {
    if let Some(name) = spec.strip_prefix("bundled:") {
        let entry = bundled(name).ok_or_else(|| {
            format!(
                "no bundled scenario `{name}`; available: {}",
                bundled_scenarios().iter().map(|b| b.name).collect::<Vec<_>>().join(", ")
            )
        })?;
        return entry.parse().map_err(|e| format!("{name}: {e}"));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
    Scenario::from_toml_str(&text).map_err(|e| format!("{spec}: {e}"))
}

fn apply_overrides(scenario: &mut Scenario, args: &SynthArgs) -> Result<(), String> {
    match args.mode.as_deref() {
        Some("max") => {
            scenario.mode = Mode::Maximize { theta_star: args.theta_star.unwrap_or(1) };
        }
        Some("feas") => {
            let target = args
                .theta_target
                .ok_or("feas mode needs --theta-target")?;
            scenario.mode = Mode::Feasibility { theta_target: target };
        }
        _ => {
            if let Some(ts) = args.theta_star {
                scenario.mode = Mode::Maximize { theta_star: ts };
            }
            if let Some(tt) = args.theta_target {
                scenario.mode = Mode::Feasibility { theta_target: tt };
            }
        }
    }
    if let Some(h) = args.horizon {
        if h < scenario.formula.horizon() {
            return Err(format!(
                "--horizon {h} is below the formula horizon {}",
                scenario.formula.horizon()
            ));
        }
        scenario.horizon = h;
    }
    if let Some(side) = parse_side(args.side.as_deref()) {
        scenario.side = side;
    }
    if let Some(path) = &args.solver {
        scenario.solver = load_solver_settings(path)?;
    }
    Ok(())
}

fn parse_side(side: Option<&str>) -> Option<Side> {
    match side {
        Some("left") => Some(Side::Left),
        Some("right") => Some(Side::Right),
        _ => None,
    }
}

fn load_solver_settings(path: &Path) -> Result<SolverSettings, String> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct File {
        command: Option<Vec<String>>,
        dialect: Option<String>,
        time_limit: Option<f64>,
        mip_gap: Option<f64>,
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let raw: File = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(SolverSettings {
        command: raw.command,
        dialect: raw
            .dialect
            .map(|d| d.parse())
            .transpose()?
            .unwrap_or(trstl_core::milp::SolutionDialect::Plain),
        time_limit: raw.time_limit,
        mip_gap: raw.mip_gap.unwrap_or(0.0),
    })
}

fn synth(args: SynthArgs) -> i32 {
    let mut jobs = Vec::new();
    for spec in &args.scenarios {
        let mut scenario = match load_scenario(spec) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code::PARSE;
            }
        };
        if let Err(e) = apply_overrides(&mut scenario, &args) {
            eprintln!("error: {e}");
            return exit_code::PARSE;
        }
        let out_dir = if args.scenarios.len() > 1 {
            args.out_dir.join(&scenario.name)
        } else {
            args.out_dir.clone()
        };
        let opts = RunOptions {
            out_dir,
            nodes: args.node.clone(),
            emit_lp: args.emit_lp.clone(),
            emit_varmap: args.emit_varmap.clone(),
            trace: None,
            quiet: false,
        };
        jobs.push((scenario, opts));
    }
    let outcomes: Vec<(String, i32, String)> = if args.batch && jobs.len() > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .iter()
                .map(|(scenario, opts)| {
                    scope.spawn(move || {
                        let out = run_scenario(scenario, opts);
                        (scenario.name.clone(), out.code, out.report)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    } else {
        jobs.iter()
            .map(|(scenario, opts)| {
                let out = run_scenario(scenario, opts);
                (scenario.name.clone(), out.code, out.report)
            })
            .collect()
    };
    let mut worst = exit_code::SUCCESS;
    for (name, code, report) in outcomes {
        if code == exit_code::SUCCESS {
            print!("{report}");
        } else {
            eprintln!("[{name}] exited with code {code}");
            eprint!("{report}");
        }
        worst = worst.max(code);
    }
    worst
}

fn monitor(args: MonitorArgs) -> i32 {
    let mut scenario = match load_scenario(&args.scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code::PARSE;
        }
    };
    if let Some(side) = parse_side(args.side.as_deref()) {
        scenario.side = side;
    }
    let opts = RunOptions {
        out_dir: args.out_dir,
        nodes: args.node,
        emit_lp: None,
        emit_varmap: None,
        trace: Some(args.trace),
        quiet: false,
    };
    let out = run_scenario(&scenario, &opts);
    if out.code == exit_code::SUCCESS {
        print!("{}", out.report);
    } else {
        eprint!("{}", out.report);
    }
    out.code
}

fn scenarios(args: ScenariosArgs) -> i32 {
    match args.emit_dir {
        Some(dir) => {
            if let Err(e) = std::fs::create_dir_all(&dir) {
                eprintln!("error: cannot create {}: {e}", dir.display());
                return exit_code::FAILURE;
            }
            for b in bundled_scenarios() {
                let path = dir.join(format!("{}.toml", b.name));
                if let Err(e) = std::fs::write(&path, b.toml) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return exit_code::FAILURE;
                }
            }
            let trace = dir.join("table1_trace.csv");
            if let Err(e) = std::fs::write(&trace, trstl_cli::bundled::TABLE1_TRACE) {
                eprintln!("error: cannot write {}: {e}", trace.display());
                return exit_code::FAILURE;
            }
            println!("wrote {} scenarios to {}", bundled_scenarios().len(), dir.display());
        }
        None => {
            for b in bundled_scenarios() {
                match b.parse() {
                    Ok(s) => println!("{:24} {}", b.name, s.formula_text),
                    Err(e) => println!("{:24} (broken: {e})", b.name),
                }
            }
        }
    }
    exit_code::SUCCESS
}

fn main() -> ExitCode {
    let code = match Cli::parse() {
        Cli::Synth(args) => synth(args),
        Cli::Monitor(args) => monitor(args),
        Cli::Scenarios(args) => scenarios(args),
    };
    ExitCode::from(code.clamp(0, 255) as u8)
}
