//! Scenario execution: synthesis runs and monitor-only runs, with their
//! file artifacts and run report.
//!
//! Artifacts land in the output directory: `trajectory.csv`, `inputs.csv`,
//! `robustness_<node>.csv` (monitor-verified values, never raw solver
//! output), `plot_data.csv` with states and per-node robustness against
//! time, and `report.txt` with the model size and timing columns. Exit code
//! 0 means a certificate-verified result; parse failures, infeasibility,
//! timeouts and certificate mismatches get distinct codes.

use crate::scenario::Scenario;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use trstl_core::monitor::robustness_profile;
use trstl_core::semantics::char_function;
use trstl_core::synthesis::{synthesize, SynthesisError, SynthesisResult};
use trstl_core::trajectory::Trajectory;

/// Exit codes of a scenario run.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const TIMEOUT: i32 = 4;
    pub const CERTIFICATE: i32 = 5;
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Extra subformula indices to profile (the root is always written).
    pub nodes: Vec<usize>,
    pub emit_lp: Option<PathBuf>,
    pub emit_varmap: Option<PathBuf>,
    /// Monitor a recorded trace instead of synthesizing.
    pub trace: Option<PathBuf>,
    pub quiet: bool,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub code: i32,
    pub report: String,
    /// Monitor-verified robustness at time 0, when a trajectory exists.
    pub theta: Option<i64>,
}

pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> RunOutcome {
    let outcome = match &opts.trace {
        Some(trace) => run_monitor(scenario, trace, opts),
        None => run_synthesis(scenario, opts),
    };
    match outcome {
        Ok(out) => out,
        Err(RunFailure { code, message }) => RunOutcome {
            code,
            report: message,
            theta: None,
        },
    }
}

struct RunFailure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> RunFailure {
    RunFailure { code, message: message.into() }
}

fn run_monitor(
    scenario: &Scenario,
    trace: &Path,
    opts: &RunOptions,
) -> Result<RunOutcome, RunFailure> {
    let file = fs::File::open(trace)
        .map_err(|e| fail(exit_code::PARSE, format!("cannot open trace {trace:?}: {e}")))?;
    let (traj, header) = Trajectory::from_csv(file)
        .map_err(|e| fail(exit_code::PARSE, format!("trace: {e}")))?;
    if header != scenario.variables {
        return Err(fail(
            exit_code::PARSE,
            format!(
                "trace header {:?} does not match scenario variables {:?}",
                header, scenario.variables
            ),
        ));
    }
    if scenario.formula.horizon() > traj.horizon() {
        return Err(fail(
            exit_code::PARSE,
            format!(
                "trace has horizon {}, formula needs {}",
                traj.horizon(),
                scenario.formula.horizon()
            ),
        ));
    }
    fs::create_dir_all(&opts.out_dir)
        .map_err(|e| fail(exit_code::FAILURE, format!("cannot create output dir: {e}")))?;
    let theta = write_profiles(scenario, &traj, opts)
        .map_err(|e| fail(exit_code::FAILURE, e))?;
    let chi = char_function(&scenario.formula, &traj, 0)
        .map_err(|e| fail(exit_code::FAILURE, e.to_string()))?;

    let mut report = String::new();
    let _ = writeln!(report, "scenario: {}", scenario.name);
    let _ = writeln!(report, "mode: monitor");
    let _ = writeln!(report, "side: {}", scenario.side);
    let _ = writeln!(report, "trace: {}", trace.display());
    let _ = writeln!(report, "trace_steps: {}", traj.horizon() + 1);
    let _ = writeln!(report, "theta_at_0: {theta}");
    let _ = writeln!(report, "chi_at_0: {chi}");
    fs::write(opts.out_dir.join("report.txt"), &report)
        .map_err(|e| fail(exit_code::FAILURE, format!("cannot write report: {e}")))?;
    Ok(RunOutcome { code: exit_code::SUCCESS, report, theta: Some(theta) })
}

fn run_synthesis(scenario: &Scenario, opts: &RunOptions) -> Result<RunOutcome, RunFailure> {
    fs::create_dir_all(&opts.out_dir)
        .map_err(|e| fail(exit_code::FAILURE, format!("cannot create output dir: {e}")))?;
    let mut problem = scenario
        .to_problem()
        .map_err(|e| fail(exit_code::PARSE, e.to_string()))?;
    problem.emit_lp = opts.emit_lp.clone();
    problem.emit_varmap = opts.emit_varmap.clone();
    let (result, mismatch) = match synthesize(&problem) {
        Ok(result) => (result, false),
        Err(SynthesisError::CertificateMismatch { result, .. }) => (*result, true),
        Err(SynthesisError::Infeasible) => {
            let report = infeasible_report(scenario);
            let _ = fs::write(opts.out_dir.join("report.txt"), &report);
            return Ok(RunOutcome { code: exit_code::INFEASIBLE, report, theta: None });
        }
        Err(SynthesisError::Timeout) => {
            let report = format!(
                "scenario: {}\nstatus: timeout\n(no incumbent within the time limit)\n",
                scenario.name
            );
            let _ = fs::write(opts.out_dir.join("report.txt"), &report);
            return Ok(RunOutcome { code: exit_code::TIMEOUT, report, theta: None });
        }
        Err(SynthesisError::Invalid(msg)) => return Err(fail(exit_code::PARSE, msg)),
        Err(other) => return Err(fail(exit_code::FAILURE, other.to_string())),
    };
    write_artifacts(scenario, &result, opts).map_err(|e| fail(exit_code::FAILURE, e))?;
    let report = synthesis_report(scenario, &result);
    fs::write(opts.out_dir.join("report.txt"), &report)
        .map_err(|e| fail(exit_code::FAILURE, format!("cannot write report: {e}")))?;
    let code = if mismatch { exit_code::CERTIFICATE } else { exit_code::SUCCESS };
    Ok(RunOutcome { code, report, theta: Some(result.theta_monitor) })
}

fn infeasible_report(scenario: &Scenario) -> String {
    let mut report = String::new();
    let _ = writeln!(report, "scenario: {}", scenario.name);
    let _ = writeln!(report, "mode: {}", mode_text(scenario));
    let _ = writeln!(report, "status: infeasible");
    let _ = writeln!(report, "(no input sequence attains the requested robustness)");
    report
}

fn mode_text(scenario: &Scenario) -> String {
    match scenario.mode {
        trstl_core::synthesis::Mode::Maximize { theta_star } => {
            format!("maximize (theta_star = {theta_star})")
        }
        trstl_core::synthesis::Mode::Feasibility { theta_target } => {
            format!("feasibility (theta_target = {theta_target})")
        }
    }
}

fn synthesis_report(scenario: &Scenario, result: &SynthesisResult) -> String {
    let mut report = String::new();
    let _ = writeln!(report, "scenario: {}", scenario.name);
    let _ = writeln!(report, "mode: {}", mode_text(scenario));
    let _ = writeln!(report, "side: {}", scenario.side);
    let _ = writeln!(report, "status: {}", result.status);
    let _ = writeln!(report, "theta: {}", result.theta_monitor);
    let _ = writeln!(report, "theta_milp: {}", result.theta_milp);
    let _ = writeln!(
        report,
        "certificate: {}",
        if result.certificate_ok { "ok" } else { "MISMATCH" }
    );
    let _ = writeln!(report, "constraints: {}", result.stats.constraints);
    let _ = writeln!(report, "binary_vars: {}", result.stats.binaries);
    let _ = writeln!(report, "integer_vars: {}", result.stats.integers);
    let _ = writeln!(report, "continuous_vars: {}", result.stats.continuous);
    let _ = writeln!(report, "build_seconds: {:.3}", result.stats.build_seconds);
    let _ = writeln!(report, "solve_seconds: {:.3}", result.stats.solve_seconds);
    let _ = writeln!(report, "resim_deviation: {:.3e}", result.resim_deviation);
    report
}

fn write_artifacts(
    scenario: &Scenario,
    result: &SynthesisResult,
    opts: &RunOptions,
) -> Result<(), String> {
    let dir = &opts.out_dir;
    let traj_file = fs::File::create(dir.join("trajectory.csv"))
        .map_err(|e| format!("trajectory.csv: {e}"))?;
    result
        .trajectory
        .write_csv(&scenario.variables, traj_file)
        .map_err(|e| e.to_string())?;
    let mut inputs = String::new();
    let _ = writeln!(inputs, "{}", scenario.input_names.join(","));
    for row in &result.inputs {
        let _ = writeln!(
            inputs,
            "{}",
            row.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
        );
    }
    fs::write(dir.join("inputs.csv"), inputs).map_err(|e| format!("inputs.csv: {e}"))?;
    write_profiles(scenario, &result.trajectory, opts)?;
    Ok(())
}

/// Monitor profiles for the root and every requested node, plus the plot
/// data table. Returns the root robustness at time 0.
fn write_profiles(
    scenario: &Scenario,
    traj: &Trajectory,
    opts: &RunOptions,
) -> Result<i64, String> {
    let subs = scenario.formula.subformulas();
    let mut nodes: Vec<usize> = vec![0];
    for n in &opts.nodes {
        if *n >= subs.len() {
            return Err(format!(
                "--node {n} out of range; the formula has {} subformulas",
                subs.len()
            ));
        }
        if !nodes.contains(n) {
            nodes.push(*n);
        }
    }
    let mut profiles = Vec::new();
    for idx in &nodes {
        let table = robustness_profile(subs[*idx], traj, scenario.side)
            .map_err(|e| e.to_string())?;
        let file = fs::File::create(opts.out_dir.join(format!("robustness_{idx}.csv")))
            .map_err(|e| e.to_string())?;
        table.write_csv(file).map_err(|e| e.to_string())?;
        profiles.push((*idx, table));
    }
    // combined plot table: states and per-node robustness against time
    let mut plot = String::new();
    let theta_cols: Vec<String> = nodes.iter().map(|i| format!("theta_node{i}")).collect();
    let _ = writeln!(plot, "t,{},{}", scenario.variables.join(","), theta_cols.join(","));
    for t in 0..=traj.horizon() {
        let state = traj
            .state(t)
            .iter()
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join(",");
        let thetas = profiles
            .iter()
            .map(|(_, table)| table.value(t).map(|v| v.to_string()).unwrap_or_default())
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(plot, "{t},{state},{thetas}");
    }
    fs::write(opts.out_dir.join("plot_data.csv"), plot).map_err(|e| e.to_string())?;
    let root = profiles[0].1.value(0).expect("root profile always covers t = 0");
    Ok(root)
}
