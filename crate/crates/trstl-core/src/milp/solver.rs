//! External MILP solver adapter.
//!
//! The model is written to an LP file in a temporary directory, a solver
//! subprocess is launched from an argv template (placeholders `{model}`,
//! `{solution}`, `{time_limit}`, `{mip_gap}`), and its solution file is
//! parsed back. Three solution-file dialects are understood:
//!
//! * `plain` — `status`/`objective` headers followed by `name value` lines
//!   (the format written by the bundled `trstl-solve` wrapper);
//! * `highs` — the HiGHS raw solution file (`Model status`, `# Columns n`);
//! * `cbc` — CBC's `solve ... solution file` output
//!   (`Optimal - objective value v`, then `idx name value reduced-cost`).
//!
//! The adapter enforces a wall-clock kill a little past the solver's own
//! time limit so a wedged subprocess cannot hang a synthesis job.

use super::{write_lp, MilpError, MilpModel, VarId, VarKind};
use crate::rat;
use num::rational::BigRational;
use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] MilpError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("no MILP solver configured: set TRSTL_SOLVER, or place `trstl-solve` or `highs` on PATH")]
    NoSolver,
    #[error("solver exited with {status:?} and unparseable output:\n{stderr}")]
    SolverFailed { status: Option<i32>, stderr: String },
    #[error("solution file is missing or malformed: {0}")]
    BadSolution(String),
    #[error("integer variable `{name}` has non-integral value {value}")]
    NonIntegralValue { name: String, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionDialect {
    Plain,
    Highs,
    Cbc,
}

impl std::str::FromStr for SolutionDialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(SolutionDialect::Plain),
            "highs" => Ok(SolutionDialect::Highs),
            "cbc" => Ok(SolutionDialect::Cbc),
            other => Err(format!("unknown solution dialect `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Argv template; the first element is the executable.
    pub command: Vec<String>,
    pub dialect: SolutionDialect,
    /// Seconds granted to the solver; `None` means unlimited.
    pub time_limit: Option<f64>,
    /// Relative MIP gap; 0 demands the exact optimum.
    pub mip_gap: f64,
    /// Copy the raw solution file here after parsing.
    pub keep_solution: Option<PathBuf>,
}

impl SolverConfig {
    /// Resolves a usable solver:
    /// 1. `TRSTL_SOLVER` (whitespace-separated argv template, dialect from
    ///    `TRSTL_SOLVER_DIALECT`, default `plain`);
    /// 2. a `trstl-solve` binary next to the current executable or on PATH;
    /// 3. a `highs` binary on PATH.
    pub fn locate() -> Result<Self, SolveError> {
        if let Ok(tpl) = std::env::var("TRSTL_SOLVER") {
            let command: Vec<String> = tpl.split_whitespace().map(str::to_string).collect();
            if !command.is_empty() {
                let dialect = std::env::var("TRSTL_SOLVER_DIALECT")
                    .ok()
                    .and_then(|d| d.parse().ok())
                    .unwrap_or(SolutionDialect::Plain);
                return Ok(SolverConfig {
                    command,
                    dialect,
                    time_limit: None,
                    mip_gap: 0.0,
                    keep_solution: None,
                });
            }
        }
        if let Some(path) = find_sibling("trstl-solve").or_else(|| find_on_path("trstl-solve")) {
            return Ok(SolverConfig {
                command: vec![
                    path.to_string_lossy().into_owned(),
                    "{model}".into(),
                    "{solution}".into(),
                    "--time-limit".into(),
                    "{time_limit}".into(),
                    "--mip-gap".into(),
                    "{mip_gap}".into(),
                ],
                dialect: SolutionDialect::Plain,
                time_limit: None,
                mip_gap: 0.0,
                keep_solution: None,
            });
        }
        if let Some(path) = find_on_path("highs") {
            return Ok(SolverConfig {
                command: vec![
                    path.to_string_lossy().into_owned(),
                    "--solution_file".into(),
                    "{solution}".into(),
                    "--time_limit".into(),
                    "{time_limit}".into(),
                    "{model}".into(),
                ],
                dialect: SolutionDialect::Highs,
                time_limit: None,
                mip_gap: 0.0,
                keep_solution: None,
            });
        }
        Err(SolveError::NoSolver)
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }
}

/// Binaries built in the same cargo target directory as the running
/// executable: next to it, or one level up for test binaries in `deps/`.
fn find_sibling(name: &str) -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let mut dir = exe.parent()?.to_path_buf();
    for _ in 0..2 {
        let candidate = dir.join(name);
        if candidate.is_file() {
            return Some(candidate);
        }
        dir = dir.parent()?.to_path_buf();
    }
    None
}

fn find_on_path(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|d| d.join(name))
        .find(|c| c.is_file())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
    Timeout,
    Error,
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::Feasible => "feasible",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::Unbounded => "unbounded",
            SolverStatus::Timeout => "timeout",
            SolverStatus::Error => "error",
        };
        f.write_str(s)
    }
}

/// Parsed solver result. Integer and binary assignments are rounded on
/// ingest and must be integral within 1e-6 of their reported value.
#[derive(Debug, Clone)]
pub struct SolverOutcome {
    pub status: SolverStatus,
    pub objective_value: Option<BigRational>,
    pub assignment: HashMap<VarId, BigRational>,
}

impl SolverOutcome {
    pub fn value(&self, v: VarId) -> Option<&BigRational> {
        self.assignment.get(&v)
    }

    pub fn value_f64(&self, v: VarId) -> Option<f64> {
        self.value(v).map(rat::to_f64)
    }

    pub fn value_i64(&self, v: VarId) -> Option<i64> {
        self.value(v).and_then(|r| rat::round_to_i64(r, 1e-6))
    }
}

/// Writes the LP file, runs the configured solver and parses its solution.
pub fn solve(model: &MilpModel, config: &SolverConfig) -> Result<SolverOutcome, SolveError> {
    let dir = tempfile::Builder::new().prefix("trstl-milp").tempdir()?;
    let model_path = dir.path().join("model.lp");
    let solution_path = dir.path().join("solution.sol");
    std::fs::write(&model_path, write_lp(model)?)?;
    run_solver(config, &model_path, &solution_path)?;
    if let Some(keep) = &config.keep_solution {
        let _ = std::fs::copy(&solution_path, keep);
    }
    let text = std::fs::read_to_string(&solution_path).unwrap_or_default();
    let parsed = match config.dialect {
        SolutionDialect::Plain => parse_plain(&text),
        SolutionDialect::Highs => parse_highs(&text),
        SolutionDialect::Cbc => parse_cbc(&text),
    }?;
    ingest(model, parsed)
}

struct RawSolution {
    status: SolverStatus,
    objective: Option<f64>,
    values: Vec<(String, f64)>,
}

fn run_solver(config: &SolverConfig, model: &Path, solution: &Path) -> Result<(), SolveError> {
    if config.command.is_empty() {
        return Err(SolveError::NoSolver);
    }
    let time_limit = config.time_limit.unwrap_or(1e9);
    let argv: Vec<String> = config
        .command
        .iter()
        .map(|a| {
            a.replace("{model}", &model.to_string_lossy())
                .replace("{solution}", &solution.to_string_lossy())
                .replace("{time_limit}", &format!("{time_limit}"))
                .replace("{mip_gap}", &format!("{}", config.mip_gap))
        })
        .collect();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                SolveError::NoSolver
            } else {
                SolveError::Io(e)
            }
        })?;
    // grace period past the solver's own limit, then hard kill
    let deadline = config
        .time_limit
        .map(|s| Instant::now() + Duration::from_secs_f64(s + 15.0));
    loop {
        match child.try_wait()? {
            Some(status) => {
                if !status.success() && !solution.exists() {
                    let mut stderr = String::new();
                    if let Some(mut pipe) = child.stderr.take() {
                        let _ = pipe.read_to_string(&mut stderr);
                    }
                    return Err(SolveError::SolverFailed { status: status.code(), stderr });
                }
                return Ok(());
            }
            None => {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        let _ = child.kill();
                        let _ = child.wait();
                        return Err(SolveError::SolverFailed {
                            status: None,
                            stderr: "killed after exceeding the wall-clock deadline".into(),
                        });
                    }
                }
                std::thread::sleep(Duration::from_millis(20));
            }
        }
    }
}

fn parse_status_word(word: &str) -> SolverStatus {
    match word.to_ascii_lowercase().as_str() {
        "optimal" => SolverStatus::Optimal,
        "feasible" => SolverStatus::Feasible,
        "infeasible" => SolverStatus::Infeasible,
        "unbounded" => SolverStatus::Unbounded,
        "timeout" | "time_limit" => SolverStatus::Timeout,
        _ => SolverStatus::Error,
    }
}

fn parse_plain(text: &str) -> Result<RawSolution, SolveError> {
    let mut status = None;
    let mut objective = None;
    let mut values = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(key), Some(value)) = (parts.next(), parts.next()) else {
            continue;
        };
        match key {
            "status" => status = Some(parse_status_word(value)),
            "objective" => {
                if value != "none" {
                    objective = Some(value.parse().map_err(|_| {
                        SolveError::BadSolution(format!("bad objective `{value}`"))
                    })?);
                }
            }
            name => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| SolveError::BadSolution(format!("bad value for `{name}`")))?;
                values.push((name.to_string(), v));
            }
        }
    }
    let status = status.ok_or_else(|| SolveError::BadSolution("missing status line".into()))?;
    Ok(RawSolution { status, objective, values })
}

fn parse_highs(text: &str) -> Result<RawSolution, SolveError> {
    let mut lines = text.lines().peekable();
    let mut status = SolverStatus::Error;
    let mut objective = None;
    let mut values = Vec::new();
    while let Some(line) = lines.next() {
        let line = line.trim();
        if line == "Model status" {
            if let Some(word) = lines.next() {
                status = match word.trim() {
                    "Optimal" => SolverStatus::Optimal,
                    "Infeasible" => SolverStatus::Infeasible,
                    "Unbounded" => SolverStatus::Unbounded,
                    "Time limit reached" => SolverStatus::Timeout,
                    _ => SolverStatus::Error,
                };
            }
        } else if let Some(rest) = line.strip_prefix("Objective") {
            objective = rest.trim().parse().ok();
        } else if let Some(rest) = line.strip_prefix("# Columns") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| SolveError::BadSolution("bad column count".into()))?;
            for _ in 0..n {
                let row = lines
                    .next()
                    .ok_or_else(|| SolveError::BadSolution("truncated columns".into()))?;
                let mut parts = row.split_whitespace();
                let (Some(name), Some(value)) = (parts.next(), parts.next()) else {
                    return Err(SolveError::BadSolution(format!("bad column row `{row}`")));
                };
                let v: f64 = value
                    .parse()
                    .map_err(|_| SolveError::BadSolution(format!("bad value `{value}`")))?;
                values.push((name.to_string(), v));
            }
            break;
        }
    }
    // a timed-out run with an incumbent still reports its columns
    if status == SolverStatus::Timeout && !values.is_empty() {
        return Ok(RawSolution { status, objective, values });
    }
    Ok(RawSolution { status, objective, values })
}

fn parse_cbc(text: &str) -> Result<RawSolution, SolveError> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| SolveError::BadSolution("empty solution file".into()))?;
    let lower = head.to_ascii_lowercase();
    let status = if lower.starts_with("optimal") {
        SolverStatus::Optimal
    } else if lower.contains("infeasible") {
        SolverStatus::Infeasible
    } else if lower.contains("unbounded") {
        SolverStatus::Unbounded
    } else if lower.contains("stopped") {
        SolverStatus::Timeout
    } else {
        SolverStatus::Error
    };
    let objective = head
        .rsplit("objective value")
        .next()
        .and_then(|s| s.trim().parse().ok());
    let mut values = Vec::new();
    for line in lines {
        let mut parts = line.split_whitespace();
        let (Some(_idx), Some(name), Some(value)) = (parts.next(), parts.next(), parts.next())
        else {
            continue;
        };
        let v: f64 = value
            .parse()
            .map_err(|_| SolveError::BadSolution(format!("bad value `{value}`")))?;
        values.push((name.to_string(), v));
    }
    Ok(RawSolution { status, objective, values })
}

fn ingest(model: &MilpModel, raw: RawSolution) -> Result<SolverOutcome, SolveError> {
    let mut assignment = HashMap::new();
    let has_values = !raw.values.is_empty();
    for (name, value) in raw.values {
        let Some(id) = model.var_id(&name) else {
            continue; // solvers may report their own auxiliary columns
        };
        let exact = match model.var(id).kind {
            VarKind::Integer | VarKind::Binary => {
                let rounded = value.round();
                if (value - rounded).abs() > 1e-6 {
                    return Err(SolveError::NonIntegralValue { name, value });
                }
                BigRational::from_integer((rounded as i64).into())
            }
            VarKind::Continuous => rat::from_f64(value)
                .map_err(|_| SolveError::BadSolution(format!("non-finite value for `{name}`")))?,
        };
        assignment.insert(id, exact);
    }
    let status = match raw.status {
        s @ (SolverStatus::Optimal | SolverStatus::Feasible) if !has_values => {
            // claimed a solution but provided none
            if s == SolverStatus::Optimal && model.num_vars() == 0 {
                s
            } else {
                SolverStatus::Error
            }
        }
        s => s,
    };
    let objective_value = match raw.objective {
        Some(v) if matches!(
            status,
            SolverStatus::Optimal | SolverStatus::Feasible | SolverStatus::Timeout
        ) && has_values =>
        {
            Some(rat::from_f64(v).map_err(|_| {
                SolveError::BadSolution("non-finite objective".into())
            })?)
        }
        _ => None,
    };
    Ok(SolverOutcome { status, objective_value, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_dialect() {
        let text = "status optimal\nobjective 7\nx 7\nb 1\n";
        let raw = parse_plain(text).unwrap();
        assert_eq!(raw.status, SolverStatus::Optimal);
        assert_eq!(raw.objective, Some(7.0));
        assert_eq!(raw.values.len(), 2);
    }

    #[test]
    fn highs_dialect() {
        let text = "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 23\n# Columns 2\nx0 1.5\nz_3 1\n# Rows 1\nr0 0\n";
        let raw = parse_highs(text).unwrap();
        assert_eq!(raw.status, SolverStatus::Optimal);
        assert_eq!(raw.objective, Some(23.0));
        assert_eq!(raw.values, vec![("x0".into(), 1.5), ("z_3".into(), 1.0)]);
    }

    #[test]
    fn cbc_dialect() {
        let text = "Optimal - objective value 7.00000000\n 0 x 7 0\n 1 b 1 0\n";
        let raw = parse_cbc(text).unwrap();
        assert_eq!(raw.status, SolverStatus::Optimal);
        assert_eq!(raw.objective, Some(7.0));
        assert_eq!(raw.values.len(), 2);
    }

    #[test]
    fn integral_rounding_guard() {
        let mut m = MilpModel::new();
        m.add_integer(
            "y",
            BigRational::from_integer(0.into()),
            BigRational::from_integer(9.into()),
        )
        .unwrap();
        let raw = RawSolution {
            status: SolverStatus::Optimal,
            objective: Some(3.0),
            values: vec![("y".into(), 2.9999997)],
        };
        let out = ingest(&m, raw).unwrap();
        assert_eq!(out.value_i64(VarId(0)), Some(3));
        let raw = RawSolution {
            status: SolverStatus::Optimal,
            objective: Some(3.0),
            values: vec![("y".into(), 2.5)],
        };
        assert!(matches!(ingest(&m, raw), Err(SolveError::NonIntegralValue { .. })));
    }
}
