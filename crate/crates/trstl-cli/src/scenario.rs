//! Scenario files.
//!
//! A scenario is a TOML document with four sections:
//!
//! ```toml
//! name = "uav"
//!
//! [system]
//! variables = ["z", "vz"]
//! a = [[1, 1], [0, 1]]
//! b = [[0.5], [1]]
//! x0 = [0, 0]
//! state_box = [[-100, 100], [-10, 10]]
//! input_box = [[-0.2, 0.2]]        # or: input_inf_bound = 0.2
//!
//! [spec]
//! formula = "G[20,30] (z >= 20) & G[60,70] (z <= 10)"
//! hard_constraints = ["vz <= 1.5", "vz >= -1.5"]
//! horizon = 100
//! side = "right"
//! eps = 0.0001
//!
//! [mode]
//! kind = "maximize"                # or "feasibility"
//! theta_star = 1                   # theta_target for feasibility
//!
//! [solver]
//! time_limit = 600
//! mip_gap = 0.0
//! ```
//!
//! Rectangular region membership can be declared once and referenced from
//! the formula as `@name`; each reference expands to the conjunction of the
//! four bounding predicates:
//!
//! ```toml
//! [spec.regions.goal1]
//! vars = ["x1", "y1"]
//! lower = [9, 9]
//! upper = [13, 13]
//! ```
//!
//! All numbers are read as exact decimals; matrices are row lists.

use num::rational::BigRational;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;
use trstl_core::formula::{Formula, LinearPredicate};
use trstl_core::milp::{SolutionDialect, SolverConfig};
use trstl_core::monitor::Side;
use trstl_core::parser::parse_formula;
use trstl_core::rat;
use trstl_core::synthesis::{LtiSystem, Mode, SynthesisProblem};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("formula: {0}")]
    Formula(#[from] trstl_core::parser::ParseError),
    #[error("system: {0}")]
    System(#[from] trstl_core::synthesis::SynthesisError),
    #[error("unknown region `@{0}` in formula")]
    UnknownRegion(String),
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

/// Axis-aligned box over a subset of the state variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub vars: Vec<String>,
    pub lower: Vec<BigRational>,
    pub upper: Vec<BigRational>,
}

impl Region {
    /// Conjunction of `v >= lo & v <= hi` per variable, parenthesized.
    fn expansion(&self) -> String {
        let mut parts = Vec::with_capacity(2 * self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            parts.push(format!("{v} >= {}", dec(&self.lower[i])));
            parts.push(format!("{v} <= {}", dec(&self.upper[i])));
        }
        format!("({})", parts.join(" & "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub command: Option<Vec<String>>,
    pub dialect: SolutionDialect,
    pub time_limit: Option<f64>,
    pub mip_gap: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            command: None,
            dialect: SolutionDialect::Plain,
            time_limit: None,
            mip_gap: 0.0,
        }
    }
}

impl SolverSettings {
    /// Resolves to an adapter config, falling back to auto-detection when no
    /// command is given.
    pub fn resolve(&self) -> Result<SolverConfig, trstl_core::milp::SolveError> {
        let mut config = match &self.command {
            Some(cmd) => SolverConfig {
                command: cmd.clone(),
                dialect: self.dialect,
                time_limit: None,
                mip_gap: self.mip_gap,
                keep_solution: None,
            },
            None => SolverConfig::locate()?,
        };
        config.time_limit = self.time_limit;
        config.mip_gap = self.mip_gap;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub variables: Vec<String>,
    pub input_names: Vec<String>,
    pub system: LtiSystem,
    /// Formula text as written, with region references unexpanded.
    pub formula_text: String,
    pub formula: Formula,
    pub hard_constraint_texts: Vec<String>,
    pub hard_constraints: Vec<LinearPredicate>,
    pub horizon: usize,
    pub side: Side,
    pub mode: Mode,
    pub eps: BigRational,
    pub regions: BTreeMap<String, Region>,
    pub solver: SolverSettings,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    system: RawSystem,
    spec: RawSpec,
    mode: RawMode,
    #[serde(default)]
    solver: Option<RawSolver>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    variables: Vec<String>,
    input_names: Option<Vec<String>>,
    a: Vec<Vec<toml::Value>>,
    b: Vec<Vec<toml::Value>>,
    x0: Vec<toml::Value>,
    state_box: Vec<Vec<toml::Value>>,
    input_box: Option<Vec<Vec<toml::Value>>>,
    input_inf_bound: Option<toml::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    formula: String,
    #[serde(default)]
    hard_constraints: Vec<String>,
    horizon: usize,
    side: Option<String>,
    eps: Option<toml::Value>,
    #[serde(default)]
    regions: BTreeMap<String, RawRegion>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    vars: Vec<String>,
    lower: Vec<toml::Value>,
    upper: Vec<toml::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMode {
    kind: String,
    theta_star: Option<i64>,
    theta_target: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    command: Option<Vec<String>>,
    dialect: Option<String>,
    time_limit: Option<f64>,
    mip_gap: Option<f64>,
}

fn number(v: &toml::Value, what: &str) -> Result<BigRational, ScenarioError> {
    let text = match v {
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => format!("{f}"),
        toml::Value::String(s) => s.clone(),
        other => return Err(invalid(format!("{what}: expected a number, got {other}"))),
    };
    rat::parse_decimal(&text).map_err(|e| invalid(format!("{what}: {e}")))
}

fn matrix(rows: &[Vec<toml::Value>], what: &str) -> Result<Vec<Vec<BigRational>>, ScenarioError> {
    rows.iter()
        .map(|row| row.iter().map(|v| number(v, what)).collect())
        .collect()
}

fn boxes(
    rows: &[Vec<toml::Value>],
    what: &str,
) -> Result<Vec<(BigRational, BigRational)>, ScenarioError> {
    rows.iter()
        .map(|row| {
            if row.len() != 2 {
                return Err(invalid(format!("{what}: each box entry is [lower, upper]")));
            }
            Ok((number(&row[0], what)?, number(&row[1], what)?))
        })
        .collect()
}

fn dec(r: &BigRational) -> String {
    rat::to_decimal_string(r).unwrap_or_else(|_| r.to_string())
}

/// Replaces every `@name` with the region's predicate conjunction.
pub fn expand_regions(
    text: &str,
    regions: &BTreeMap<String, Region>,
) -> Result<String, ScenarioError> {
    let mut out = String::with_capacity(text.len());
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'@' {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            let name = &text[start..end];
            let region = regions
                .get(name)
                .ok_or_else(|| ScenarioError::UnknownRegion(name.to_string()))?;
            out.push_str(&region.expansion());
            i = end;
        } else {
            out.push(bytes[i] as char);
            i += 1;
        }
    }
    Ok(out)
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario = toml::from_str(text)?;
        let variables = raw.system.variables;
        let a = matrix(&raw.system.a, "system.a")?;
        let b = matrix(&raw.system.b, "system.b")?;
        let x0: Vec<BigRational> = raw
            .system
            .x0
            .iter()
            .map(|v| number(v, "system.x0"))
            .collect::<Result<_, _>>()?;
        if variables.len() != a.len() {
            return Err(invalid(format!(
                "system declares {} variables but A has {} rows",
                variables.len(),
                a.len()
            )));
        }
        let state_box = boxes(&raw.system.state_box, "system.state_box")?;
        let m = b.first().map(|r| r.len()).unwrap_or(0);
        let input_box = match (&raw.system.input_box, &raw.system.input_inf_bound) {
            (Some(rows), None) => boxes(rows, "system.input_box")?,
            (None, Some(bound)) => {
                let r = number(bound, "system.input_inf_bound")?;
                (0..m).map(|_| (-r.clone(), r.clone())).collect()
            }
            (Some(_), Some(_)) => {
                return Err(invalid("give either input_box or input_inf_bound, not both"))
            }
            (None, None) => return Err(invalid("missing input_box or input_inf_bound")),
        };
        let input_names = match raw.system.input_names {
            Some(names) => {
                if names.len() != m {
                    return Err(invalid(format!("{} input names for {m} inputs", names.len())));
                }
                names
            }
            None => (0..m).map(|j| format!("u{j}")).collect(),
        };
        let system = LtiSystem::new(a, b, state_box, input_box, x0)?;

        let mut regions = BTreeMap::new();
        for (name, r) in &raw.spec.regions {
            if r.vars.len() != r.lower.len() || r.vars.len() != r.upper.len() {
                return Err(invalid(format!(
                    "region `{name}`: vars, lower and upper must have equal length"
                )));
            }
            for v in &r.vars {
                if !variables.contains(v) {
                    return Err(invalid(format!("region `{name}` uses unknown variable `{v}`")));
                }
            }
            regions.insert(
                name.clone(),
                Region {
                    vars: r.vars.clone(),
                    lower: r
                        .lower
                        .iter()
                        .map(|v| number(v, "region"))
                        .collect::<Result<_, _>>()?,
                    upper: r
                        .upper
                        .iter()
                        .map(|v| number(v, "region"))
                        .collect::<Result<_, _>>()?,
                },
            );
        }
        let formula_text = raw.spec.formula;
        let expanded = expand_regions(&formula_text, &regions)?;
        let formula = parse_formula(&expanded, &variables)?;
        if formula.horizon() > raw.spec.horizon {
            return Err(invalid(format!(
                "formula horizon {} exceeds scenario horizon {}",
                formula.horizon(),
                raw.spec.horizon
            )));
        }
        let mut hard_constraints = Vec::new();
        for text in &raw.spec.hard_constraints {
            let expanded = expand_regions(text, &regions)?;
            match parse_formula(&expanded, &variables)? {
                Formula::Predicate(p) => hard_constraints.push(p),
                _ => {
                    return Err(invalid(format!(
                        "hard constraint `{text}` must be a single predicate"
                    )))
                }
            }
        }
        let side = match raw.spec.side.as_deref() {
            None | Some("right") => Side::Right,
            Some("left") => Side::Left,
            Some(other) => {
                return Err(invalid(format!("side must be right or left, not `{other}`")))
            }
        };
        let eps = match &raw.spec.eps {
            Some(v) => number(v, "spec.eps")?,
            None => rat::parse_decimal("0.0001").unwrap(),
        };
        let mode = match raw.mode.kind.as_str() {
            "maximize" | "max" => Mode::Maximize { theta_star: raw.mode.theta_star.unwrap_or(1) },
            "feasibility" | "feas" => Mode::Feasibility {
                theta_target: raw
                    .mode
                    .theta_target
                    .ok_or_else(|| invalid("feasibility mode needs theta_target"))?,
            },
            other => {
                return Err(invalid(format!(
                    "mode.kind must be maximize or feasibility, not `{other}`"
                )))
            }
        };
        let solver = match raw.solver {
            Some(rs) => SolverSettings {
                command: rs.command,
                dialect: rs
                    .dialect
                    .map(|d| d.parse().map_err(invalid))
                    .transpose()?
                    .unwrap_or(SolutionDialect::Plain),
                time_limit: rs.time_limit,
                mip_gap: rs.mip_gap.unwrap_or(0.0),
            },
            None => SolverSettings::default(),
        };
        Ok(Scenario {
            name: raw.name.unwrap_or_else(|| "scenario".to_string()),
            variables,
            input_names,
            system,
            formula_text,
            formula,
            hard_constraint_texts: raw.spec.hard_constraints,
            hard_constraints,
            horizon: raw.spec.horizon,
            side,
            mode,
            eps,
            regions,
            solver,
        })
    }

    /// Canonical TOML rendering; parsing it back yields an equal scenario.
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name = {:?}", self.name);
        let _ = writeln!(out, "\n[system]");
        let _ = writeln!(out, "variables = [{}]", quote_list(&self.variables));
        let _ = writeln!(out, "input_names = [{}]", quote_list(&self.input_names));
        let _ = writeln!(out, "a = {}", matrix_text(self.system.a()));
        let _ = writeln!(out, "b = {}", matrix_text(self.system.b()));
        let _ = writeln!(
            out,
            "x0 = [{}]",
            self.system.x0().iter().map(dec).collect::<Vec<_>>().join(", ")
        );
        let _ = writeln!(out, "state_box = {}", box_text(self.system.state_box()));
        let _ = writeln!(out, "input_box = {}", box_text(self.system.input_box()));
        let _ = writeln!(out, "\n[spec]");
        let _ = writeln!(out, "formula = {:?}", self.formula_text);
        if !self.hard_constraint_texts.is_empty() {
            let _ = writeln!(
                out,
                "hard_constraints = [{}]",
                quote_list(&self.hard_constraint_texts)
            );
        }
        let _ = writeln!(out, "horizon = {}", self.horizon);
        let _ = writeln!(out, "side = \"{}\"", self.side);
        let _ = writeln!(out, "eps = {}", dec(&self.eps));
        for (name, region) in &self.regions {
            let _ = writeln!(out, "\n[spec.regions.{name}]");
            let _ = writeln!(out, "vars = [{}]", quote_list(&region.vars));
            let _ = writeln!(
                out,
                "lower = [{}]",
                region.lower.iter().map(dec).collect::<Vec<_>>().join(", ")
            );
            let _ = writeln!(
                out,
                "upper = [{}]",
                region.upper.iter().map(dec).collect::<Vec<_>>().join(", ")
            );
        }
        let _ = writeln!(out, "\n[mode]");
        match self.mode {
            Mode::Maximize { theta_star } => {
                let _ = writeln!(out, "kind = \"maximize\"");
                let _ = writeln!(out, "theta_star = {theta_star}");
            }
            Mode::Feasibility { theta_target } => {
                let _ = writeln!(out, "kind = \"feasibility\"");
                let _ = writeln!(out, "theta_target = {theta_target}");
            }
        }
        let _ = writeln!(out, "\n[solver]");
        if let Some(cmd) = &self.solver.command {
            let _ = writeln!(out, "command = [{}]", quote_list(cmd));
        }
        let dialect = match self.solver.dialect {
            SolutionDialect::Plain => "plain",
            SolutionDialect::Highs => "highs",
            SolutionDialect::Cbc => "cbc",
        };
        let _ = writeln!(out, "dialect = \"{dialect}\"");
        if let Some(t) = self.solver.time_limit {
            let _ = writeln!(out, "time_limit = {t}");
        }
        let _ = writeln!(out, "mip_gap = {}", self.solver.mip_gap);
        out
    }

    /// Assembles the synthesis problem with the scenario's solver settings.
    pub fn to_problem(&self) -> Result<SynthesisProblem, ScenarioError> {
        let solver = self.solver.resolve().map_err(|e| invalid(e.to_string()))?;
        let mut problem = SynthesisProblem::new(
            self.system.clone(),
            self.formula.clone(),
            self.horizon,
            self.mode,
            solver,
        );
        problem.side = self.side;
        problem.hard_constraints = self.hard_constraints.clone();
        problem.eps = self.eps.clone();
        Ok(problem)
    }

    /// Pre-order listing of subformulas rendered with the scenario's
    /// variable names; `--node` indexes into it.
    pub fn node_texts(&self) -> Vec<String> {
        self.formula
            .subformulas()
            .iter()
            .map(|f| f.pretty(&self.variables))
            .collect()
    }
}

fn quote_list(items: &[String]) -> String {
    items.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>().join(", ")
}

fn matrix_text(rows: &[Vec<BigRational>]) -> String {
    let rows: Vec<String> = rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(dec).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn box_text(rows: &[(BigRational, BigRational)]) -> String {
    let rows: Vec<String> = rows
        .iter()
        .map(|(l, u)| format!("[{}, {}]", dec(l), dec(u)))
        .collect();
    format!("[{}]", rows.join(", "))
}
