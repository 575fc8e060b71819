//! Open-loop input synthesis for discrete-time linear systems.
//!
//! Builds a single MILP from the dynamics `x_{t+1} = A x_t + B u_t`, box
//! bounds on states and inputs, always-on hard constraints, and the
//! robustness encoding of the specification; then solves it, re-simulates
//! the returned inputs and re-computes the robustness with the exact
//! monitor. A result is only reported as certified when the monitor value
//! equals the MILP value exactly.
//!
//! Between solving and extraction there is a polish pass: all integer and
//! binary variables are pinned to their solved values and the remaining LP
//! maximizes slack on the predicate indicator constraints. This selects,
//! among the alternate optima with the same robustness, one that keeps every
//! `mu(x_t)` away from the sign boundary, so the certificate cannot be
//! flipped by the last-digit noise of re-simulation. Requirements of the
//! form "hold at every step" (input or velocity bounds) should go into
//! `hard_constraints` rather than the formula: their time robustness is
//! capped at zero by the trajectory end, which would pin the whole
//! objective there.

use crate::encoder::{encode_formula, EncodeError, EncodedFormula, EncoderConfig};
use crate::formula::{Formula, LinearPredicate};
use crate::milp::{
    solve, LinExpr, MilpError, MilpModel, Objective, Sense, SolveError, SolverConfig,
    SolverOutcome, SolverStatus, VarId, VarKind,
};
use crate::monitor::{time_robustness, Side};
use crate::rat;
use crate::semantics::EvalError;
use crate::trajectory::{Trajectory, TrajectoryError};
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Formula(#[from] crate::formula::FormulaError),
    #[error("no trajectory satisfies the problem (solver reports infeasible)")]
    Infeasible,
    #[error("solver hit the time limit without an incumbent")]
    Timeout,
    #[error("model is unbounded; robustness variables should make this impossible")]
    Unbounded,
    #[error(
        "certificate mismatch: solver reports theta = {milp}, monitor computes {monitor} \
         (encoder bug or a trajectory inside the indicator tolerance band)"
    )]
    CertificateMismatch {
        milp: i64,
        monitor: i64,
        result: Box<SynthesisResult>,
    },
    #[error("solution is missing a value for `{0}`")]
    MissingValue(String),
}

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("input sequence step {t} has dimension {got}, expected {expected}")]
    InputDimension { t: usize, expected: usize, got: usize },
    #[error("input at step {t}, dimension {dim} is outside the input box")]
    InputOutOfBounds { t: usize, dim: usize },
    #[error("state leaves the state box at step {t}, dimension {dim} (value {value})")]
    StateLeftBox { t: usize, dim: usize, value: f64 },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// `x_{t+1} = A x_t + B u_t` with box-bounded states and inputs and a fixed
/// initial state inside the state box.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    a: Vec<Vec<BigRational>>,
    b: Vec<Vec<BigRational>>,
    state_box: Vec<(BigRational, BigRational)>,
    input_box: Vec<(BigRational, BigRational)>,
    x0: Vec<BigRational>,
}

impl LtiSystem {
    pub fn new(
        a: Vec<Vec<BigRational>>,
        b: Vec<Vec<BigRational>>,
        state_box: Vec<(BigRational, BigRational)>,
        input_box: Vec<(BigRational, BigRational)>,
        x0: Vec<BigRational>,
    ) -> Result<Self, SynthesisError> {
        let n = a.len();
        if n == 0 || a.iter().any(|row| row.len() != n) {
            return Err(SynthesisError::Invalid("A must be square and nonempty".into()));
        }
        if b.len() != n {
            return Err(SynthesisError::Invalid(format!(
                "B has {} rows, expected {n}",
                b.len()
            )));
        }
        let m = b[0].len();
        if m == 0 || b.iter().any(|row| row.len() != m) {
            return Err(SynthesisError::Invalid("B must have uniform nonzero width".into()));
        }
        if state_box.len() != n || input_box.len() != m || x0.len() != n {
            return Err(SynthesisError::Invalid(
                "state box, input box and x0 must match the matrix dimensions".into(),
            ));
        }
        for (i, (lb, ub)) in state_box.iter().chain(input_box.iter()).enumerate() {
            if lb > ub {
                return Err(SynthesisError::Invalid(format!(
                    "box dimension {i} has lower > upper"
                )));
            }
        }
        for (i, v) in x0.iter().enumerate() {
            let (lb, ub) = &state_box[i];
            if v < lb || v > ub {
                return Err(SynthesisError::Invalid(format!(
                    "x0 dimension {i} is outside the state box"
                )));
            }
        }
        Ok(LtiSystem { a, b, state_box, input_box, x0 })
    }

    pub fn state_dim(&self) -> usize {
        self.a.len()
    }

    pub fn input_dim(&self) -> usize {
        self.b[0].len()
    }

    pub fn state_box(&self) -> &[(BigRational, BigRational)] {
        &self.state_box
    }

    pub fn input_box(&self) -> &[(BigRational, BigRational)] {
        &self.input_box
    }

    pub fn x0(&self) -> &[BigRational] {
        &self.x0
    }

    pub fn a(&self) -> &[Vec<BigRational>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<BigRational>] {
        &self.b
    }

    /// Exact forward simulation of the dynamics in f64, with box membership
    /// checked to a 1e-6 tolerance so solver-boundary values pass while
    /// genuine escapes report the first violating step.
    pub fn simulate(&self, inputs: &[Vec<f64>]) -> Result<Trajectory, SimulateError> {
        const TOL: f64 = 1e-6;
        let n = self.state_dim();
        let m = self.input_dim();
        let a: Vec<Vec<f64>> = self.a.iter().map(|r| r.iter().map(rat::to_f64).collect()).collect();
        let b: Vec<Vec<f64>> = self.b.iter().map(|r| r.iter().map(rat::to_f64).collect()).collect();
        let mut states = Vec::with_capacity(inputs.len() + 1);
        states.push(self.x0.iter().map(rat::to_f64).collect::<Vec<f64>>());
        for (t, u) in inputs.iter().enumerate() {
            if u.len() != m {
                return Err(SimulateError::InputDimension { t, expected: m, got: u.len() });
            }
            for (dim, v) in u.iter().enumerate() {
                let (lb, ub) = &self.input_box[dim];
                if *v < rat::to_f64(lb) - TOL || *v > rat::to_f64(ub) + TOL {
                    return Err(SimulateError::InputOutOfBounds { t, dim });
                }
            }
            let x = states.last().unwrap();
            let mut next = vec![0.0; n];
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += a[i][j] * x[j];
                }
                for j in 0..m {
                    acc += b[i][j] * u[j];
                }
                next[i] = acc;
            }
            for (dim, v) in next.iter().enumerate() {
                let (lb, ub) = &self.state_box[dim];
                if *v < rat::to_f64(lb) - TOL || *v > rat::to_f64(ub) + TOL {
                    return Err(SimulateError::StateLeftBox { t: t + 1, dim, value: *v });
                }
            }
            states.push(next);
        }
        Ok(Trajectory::new(states)?)
    }
}

/// Symbolic trajectory created by [`build_dynamics`].
#[derive(Debug, Clone)]
pub struct SymbolicTrajectory {
    pub states: Vec<Vec<VarId>>,
    pub inputs: Vec<Vec<VarId>>,
}

/// Declares state variables for `t in [0, H]` (bounded by the state box,
/// `x_0` pinned to the initial state) and input variables for
/// `t in [0, H-1]`, tied together by the dynamics equalities.
pub fn build_dynamics(
    model: &mut MilpModel,
    system: &LtiSystem,
    horizon: usize,
) -> Result<SymbolicTrajectory, MilpError> {
    let n = system.state_dim();
    let m = system.input_dim();
    let mut states = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let (lb, ub) = if t == 0 {
                (system.x0[i].clone(), system.x0[i].clone())
            } else {
                system.state_box[i].clone()
            };
            row.push(model.add_continuous(format!("x{t}_{i}"), Some(lb), Some(ub))?);
        }
        states.push(row);
    }
    let mut inputs = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let (lb, ub) = system.input_box[j].clone();
            row.push(model.add_continuous(format!("u{t}_{j}"), Some(lb), Some(ub))?);
        }
        inputs.push(row);
    }
    for t in 0..horizon {
        for i in 0..n {
            let mut expr = LinExpr::var(states[t + 1][i]);
            for j in 0..n {
                if !system.a[i][j].is_zero() {
                    expr = expr.add_term(-system.a[i][j].clone(), states[t][j]);
                }
            }
            for j in 0..m {
                if !system.b[i][j].is_zero() {
                    expr = expr.add_term(-system.b[i][j].clone(), inputs[t][j]);
                }
            }
            model.add_constraint(format!("dyn{t}_{i}"), &expr, Sense::Eq)?;
        }
    }
    Ok(SymbolicTrajectory { states, inputs })
}

/// Objective variant of a synthesis problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Maximize the robustness subject to `theta >= theta_star > 0`.
    Maximize { theta_star: i64 },
    /// Pin the robustness to exactly `theta_target`; constant objective.
    Feasibility { theta_target: i64 },
}

#[derive(Debug, Clone)]
pub struct SynthesisProblem {
    pub system: LtiSystem,
    pub formula: Formula,
    pub horizon: usize,
    pub side: Side,
    pub mode: Mode,
    /// Predicates enforced as plain linear constraints at every step.
    pub hard_constraints: Vec<LinearPredicate>,
    pub eps: BigRational,
    pub solver: SolverConfig,
    /// Write the LP file here before solving.
    pub emit_lp: Option<PathBuf>,
    /// Write the encoder variable map here (per-node csv).
    pub emit_varmap: Option<PathBuf>,
}

impl SynthesisProblem {
    pub fn new(
        system: LtiSystem,
        formula: Formula,
        horizon: usize,
        mode: Mode,
        solver: SolverConfig,
    ) -> Self {
        SynthesisProblem {
            system,
            formula,
            horizon,
            side: Side::Right,
            mode,
            hard_constraints: Vec::new(),
            eps: rat::parse_decimal("0.0001").unwrap(),
            solver,
            emit_lp: None,
            emit_varmap: None,
        }
    }
}

/// Model size and timing columns for run reports.
#[derive(Debug, Clone, Default)]
pub struct BuildStats {
    pub constraints: usize,
    pub binaries: usize,
    pub integers: usize,
    pub continuous: usize,
    pub build_seconds: f64,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub status: SolverStatus,
    pub inputs: Vec<Vec<f64>>,
    pub trajectory: Trajectory,
    /// Robustness value claimed by the MILP.
    pub theta_milp: i64,
    /// Robustness recomputed by the exact monitor on the re-simulated
    /// trajectory; the reportable value.
    pub theta_monitor: i64,
    pub certificate_ok: bool,
    /// Largest per-coordinate gap between the solver's state assignment and
    /// the re-simulated trajectory.
    pub resim_deviation: f64,
    pub stats: BuildStats,
}

/// Fully assembled but unsolved synthesis model; lets callers inspect or
/// export the program.
pub struct BuiltModel {
    pub model: MilpModel,
    pub dynamics: SymbolicTrajectory,
    pub encoding: EncodedFormula,
}

pub fn build_model(problem: &SynthesisProblem) -> Result<BuiltModel, SynthesisError> {
    validate(problem)?;
    let mut model = MilpModel::new();
    let dynamics = build_dynamics(&mut model, &problem.system, problem.horizon)?;
    let config = EncoderConfig {
        eps: problem.eps.clone(),
        horizon: problem.horizon,
        side: problem.side,
        state_box: problem.system.state_box.clone(),
    };
    let encoding = encode_formula(&mut model, &problem.formula, &dynamics.states, &config)?;
    for (k, hc) in problem.hard_constraints.iter().enumerate() {
        for (t, state) in dynamics.states.iter().enumerate() {
            let mut expr = LinExpr::constant(hc.offset().clone());
            for (i, c) in hc.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    expr = expr.add_term(c.clone(), state[i]);
                }
            }
            model.add_constraint(format!("hard{k}_{t}"), &expr, Sense::Ge)?;
        }
    }
    let root = encoding.root_theta;
    match problem.mode {
        Mode::Maximize { theta_star } => {
            let bound = LinExpr::var(root)
                .add_constant(BigRational::from_integer((-theta_star).into()));
            model.add_constraint("theta_lb", &bound, Sense::Ge)?;
            model.set_objective(Objective::Maximize(LinExpr::var(root)));
        }
        Mode::Feasibility { theta_target } => {
            let pin = LinExpr::var(root)
                .add_constant(BigRational::from_integer((-theta_target).into()));
            model.add_constraint("theta_pin", &pin, Sense::Eq)?;
            model.set_objective(Objective::Feasibility);
        }
    }
    Ok(BuiltModel { model, dynamics, encoding })
}

fn validate(problem: &SynthesisProblem) -> Result<(), SynthesisError> {
    let needed = problem.formula.horizon();
    if problem.horizon < needed {
        return Err(SynthesisError::Invalid(format!(
            "horizon {} is below the formula horizon {needed}",
            problem.horizon
        )));
    }
    if let Mode::Maximize { theta_star } = problem.mode {
        if theta_star <= 0 {
            return Err(SynthesisError::Invalid(format!(
                "maximize mode needs theta_star > 0, got {theta_star}"
            )));
        }
    }
    let n = problem.system.state_dim();
    if let Some(d) = problem.formula.state_dim()? {
        if d != n {
            return Err(SynthesisError::Invalid(format!(
                "formula predicates have dimension {d}, system has {n}"
            )));
        }
    }
    for hc in &problem.hard_constraints {
        if hc.dim() != n {
            return Err(SynthesisError::Invalid(format!(
                "hard constraint has dimension {}, system has {n}",
                hc.dim()
            )));
        }
    }
    if !problem.eps.is_positive() {
        return Err(SynthesisError::Invalid("eps must be positive".into()));
    }
    Ok(())
}

/// Solves the synthesis problem end to end.
pub fn synthesize(problem: &SynthesisProblem) -> Result<SynthesisResult, SynthesisError> {
    let build_start = Instant::now();
    let built = build_model(problem)?;
    let BuiltModel { mut model, dynamics, encoding } = built;
    let build_seconds = build_start.elapsed().as_secs_f64();
    if let Some(path) = &problem.emit_lp {
        std::fs::write(path, crate::milp::write_lp(&model)?)
            .map_err(|e| SynthesisError::Invalid(format!("cannot write LP file: {e}")))?;
    }
    if let Some(path) = &problem.emit_varmap {
        let mut buf = Vec::new();
        encoding
            .dump_vars(&model, &mut buf)
            .and_then(|_| std::fs::write(path, buf))
            .map_err(|e| SynthesisError::Invalid(format!("cannot write varmap: {e}")))?;
    }
    let mut stats = BuildStats {
        constraints: model.num_constraints(),
        binaries: model.count_kind(VarKind::Binary),
        integers: model.count_kind(VarKind::Integer),
        continuous: model.count_kind(VarKind::Continuous),
        build_seconds,
        solve_seconds: 0.0,
    };
    let solve_start = Instant::now();
    let outcome = solve(&model, &problem.solver)?;
    let status = outcome.status;
    match status {
        SolverStatus::Infeasible => return Err(SynthesisError::Infeasible),
        SolverStatus::Unbounded => return Err(SynthesisError::Unbounded),
        SolverStatus::Error => {
            return Err(SynthesisError::Solve(SolveError::BadSolution(
                "solver reported an error status".into(),
            )))
        }
        SolverStatus::Timeout if outcome.assignment.is_empty() => {
            return Err(SynthesisError::Timeout)
        }
        _ => {}
    }
    let theta_milp = outcome
        .value_i64(encoding.root_theta)
        .ok_or_else(|| SynthesisError::MissingValue("root robustness variable".into()))?;
    let polished = polish(&mut model, &encoding, &outcome, problem).unwrap_or(outcome);
    stats.solve_seconds = solve_start.elapsed().as_secs_f64();

    let mut inputs = Vec::with_capacity(problem.horizon);
    for row in &dynamics.inputs {
        let mut u = Vec::with_capacity(row.len());
        for v in row {
            u.push(
                polished
                    .value_f64(*v)
                    .ok_or_else(|| SynthesisError::MissingValue(model.var(*v).name.clone()))?,
            );
        }
        inputs.push(u);
    }
    let trajectory = problem.system.simulate(&inputs)?;
    let mut resim_deviation = 0.0f64;
    for (t, row) in dynamics.states.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            if let Some(x) = polished.value_f64(*v) {
                resim_deviation = resim_deviation.max((x - trajectory.state(t)[i]).abs());
            }
        }
    }
    let theta_monitor = time_robustness(&problem.formula, &trajectory, 0, problem.side)?;
    let certificate_ok = theta_monitor == theta_milp
        && match problem.mode {
            Mode::Maximize { theta_star } => theta_monitor >= theta_star,
            Mode::Feasibility { .. } => true,
        };
    let result = SynthesisResult {
        status,
        inputs,
        trajectory,
        theta_milp,
        theta_monitor,
        certificate_ok,
        resim_deviation,
        stats,
    };
    if !certificate_ok {
        return Err(SynthesisError::CertificateMismatch {
            milp: theta_milp,
            monitor: theta_monitor,
            result: Box::new(result),
        });
    }
    Ok(result)
}

/// Programmatic entry point: specification, horizon and robustness bound in,
/// optimal input sequence out.
pub fn synthesize_inputs(
    formula: Formula,
    system: LtiSystem,
    horizon: usize,
    theta_star: i64,
    solver: SolverConfig,
) -> Result<Vec<Vec<f64>>, SynthesisError> {
    let problem = SynthesisProblem::new(system, formula, horizon, Mode::Maximize { theta_star }, solver);
    synthesize(&problem).map(|r| r.inputs)
}

/// Cap on the indicator slack pushed by the polish pass; far above solver
/// noise, far below scenario geometry.
const SLACK_CAP: &str = "0.001";

/// Re-solves the continuous part with all integers pinned, maximizing total
/// slack of the active indicator constraints. Feasible by construction (the
/// incumbent with zero slack is a witness); any failure falls back to the
/// original assignment.
fn polish(
    model: &mut MilpModel,
    encoding: &EncodedFormula,
    outcome: &SolverOutcome,
    problem: &SynthesisProblem,
) -> Result<SolverOutcome, SynthesisError> {
    let cap = rat::parse_decimal(SLACK_CAP).unwrap();
    let one = BigRational::one();
    for idx in 0..model.num_vars() {
        let id = VarId(idx);
        if model.var(id).kind == VarKind::Continuous {
            continue;
        }
        let value = outcome
            .value_i64(id)
            .ok_or_else(|| SynthesisError::MissingValue(model.var(id).name.clone()))?;
        let v = BigRational::from_integer(value.into());
        model.set_bounds(id, Some(v.clone()), Some(v))?;
    }
    let mut total = LinExpr::default();
    for (k, rec) in encoding.indicators.iter().enumerate() {
        let z_val = outcome
            .value_i64(rec.z)
            .ok_or_else(|| SynthesisError::MissingValue(model.var(rec.z).name.clone()))?;
        let s = model.add_continuous(
            format!("sl{k}"),
            Some(BigRational::zero()),
            Some(cap.clone()),
        )?;
        total = total.add_term(one.clone(), s);
        if z_val == 1 {
            // mu - s >= 0
            let expr = rec.mu.clone().add_term(-one.clone(), s);
            model.add_constraint(format!("pol{k}"), &expr, Sense::Ge)?;
        } else {
            // mu + s <= -eps
            let expr = rec
                .mu
                .clone()
                .add_term(one.clone(), s)
                .add_constant(problem.eps.clone());
            model.add_constraint(format!("pol{k}"), &expr, Sense::Le)?;
        }
    }
    model.set_objective(Objective::Maximize(total));
    let polished = solve(model, &problem.solver)?;
    match polished.status {
        SolverStatus::Optimal | SolverStatus::Feasible => Ok(polished),
        _ => Err(SynthesisError::Invalid("polish pass failed".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::rat::parse_decimal;

    fn r(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    fn boxes(pairs: &[(&str, &str)]) -> Vec<(BigRational, BigRational)> {
        pairs.iter().map(|(l, u)| (r(l), r(u))).collect()
    }

    /// Scalar integrator `x_{t+1} = u_t`.
    fn relay_system() -> LtiSystem {
        LtiSystem::new(
            vec![vec![r("0")]],
            vec![vec![r("1")]],
            boxes(&[("-1", "1")]),
            boxes(&[("-1", "1")]),
            vec![r("0.3")],
        )
        .unwrap()
    }

    fn uav_system() -> LtiSystem {
        LtiSystem::new(
            vec![vec![r("1"), r("1")], vec![r("0"), r("1")]],
            vec![vec![r("0.5")], vec![r("1")]],
            boxes(&[("-100", "100"), ("-10", "10")]),
            boxes(&[("-0.2", "0.2")]),
            vec![r("0"), r("0")],
        )
        .unwrap()
    }

    #[test]
    fn system_validation() {
        assert!(LtiSystem::new(
            vec![vec![r("1"), r("0")]],
            vec![vec![r("1")]],
            boxes(&[("-1", "1")]),
            boxes(&[("-1", "1")]),
            vec![r("0")],
        )
        .is_err());
        assert!(LtiSystem::new(
            vec![vec![r("1")]],
            vec![vec![r("1")]],
            boxes(&[("-1", "1")]),
            boxes(&[("-1", "1")]),
            vec![r("2")], // outside the box
        )
        .is_err());
    }

    #[test]
    fn dynamics_variable_and_constraint_counts() {
        let mut model = MilpModel::new();
        let sym = build_dynamics(&mut model, &relay_system(), 2).unwrap();
        assert_eq!(sym.states.len(), 3);
        assert_eq!(sym.inputs.len(), 2);
        assert_eq!(model.num_constraints(), 2);
    }

    #[test]
    fn identity_system_is_pinned_to_x0() {
        let system = LtiSystem::new(
            vec![vec![r("1")]],
            vec![vec![r("0")]],
            boxes(&[("-1", "1")]),
            boxes(&[("-1", "1")]),
            vec![r("0.25")],
        )
        .unwrap();
        let traj = system.simulate(&[vec![0.7], vec![-0.7]]).unwrap();
        for t in 0..=2 {
            assert_eq!(traj.state(t), &[0.25]);
        }
    }

    #[test]
    fn relay_simulation() {
        let traj = relay_system().simulate(&[vec![0.3], vec![0.7]]).unwrap();
        assert_eq!(traj.states(), &[vec![0.3], vec![0.3], vec![0.7]]);
    }

    #[test]
    fn uav_hand_iterated() {
        let traj = uav_system()
            .simulate(&[vec![0.2], vec![0.2], vec![0.2]])
            .unwrap();
        let x3 = traj.state(3);
        assert!((x3[0] - 0.9).abs() < 1e-12 && (x3[1] - 0.6).abs() < 1e-12, "{x3:?}");
    }

    #[test]
    fn simulate_reports_first_escape() {
        let system = LtiSystem::new(
            vec![vec![r("1")]],
            vec![vec![r("1")]],
            boxes(&[("-1", "1")]),
            boxes(&[("-1", "1")]),
            vec![r("0.9")],
        )
        .unwrap();
        let err = system.simulate(&[vec![0.5], vec![0.5]]).unwrap_err();
        assert!(matches!(err, SimulateError::StateLeftBox { t: 1, dim: 0, .. }));
    }

    #[test]
    fn problem_validation() {
        let solver = SolverConfig {
            command: vec!["true".into()],
            dialect: crate::milp::SolutionDialect::Plain,
            time_limit: None,
            mip_gap: 0.0,
            keep_solution: None,
        };
        let phi = parse_formula("G[0,5] (x >= 0)", &["x"]).unwrap();
        let mut problem = SynthesisProblem::new(
            relay_system(),
            phi,
            3, // below the formula horizon
            Mode::Maximize { theta_star: 1 },
            solver.clone(),
        );
        assert!(matches!(synthesize(&problem), Err(SynthesisError::Invalid(_))));
        problem.horizon = 8;
        problem.mode = Mode::Maximize { theta_star: 0 };
        assert!(matches!(synthesize(&problem), Err(SynthesisError::Invalid(_))));
    }
}
