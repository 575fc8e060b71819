//! Solver-agnostic mixed-integer linear model builder.
//!
//! A [`MilpModel`] owns variables, linear constraints and a linear objective
//! with exact rational data, writes itself to the LP file format, and is
//! solved through an external solver subprocess (see [`solver`]). The
//! big-M constraint constructors live in [`gadgets`].

mod gadgets;
mod lp;
pub mod solver;

pub use gadgets::{add_bool_affine_product, add_bool_int_product, add_indicator, add_max, add_min};
pub use lp::write_lp;
pub use solver::{solve, SolutionDialect, SolveError, SolverConfig, SolverOutcome, SolverStatus};

use crate::rat;
use num::rational::BigRational;
use num::{Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("variable name `{0}` is not LP-safe")]
    BadName(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("variable bounds lower > upper for `{0}`")]
    EmptyBounds(String),
    #[error("unknown variable id {0:?}")]
    UnknownVar(VarId),
    #[error("constraint `{0}` has no variables")]
    ConstantConstraint(String),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveEps(String),
    #[error("big-M bounds require M >= m, got M={m_upper}, m={m_lower}")]
    InvertedBigM { m_upper: String, m_lower: String },
    #[error("product bounds require x_l <= x_u")]
    InvertedProductBounds,
    #[error("min/max over an empty list")]
    EmptyMinMax,
    #[error("value {0} cannot be written as a finite decimal")]
    NotDecimal(String),
}

/// Handle to a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    /// Position in the model's declaration order; indexes the value slice
    /// accepted by [`MilpModel::check_assignment`].
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Debug, Clone)]
pub struct VarDef {
    pub name: String,
    pub kind: VarKind,
    /// `None` is unbounded below.
    pub lower: Option<BigRational>,
    /// `None` is unbounded above.
    pub upper: Option<BigRational>,
}

/// Linear expression `sum(coeff * var) + constant`.
#[derive(Debug, Clone, Default)]
pub struct LinExpr {
    pub terms: Vec<(BigRational, VarId)>,
    pub constant: BigRational,
}

impl LinExpr {
    pub fn var(v: VarId) -> Self {
        LinExpr { terms: vec![(BigRational::from_integer(1.into()), v)], constant: BigRational::zero() }
    }

    pub fn constant(c: BigRational) -> Self {
        LinExpr { terms: vec![], constant: c }
    }

    pub fn add_term(mut self, coeff: BigRational, v: VarId) -> Self {
        self.terms.push((coeff, v));
        self
    }

    pub fn add_constant(mut self, c: BigRational) -> Self {
        self.constant += c;
        self
    }

    pub fn scaled(mut self, k: &BigRational) -> Self {
        for (c, _) in self.terms.iter_mut() {
            *c *= k;
        }
        self.constant *= k;
        self
    }

    pub fn plus(mut self, other: &LinExpr) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self.constant += &other.constant;
        self
    }

    /// Merges duplicate variables and drops zero coefficients.
    fn coalesced(&self) -> Vec<(BigRational, VarId)> {
        let mut by_var: HashMap<VarId, BigRational> = HashMap::new();
        let mut order: Vec<VarId> = Vec::new();
        for (c, v) in &self.terms {
            if !by_var.contains_key(v) {
                order.push(*v);
            }
            *by_var.entry(*v).or_insert_with(BigRational::zero) += c;
        }
        order
            .into_iter()
            .filter_map(|v| {
                let c = by_var.remove(&v).unwrap();
                (!c.is_zero()).then_some((c, v))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Le => write!(f, "<="),
            Sense::Ge => write!(f, ">="),
            Sense::Eq => write!(f, "="),
        }
    }
}

/// `terms (sense) rhs` with coalesced, nonduplicated terms.
#[derive(Debug, Clone)]
pub struct LinConstraint {
    pub name: String,
    pub terms: Vec<(BigRational, VarId)>,
    pub sense: Sense,
    pub rhs: BigRational,
}

#[derive(Debug, Clone)]
pub enum Objective {
    Maximize(LinExpr),
    Minimize(LinExpr),
    Feasibility,
}

/// Mutable model builder; declaration order is preserved everywhere, so the
/// LP rendering of a given build sequence is byte-stable.
#[derive(Debug, Clone)]
pub struct MilpModel {
    vars: Vec<VarDef>,
    names: HashMap<String, VarId>,
    constraints: Vec<LinConstraint>,
    objective: Objective,
    next_constraint: usize,
}

impl Default for MilpModel {
    fn default() -> Self {
        Self::new()
    }
}

impl MilpModel {
    pub fn new() -> Self {
        MilpModel {
            vars: Vec::new(),
            names: HashMap::new(),
            constraints: Vec::new(),
            objective: Objective::Feasibility,
            next_constraint: 0,
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: Option<BigRational>,
        upper: Option<BigRational>,
    ) -> Result<VarId, MilpError> {
        let name = name.into();
        if !lp_safe(&name) {
            return Err(MilpError::BadName(name));
        }
        if self.names.contains_key(&name) {
            return Err(MilpError::DuplicateName(name));
        }
        let (lower, upper) = match kind {
            VarKind::Binary => (
                Some(BigRational::zero()),
                Some(BigRational::from_integer(1.into())),
            ),
            _ => (lower, upper),
        };
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l > u {
                return Err(MilpError::EmptyBounds(name));
            }
        }
        let id = VarId(self.vars.len());
        self.names.insert(name.clone(), id);
        self.vars.push(VarDef { name, kind, lower, upper });
        Ok(id)
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: Option<BigRational>,
        upper: Option<BigRational>,
    ) -> Result<VarId, MilpError> {
        self.add_var(name, VarKind::Continuous, lower, upper)
    }

    pub fn add_integer(
        &mut self,
        name: impl Into<String>,
        lower: BigRational,
        upper: BigRational,
    ) -> Result<VarId, MilpError> {
        self.add_var(name, VarKind::Integer, Some(lower), Some(upper))
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, MilpError> {
        self.add_var(name, VarKind::Binary, None, None)
    }

    /// Overwrites both bounds; used to pin variables to known values.
    pub fn set_bounds(
        &mut self,
        v: VarId,
        lower: Option<BigRational>,
        upper: Option<BigRational>,
    ) -> Result<(), MilpError> {
        let def = self.vars.get_mut(v.0).ok_or(MilpError::UnknownVar(v))?;
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l > u {
                return Err(MilpError::EmptyBounds(def.name.clone()));
            }
        }
        def.lower = lower;
        def.upper = upper;
        Ok(())
    }

    /// Adds `expr (sense) 0` after moving the constant to the right side.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: &LinExpr,
        sense: Sense,
    ) -> Result<(), MilpError> {
        let name = name.into();
        let terms = expr.coalesced();
        for (_, v) in &terms {
            if v.0 >= self.vars.len() {
                return Err(MilpError::UnknownVar(*v));
            }
        }
        if terms.is_empty() {
            return Err(MilpError::ConstantConstraint(name));
        }
        let rhs = -expr.constant.clone();
        self.constraints.push(LinConstraint { name, terms, sense, rhs });
        Ok(())
    }

    /// Adds a constraint with an auto-generated name.
    pub fn constrain(&mut self, expr: &LinExpr, sense: Sense) -> Result<(), MilpError> {
        let name = format!("c{}", self.next_constraint);
        self.next_constraint += 1;
        self.add_constraint(name, expr, sense)
    }

    pub fn set_objective(&mut self, objective: Objective) {
        self.objective = objective;
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    pub fn var(&self, v: VarId) -> &VarDef {
        &self.vars[v.0]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    pub fn constraints(&self) -> &[LinConstraint] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn count_kind(&self, kind: VarKind) -> usize {
        self.vars.iter().filter(|v| v.kind == kind).count()
    }

    /// Checks bounds, integrality and every constraint against a full
    /// assignment (indexed by declaration order). Exact arithmetic; used by
    /// the gadget enumeration tests and for diagnostics.
    pub fn check_assignment(&self, values: &[BigRational]) -> bool {
        if values.len() != self.vars.len() {
            return false;
        }
        for (def, v) in self.vars.iter().zip(values) {
            if let Some(l) = &def.lower {
                if v < l {
                    return false;
                }
            }
            if let Some(u) = &def.upper {
                if v > u {
                    return false;
                }
            }
            if matches!(def.kind, VarKind::Integer | VarKind::Binary) && !rat::is_integer(v) {
                return false;
            }
        }
        for c in &self.constraints {
            let lhs: BigRational = c
                .terms
                .iter()
                .map(|(k, v)| k * &values[v.0])
                .sum();
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs,
                Sense::Ge => lhs >= c.rhs,
                Sense::Eq => lhs == c.rhs,
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

fn lp_safe(name: &str) -> bool {
    let mut bytes = name.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

pub(crate) fn decimal(r: &BigRational) -> Result<String, MilpError> {
    rat::to_decimal_string(r).map_err(|_| MilpError::NotDecimal(r.to_string()))
}

pub(crate) fn sign_prefixed(r: &BigRational) -> Result<String, MilpError> {
    let mag = decimal(&r.abs())?;
    Ok(if r.is_negative() {
        format!("- {mag}")
    } else {
        format!("+ {mag}")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::parse_decimal;

    fn r(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn name_rules() {
        let mut m = MilpModel::new();
        assert!(m.add_continuous("x_0", None, None).is_ok());
        assert!(matches!(m.add_continuous("x_0", None, None), Err(MilpError::DuplicateName(_))));
        assert!(matches!(m.add_continuous("0x", None, None), Err(MilpError::BadName(_))));
        assert!(matches!(m.add_continuous("a-b", None, None), Err(MilpError::BadName(_))));
    }

    #[test]
    fn binary_bounds_forced() {
        let mut m = MilpModel::new();
        let b = m.add_binary("b").unwrap();
        assert_eq!(m.var(b).lower, Some(r("0")));
        assert_eq!(m.var(b).upper, Some(r("1")));
    }

    #[test]
    fn constraint_normalization() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", None, None).unwrap();
        // x + x + 2 <= 0   becomes   2 x <= -2
        let e = LinExpr::var(x).add_term(r("1"), x).add_constant(r("2"));
        m.add_constraint("c", &e, Sense::Le).unwrap();
        let c = &m.constraints()[0];
        assert_eq!(c.terms, vec![(r("2"), x)]);
        assert_eq!(c.rhs, r("-2"));
    }

    #[test]
    fn constant_constraints_rejected() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", None, None).unwrap();
        let e = LinExpr::var(x).add_term(r("-1"), x).add_constant(r("1"));
        assert!(matches!(
            m.add_constraint("c", &e, Sense::Le),
            Err(MilpError::ConstantConstraint(_))
        ));
    }

    #[test]
    fn assignment_checking() {
        let mut m = MilpModel::new();
        let x = m.add_integer("x", r("-2"), r("5")).unwrap();
        let y = m.add_continuous("y", Some(r("0")), None).unwrap();
        let e = LinExpr::var(x).add_term(r("2"), y).add_constant(r("-4"));
        m.add_constraint("c", &e, Sense::Le).unwrap(); // x + 2y <= 4
        assert!(m.check_assignment(&[r("2"), r("1")]));
        assert!(!m.check_assignment(&[r("2"), r("1.5")])); // violates c
        assert!(!m.check_assignment(&[r("1.5"), r("1")])); // x not integral
        assert!(!m.check_assignment(&[r("6"), r("0")])); // x above bound
    }
}
