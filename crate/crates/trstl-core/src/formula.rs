//! STL formulas over linear predicates.
//!
//! A predicate is an affine function `mu(x) = coeffs . x + offset` that holds
//! iff `mu(x) >= 0`, with `sign(0) = +1`. Temporal operators carry closed
//! integer step intervals `[lo, hi]`. Conjunction and disjunction are n-ary
//! and flattened at construction; the semantics are associative so this is
//! meaning-preserving.

use crate::rat;
use num::rational::BigRational;
use num::{Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("interval bounds must satisfy lo <= hi, got [{lo}, {hi}]")]
    EmptyInterval { lo: usize, hi: usize },
    #[error("predicate coefficients and offset are all zero")]
    DegeneratePredicate,
    #[error("and/or needs at least one operand")]
    EmptyJunction,
    #[error("predicate expects {expected} state dimensions, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state contains a non-finite value")]
    NonFiniteState,
}

/// Closed time-step interval `[lo, hi]` with `0 <= lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: usize,
    hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Result<Self, FormulaError> {
        if lo > hi {
            return Err(FormulaError::EmptyInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Affine predicate `coeffs . x + offset >= 0` with exact rational data.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearPredicate {
    coeffs: Vec<BigRational>,
    offset: BigRational,
}

impl LinearPredicate {
    /// Rejects the degenerate all-zero predicate.
    pub fn new(coeffs: Vec<BigRational>, offset: BigRational) -> Result<Self, FormulaError> {
        if coeffs.iter().all(Zero::is_zero) && offset.is_zero() {
            return Err(FormulaError::DegeneratePredicate);
        }
        Ok(LinearPredicate { coeffs, offset })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn offset(&self) -> &BigRational {
        &self.offset
    }

    /// Exact value of `mu(x)`; every finite f64 state component is a rational.
    pub fn eval_exact(&self, state: &[f64]) -> Result<BigRational, FormulaError> {
        if state.len() != self.coeffs.len() {
            return Err(FormulaError::DimensionMismatch {
                expected: self.coeffs.len(),
                got: state.len(),
            });
        }
        let mut acc = self.offset.clone();
        for (c, &x) in self.coeffs.iter().zip(state) {
            if c.is_zero() {
                continue;
            }
            let xr = rat::from_f64_exact(x).map_err(|_| FormulaError::NonFiniteState)?;
            acc += c * xr;
        }
        Ok(acc)
    }

    /// Sign of `mu(x)` in `{-1, +1}` with `sign(0) = +1`.
    pub fn sign_at(&self, state: &[f64]) -> Result<i64, FormulaError> {
        let v = self.eval_exact(state)?;
        Ok(if v.is_negative() { -1 } else { 1 })
    }
}

/// STL formula tree. `Eventually` and `Always` are stored explicitly but
/// evaluate identically to their until-based definitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Predicate(LinearPredicate),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Until(Box<Formula>, Interval, Box<Formula>),
    Eventually(Interval, Box<Formula>),
    Always(Interval, Box<Formula>),
}

impl Formula {
    pub fn predicate(p: LinearPredicate) -> Self {
        Formula::Predicate(p)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// N-ary conjunction; nested conjunctions are spliced and a single
    /// operand is returned unchanged.
    pub fn and(children: Vec<Formula>) -> Result<Self, FormulaError> {
        Self::junction(children, true)
    }

    /// N-ary disjunction, same normalization as [`Formula::and`].
    pub fn or(children: Vec<Formula>) -> Result<Self, FormulaError> {
        Self::junction(children, false)
    }

    fn junction(children: Vec<Formula>, conj: bool) -> Result<Self, FormulaError> {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match (conj, c) {
                (true, Formula::And(gs)) => flat.extend(gs),
                (false, Formula::Or(gs)) => flat.extend(gs),
                (_, other) => flat.push(other),
            }
        }
        match flat.len() {
            0 => Err(FormulaError::EmptyJunction),
            1 => Ok(flat.pop().unwrap()),
            _ => Ok(if conj { Formula::And(flat) } else { Formula::Or(flat) }),
        }
    }

    pub fn until(lhs: Formula, interval: Interval, rhs: Formula) -> Self {
        Formula::Until(Box::new(lhs), interval, Box::new(rhs))
    }

    pub fn eventually(interval: Interval, f: Formula) -> Self {
        Formula::Eventually(interval, Box::new(f))
    }

    pub fn always(interval: Interval, f: Formula) -> Self {
        Formula::Always(interval, Box::new(f))
    }

    /// Number of future steps the formula can inspect: 0 for predicates,
    /// `hi + max(len(lhs), len(rhs))` for until, `hi + len(child)` for the
    /// derived temporal operators.
    pub fn horizon(&self) -> usize {
        match self {
            Formula::Predicate(_) => 0,
            Formula::Not(f) => f.horizon(),
            Formula::And(cs) | Formula::Or(cs) => {
                cs.iter().map(Formula::horizon).max().unwrap_or(0)
            }
            Formula::Until(l, i, r) => i.hi() + l.horizon().max(r.horizon()),
            Formula::Eventually(i, f) | Formula::Always(i, f) => i.hi() + f.horizon(),
        }
    }

    /// Pre-order listing of all subformulas; index 0 is the formula itself.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        out.push(self);
        match self {
            Formula::Predicate(_) => {}
            Formula::Not(f) | Formula::Eventually(_, f) | Formula::Always(_, f) => f.collect(out),
            Formula::And(cs) | Formula::Or(cs) => {
                for c in cs {
                    c.collect(out);
                }
            }
            Formula::Until(l, _, r) => {
                l.collect(out);
                r.collect(out);
            }
        }
    }

    /// Distinct predicates in structural order of first occurrence.
    pub fn predicates(&self) -> Vec<&LinearPredicate> {
        let mut out: Vec<&LinearPredicate> = Vec::new();
        for node in self.subformulas() {
            if let Formula::Predicate(p) = node {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Common state dimension of all predicates, if any predicate exists and
    /// all agree.
    pub fn state_dim(&self) -> Result<Option<usize>, FormulaError> {
        let mut dim = None;
        for p in self.predicates() {
            match dim {
                None => dim = Some(p.dim()),
                Some(d) if d == p.dim() => {}
                Some(d) => {
                    return Err(FormulaError::DimensionMismatch { expected: d, got: p.dim() })
                }
            }
        }
        Ok(dim)
    }

    /// Renders the formula in the concrete grammar using the given state
    /// variable names. The output reparses to a structurally equal tree.
    pub fn pretty(&self, vars: &[impl AsRef<str>]) -> String {
        let mut s = String::new();
        self.fmt_prec(&mut s, vars, 0);
        s
    }

    // Precedence levels: Or = 0, And = 1, unary-ish (Not/G/F/Until) = 2,
    // atoms (predicates, parenthesized) = 3.
    fn level(&self) -> u8 {
        match self {
            Formula::Or(_) => 0,
            Formula::And(_) => 1,
            Formula::Predicate(_) => 3,
            _ => 2,
        }
    }

    fn fmt_prec(&self, out: &mut String, vars: &[impl AsRef<str>], min_level: u8) {
        if self.level() < min_level {
            out.push('(');
            self.fmt_prec(out, vars, 0);
            out.push(')');
            return;
        }
        match self {
            Formula::Predicate(p) => fmt_predicate(p, out, vars),
            Formula::Not(f) => {
                out.push('!');
                f.fmt_prec(out, vars, 2);
            }
            Formula::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" & ");
                    }
                    c.fmt_prec(out, vars, 2);
                }
            }
            Formula::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    c.fmt_prec(out, vars, 1);
                }
            }
            Formula::Until(l, i, r) => {
                l.fmt_prec(out, vars, 3);
                out.push_str(&format!(" U{i} "));
                r.fmt_prec(out, vars, 2);
            }
            Formula::Eventually(i, f) => {
                out.push_str(&format!("F{i} "));
                f.fmt_prec(out, vars, 2);
            }
            Formula::Always(i, f) => {
                out.push_str(&format!("G{i} "));
                f.fmt_prec(out, vars, 2);
            }
        }
    }
}

fn fmt_predicate(p: &LinearPredicate, out: &mut String, vars: &[impl AsRef<str>]) {
    let mut first = true;
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let fallback;
        let name: &str = if i < vars.len() {
            vars[i].as_ref()
        } else {
            fallback = format!("x{i}");
            &fallback
        };
        let mag = c.abs();
        if first {
            if c.is_negative() {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if mag != num::One::one() {
            out.push_str(&rat_text(&mag));
            out.push('*');
        }
        out.push_str(name);
    }
    let off = p.offset();
    if first {
        out.push_str(&rat_text(off));
    } else if !off.is_zero() {
        out.push_str(if off.is_negative() { " - " } else { " + " });
        out.push_str(&rat_text(&off.abs()));
    }
    out.push_str(" >= 0");
}

fn rat_text(r: &BigRational) -> String {
    rat::to_decimal_string(r).unwrap_or_else(|_| r.to_string())
}

impl fmt::Display for Formula {
    /// Positional rendering with `x0, x1, ...` as variable names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dim = self.state_dim().ok().flatten().unwrap_or(0);
        let names: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        f.write_str(&self.pretty(&names))
    }
}
