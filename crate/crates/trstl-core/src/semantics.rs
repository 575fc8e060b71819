//! Boolean (characteristic-function) semantics and the shared operator
//! recursion.
//!
//! The characteristic function and both time-robustness sides obey the same
//! inductive rules: negation flips the sign, conjunction takes the pointwise
//! minimum, disjunction the maximum, and
//!
//! ```text
//! v(phi1 U[a,b] phi2)(t) = max over t' in [t+a, t+b] of
//!                          min( v(phi2)(t'), min over t'' in [t, t') of v(phi1)(t'') )
//! ```
//!
//! where the inner minimum over the empty range `[t, t)` is the identity of
//! min. Only the predicate leaves differ: the sign of `mu(x_t)` for the
//! characteristic function, run lengths for the time robustness. The shared
//! recursion lives here and is driven by a leaf evaluator; `Eventually` and
//! `Always` are realized directly as window max/min, which coincides with
//! their until-based definitions.

use crate::formula::{Formula, FormulaError, LinearPredicate};
use crate::trajectory::Trajectory;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("time {t} with formula horizon {needed} exceeds trajectory horizon {have}")]
    HorizonViolation { t: usize, needed: usize, have: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Evaluates the operator recursion bottom-up over the whole valid time
/// domain. `leaf(p)` must return a profile of length `H + 1`; the result for
/// a node with horizon `len` covers `t in [0, H - len]`.
pub(crate) fn operator_profile<F>(
    phi: &Formula,
    horizon: usize,
    leaf: &F,
) -> Result<Vec<i64>, EvalError>
where
    F: Fn(&LinearPredicate) -> Result<Vec<i64>, EvalError>,
{
    let profile = match phi {
        Formula::Predicate(p) => leaf(p)?,
        Formula::Not(f) => {
            let mut v = operator_profile(f, horizon, leaf)?;
            for x in v.iter_mut() {
                *x = -*x;
            }
            v
        }
        Formula::And(cs) | Formula::Or(cs) => {
            let conj = matches!(phi, Formula::And(_));
            let len = horizon - phi.horizon() + 1;
            let mut acc = vec![if conj { i64::MAX } else { i64::MIN }; len];
            for c in cs {
                let cv = operator_profile(c, horizon, leaf)?;
                for (a, v) in acc.iter_mut().zip(cv.iter()) {
                    *a = if conj { (*a).min(*v) } else { (*a).max(*v) };
                }
            }
            acc
        }
        Formula::Always(i, f) | Formula::Eventually(i, f) => {
            let conj = matches!(phi, Formula::Always(..));
            let child = operator_profile(f, horizon, leaf)?;
            let len = horizon - phi.horizon() + 1;
            (0..len)
                .map(|t| {
                    let window = &child[t + i.lo()..=t + i.hi()];
                    if conj {
                        *window.iter().min().unwrap()
                    } else {
                        *window.iter().max().unwrap()
                    }
                })
                .collect()
        }
        Formula::Until(l, i, r) => {
            let lhs = operator_profile(l, horizon, leaf)?;
            let rhs = operator_profile(r, horizon, leaf)?;
            let len = horizon - phi.horizon() + 1;
            (0..len)
                .map(|t| {
                    let mut best = i64::MIN;
                    let mut prefix = i64::MAX; // min over [t, t'), empty at t' = t
                    for tp in t..=t + i.hi() {
                        if tp >= t + i.lo() {
                            best = best.max(rhs[tp].min(prefix));
                        }
                        prefix = prefix.min(lhs[tp]);
                    }
                    best
                })
                .collect()
        }
    };
    Ok(profile)
}

fn sign_profile(p: &LinearPredicate, traj: &Trajectory) -> Result<Vec<i64>, EvalError> {
    (0..=traj.horizon())
        .map(|t| p.sign_at(traj.state(t)).map_err(EvalError::from))
        .collect()
}

pub(crate) fn check_horizon(phi: &Formula, traj: &Trajectory, t: usize) -> Result<(), EvalError> {
    let needed = phi.horizon();
    if t + needed > traj.horizon() {
        return Err(EvalError::HorizonViolation { t, needed, have: traj.horizon() });
    }
    Ok(())
}

/// Characteristic function profile over `t in [0, H - len(phi)]`, values in
/// `{-1, +1}`.
pub fn char_profile(phi: &Formula, traj: &Trajectory) -> Result<Vec<i64>, EvalError> {
    check_horizon(phi, traj, 0)?;
    operator_profile(phi, traj.horizon(), &|p| sign_profile(p, traj))
}

/// Boolean satisfaction at `t` encoded as +1 / -1.
pub fn char_function(phi: &Formula, traj: &Trajectory, t: usize) -> Result<i64, EvalError> {
    check_horizon(phi, traj, t)?;
    Ok(char_profile(phi, traj)?[t])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    /// The two-signal trajectory used throughout: sign pattern of the first
    /// component is (+ + - + + + - -), of the second (+ + + + + - - -).
    pub(crate) fn example_trajectory() -> Trajectory {
        let s1 = [1.0, 0.5, -1.0, 1.0, 2.0, 0.5, -0.5, -1.0];
        let s2 = [2.0, 1.5, 1.0, 0.5, 0.25, -0.5, -1.0, -2.0];
        Trajectory::new(s1.iter().zip(s2.iter()).map(|(a, b)| vec![*a, *b]).collect()).unwrap()
    }

    #[test]
    fn disjunction_on_example() {
        let traj = example_trajectory();
        let phi = parse_formula("p >= 0 | q >= 0", &["p", "q"]).unwrap();
        assert_eq!(char_function(&phi, &traj, 3).unwrap(), 1);
        assert_eq!(char_function(&phi, &traj, 6).unwrap(), -1);
    }

    #[test]
    fn contradiction_is_false_everywhere() {
        let traj = example_trajectory();
        let phi = parse_formula("p >= 0 & !(p >= 0)", &["p", "q"]).unwrap();
        for t in 0..=traj.horizon() {
            assert_eq!(char_function(&phi, &traj, t).unwrap(), -1);
        }
    }

    #[test]
    fn horizon_precondition() {
        let traj = example_trajectory();
        let phi = parse_formula("G[0,3] (p >= 0)", &["p", "q"]).unwrap();
        assert!(char_function(&phi, &traj, 4).is_ok());
        assert!(matches!(
            char_function(&phi, &traj, 5),
            Err(EvalError::HorizonViolation { t: 5, needed: 3, have: 7 })
        ));
    }

    #[test]
    fn until_empty_inner_range() {
        // at t' = t the inner min is empty, so F[0,0] phi == phi
        let traj = example_trajectory();
        let phi = parse_formula("(q >= 0) U[0,0] (p >= 0)", &["p", "q"]).unwrap();
        let p = parse_formula("p >= 0", &["p", "q"]).unwrap();
        for t in 0..=traj.horizon() {
            assert_eq!(
                char_function(&phi, &traj, t).unwrap(),
                char_function(&p, &traj, t).unwrap()
            );
        }
    }

    #[test]
    fn values_are_plus_minus_one() {
        let traj = example_trajectory();
        let phi = parse_formula("G[0,2] F[0,2] (p >= 0 & q <= 1)", &["p", "q"]).unwrap();
        for v in char_profile(&phi, &traj).unwrap() {
            assert!(v == 1 || v == -1);
        }
    }
}
