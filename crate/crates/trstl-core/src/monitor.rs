//! Exact right/left time robustness over finite trajectories.
//!
//! For a predicate `p`, the right time robustness at `t` is
//! `sign * tau_max` where `tau_max` is the largest `tau` in `[0, H - t]`
//! such that the sign of `mu(x_t')` is constant over `[t, t + tau]`; the
//! left side mirrors this over `[t - tau, t]` with `tau in [0, t]`. The
//! maximization domain is clipped at the trajectory ends, so a finite signal
//! never certifies more shift than it can exhibit. Operator nodes combine
//! these leaf values through the shared recursion in [`crate::semantics`].
//!
//! Strictly positive values imply satisfaction and strictly negative values
//! imply violation; zero is compatible with both.

use crate::formula::{Formula, LinearPredicate};
use crate::semantics::{check_horizon, operator_profile, EvalError};
use crate::trajectory::Trajectory;
use std::collections::BTreeMap;
use std::io::Write;

/// Which direction the signal shift tolerance is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Right,
    Left,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Right => write!(f, "right"),
            Side::Left => write!(f, "left"),
        }
    }
}

/// Per-time robustness values of one formula node.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessTable {
    pub node: Formula,
    pub side: Side,
    pub values: BTreeMap<usize, i64>,
}

impl RobustnessTable {
    pub fn value(&self, t: usize) -> Option<i64> {
        self.values.get(&t).copied()
    }

    /// Writes `t,theta` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,theta")?;
        for (t, v) in &self.values {
            writeln!(w, "{t},{v}")?;
        }
        Ok(())
    }
}

/// Signed run length of the predicate's sign to the right of each `t`,
/// clipped to the trajectory end.
pub(crate) fn theta_pred_profile(
    p: &LinearPredicate,
    traj: &Trajectory,
    side: Side,
) -> Result<Vec<i64>, EvalError> {
    let h = traj.horizon();
    let signs: Vec<i64> = (0..=h)
        .map(|t| p.sign_at(traj.state(t)))
        .collect::<Result<_, _>>()?;
    let mut theta = vec![0i64; h + 1];
    match side {
        Side::Right => {
            let mut run = 0i64;
            for t in (0..=h).rev() {
                if t < h && signs[t + 1] == signs[t] {
                    run += 1;
                } else {
                    run = 0;
                }
                theta[t] = signs[t] * run;
            }
        }
        Side::Left => {
            let mut run = 0i64;
            for t in 0..=h {
                if t > 0 && signs[t - 1] == signs[t] {
                    run += 1;
                } else {
                    run = 0;
                }
                theta[t] = signs[t] * run;
            }
        }
    }
    Ok(theta)
}

/// Right time robustness of a bare predicate at `t`.
pub fn theta_plus_predicate(
    p: &LinearPredicate,
    traj: &Trajectory,
    t: usize,
) -> Result<i64, EvalError> {
    bounds_check(traj, t)?;
    Ok(theta_pred_profile(p, traj, Side::Right)?[t])
}

/// Left time robustness of a bare predicate at `t`.
pub fn theta_minus_predicate(
    p: &LinearPredicate,
    traj: &Trajectory,
    t: usize,
) -> Result<i64, EvalError> {
    bounds_check(traj, t)?;
    Ok(theta_pred_profile(p, traj, Side::Left)?[t])
}

fn bounds_check(traj: &Trajectory, t: usize) -> Result<(), EvalError> {
    if t > traj.horizon() {
        return Err(EvalError::HorizonViolation { t, needed: 0, have: traj.horizon() });
    }
    Ok(())
}

pub(crate) fn theta_profile(
    phi: &Formula,
    traj: &Trajectory,
    side: Side,
) -> Result<Vec<i64>, EvalError> {
    check_horizon(phi, traj, 0)?;
    operator_profile(phi, traj.horizon(), &|p| theta_pred_profile(p, traj, side))
}

/// Time robustness of `phi` at `t`.
pub fn time_robustness(
    phi: &Formula,
    traj: &Trajectory,
    t: usize,
    side: Side,
) -> Result<i64, EvalError> {
    check_horizon(phi, traj, t)?;
    Ok(theta_profile(phi, traj, side)?[t])
}

/// Robustness at every valid time `t in [0, H - len(phi)]`.
pub fn robustness_profile(
    phi: &Formula,
    traj: &Trajectory,
    side: Side,
) -> Result<RobustnessTable, EvalError> {
    let values = theta_profile(phi, traj, side)?
        .into_iter()
        .enumerate()
        .collect();
    Ok(RobustnessTable { node: phi.clone(), side, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::semantics::char_function;

    /// Scalar signal with sign pattern (+ + - + + + - -).
    fn table_signal() -> Trajectory {
        Trajectory::scalar(&[1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0]).unwrap()
    }

    fn table_pred() -> LinearPredicate {
        // z >= 0.5 over the 0/1 signal above
        match parse_formula("z >= 0.5", &["z"]).unwrap() {
            Formula::Predicate(p) => p,
            _ => unreachable!(),
        }
    }

    fn example_trajectory() -> Trajectory {
        let s1 = [1.0, 0.5, -1.0, 1.0, 2.0, 0.5, -0.5, -1.0];
        let s2 = [2.0, 1.5, 1.0, 0.5, 0.25, -0.5, -1.0, -2.0];
        Trajectory::new(s1.iter().zip(s2.iter()).map(|(a, b)| vec![*a, *b]).collect()).unwrap()
    }

    #[test]
    fn right_robustness_of_reference_signal() {
        let p = table_pred();
        let traj = table_signal();
        assert_eq!(theta_plus_predicate(&p, &traj, 3).unwrap(), 2);
        assert_eq!(theta_plus_predicate(&p, &traj, 6).unwrap(), -1);
        assert_eq!(theta_plus_predicate(&p, &traj, 7).unwrap(), 0);
        let profile: Vec<i64> = (0..=7)
            .map(|t| theta_plus_predicate(&p, &traj, t).unwrap())
            .collect();
        assert_eq!(profile, vec![1, 0, 0, 2, 1, 0, -1, 0]);
    }

    #[test]
    fn left_robustness_of_reference_signal() {
        let p = table_pred();
        let traj = table_signal();
        assert_eq!(theta_minus_predicate(&p, &traj, 0).unwrap(), 0);
        assert_eq!(theta_minus_predicate(&p, &traj, 1).unwrap(), 1);
        assert_eq!(theta_minus_predicate(&p, &traj, 5).unwrap(), 2);
    }

    #[test]
    fn brute_force_agreement() {
        // literal scan over all tau, independent of the run-length code path
        fn brute(p: &LinearPredicate, traj: &Trajectory, t: usize, side: Side) -> i64 {
            let h = traj.horizon();
            let sign = |u: usize| p.sign_at(traj.state(u)).unwrap();
            let s = sign(t);
            let max_tau = match side {
                Side::Right => h - t,
                Side::Left => t,
            };
            let mut best = 0;
            for tau in 0..=max_tau {
                let ok = match side {
                    Side::Right => (t..=t + tau).all(|u| sign(u) == s),
                    Side::Left => (t - tau..=t).all(|u| sign(u) == s),
                };
                if ok {
                    best = tau as i64;
                }
            }
            s * best
        }
        let p = table_pred();
        for signal in [
            vec![1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0],
            vec![0.0; 5],
            vec![1.0; 6],
            vec![1.0, 0.0, 1.0, 0.0, 1.0],
            vec![0.3, 0.9, 0.51, 0.49, 0.5, 0.7],
        ] {
            let traj = Trajectory::scalar(&signal).unwrap();
            for t in 0..=traj.horizon() {
                assert_eq!(
                    theta_plus_predicate(&p, &traj, t).unwrap(),
                    brute(&p, &traj, t, Side::Right),
                    "right {signal:?} at {t}"
                );
                assert_eq!(
                    theta_minus_predicate(&p, &traj, t).unwrap(),
                    brute(&p, &traj, t, Side::Left),
                    "left {signal:?} at {t}"
                );
            }
        }
    }

    #[test]
    fn example_operator_values() {
        let traj = example_trajectory();
        let vars = ["p", "q"];
        let conj = parse_formula("p >= 0 & q >= 0", &vars).unwrap();
        let disj = parse_formula("p >= 0 | q >= 0", &vars).unwrap();
        assert_eq!(time_robustness(&conj, &traj, 3, Side::Right).unwrap(), 1);
        assert_eq!(time_robustness(&disj, &traj, 3, Side::Right).unwrap(), 2);
        assert_eq!(time_robustness(&disj, &traj, 6, Side::Right).unwrap(), -1);
        // zero robustness is compatible with both outcomes
        assert_eq!(time_robustness(&disj, &traj, 5, Side::Right).unwrap(), 0);
        assert_eq!(time_robustness(&disj, &traj, 7, Side::Right).unwrap(), 0);
        assert_eq!(char_function(&disj, &traj, 5).unwrap(), 1);
        assert_eq!(char_function(&disj, &traj, 7).unwrap(), -1);
        // the disjunction tolerates a 4-step shift at the start
        assert_eq!(time_robustness(&disj, &traj, 0, Side::Right).unwrap(), 4);
    }

    #[test]
    fn profile_of_constant_true() {
        let p = parse_formula("z >= -10", &["z"]).unwrap();
        let traj = Trajectory::scalar(&[0.0; 6]).unwrap();
        let table = robustness_profile(&p, &traj, Side::Right).unwrap();
        let vals: Vec<i64> = table.values.values().copied().collect();
        assert_eq!(vals, vec![5, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn negation_flips_profile() {
        let p = parse_formula("z >= 0.5", &["z"]).unwrap();
        let notp = parse_formula("!(z >= 0.5)", &["z"]).unwrap();
        let traj = table_signal();
        let a = robustness_profile(&p, &traj, Side::Right).unwrap();
        let b = robustness_profile(&notp, &traj, Side::Right).unwrap();
        for (t, v) in &a.values {
            assert_eq!(b.value(*t).unwrap(), -v);
        }
    }

    #[test]
    fn magnitude_bounded_by_horizon() {
        let traj = example_trajectory();
        let phi = parse_formula("G[0,2] (p >= 0) | (q >= 0) U[1,3] (p <= 0)", &["p", "q"]).unwrap();
        let h = traj.horizon() as i64;
        for side in [Side::Right, Side::Left] {
            for v in robustness_profile(&phi, &traj, side).unwrap().values.values() {
                assert!(v.abs() <= h + 1);
            }
        }
    }

    #[test]
    fn csv_export() {
        let p = parse_formula("z >= 0.5", &["z"]).unwrap();
        let traj = table_signal();
        let table = robustness_profile(&p, &traj, Side::Right).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,theta\n0,1\n1,0\n"));
    }
}
