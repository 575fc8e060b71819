//! Property tests for the logic layer: grammar round-trips, semantic
//! identities, and agreement between the run-length monitor and a literal
//! brute-force evaluation of the definitions.

use num::rational::BigRational;
use proptest::prelude::*;
use trstl_core::formula::{Formula, Interval, LinearPredicate};
use trstl_core::monitor::{robustness_profile, time_robustness, Side};
use trstl_core::parser::parse_formula;
use trstl_core::rat::parse_decimal;
use trstl_core::semantics::char_function;
use trstl_core::trajectory::Trajectory;

const VARS: [&str; 2] = ["p", "q"];

fn dec(s: &str) -> BigRational {
    parse_decimal(s).unwrap()
}

/// Exact-decimal coefficients in quarter steps, not all zero.
fn arb_predicate() -> impl Strategy<Value = LinearPredicate> {
    (-4i64..=4, -4i64..=4, -8i64..=8)
        .prop_filter_map("degenerate", |(c0, c1, off)| {
            let coeffs = vec![
                BigRational::new(c0.into(), 4.into()),
                BigRational::new(c1.into(), 4.into()),
            ];
            LinearPredicate::new(coeffs, BigRational::new(off.into(), 4.into())).ok()
        })
}

fn arb_interval(max_hi: usize) -> impl Strategy<Value = Interval> {
    (0..=max_hi).prop_flat_map(move |lo| {
        (lo..=max_hi).prop_map(move |hi| Interval::new(lo, hi).unwrap())
    })
}

fn arb_formula(depth: u32) -> BoxedStrategy<Formula> {
    let leaf = arb_predicate().prop_map(Formula::Predicate).boxed();
    if depth == 0 {
        return leaf;
    }
    let inner = arb_formula(depth - 1);
    prop_oneof![
        3 => leaf,
        2 => inner.clone().prop_map(Formula::not),
        2 => prop::collection::vec(arb_formula(depth - 1), 2..=3)
            .prop_map(|cs| Formula::and(cs).unwrap()),
        2 => prop::collection::vec(arb_formula(depth - 1), 2..=3)
            .prop_map(|cs| Formula::or(cs).unwrap()),
        1 => (arb_interval(3), inner.clone()).prop_map(|(i, f)| Formula::always(i, f)),
        1 => (arb_interval(3), inner.clone()).prop_map(|(i, f)| Formula::eventually(i, f)),
        1 => (inner.clone(), arb_interval(3), inner).prop_map(|(l, i, r)| Formula::until(l, i, r)),
    ]
    .boxed()
}

fn arb_trajectory(min_len: usize) -> impl Strategy<Value = Trajectory> {
    prop::collection::vec((-10i64..=10, -10i64..=10), min_len..=min_len + 6).prop_map(|rows| {
        Trajectory::new(
            rows.into_iter()
                .map(|(a, b)| vec![a as f64 / 4.0, b as f64 / 4.0])
                .collect(),
        )
        .unwrap()
    })
}

/// `true` universal predicate for the until expansions.
fn top() -> Formula {
    Formula::Predicate(LinearPredicate::new(vec![dec("0"), dec("0")], dec("1")).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pretty_print_reparses_to_equal_tree(phi in arb_formula(3)) {
        let printed = phi.pretty(&VARS);
        let reparsed = parse_formula(&printed, &VARS).unwrap();
        prop_assert_eq!(phi, reparsed, "{}", printed);
    }

    #[test]
    fn char_function_is_never_zero(phi in arb_formula(3), traj in arb_trajectory(16)) {
        if phi.horizon() <= traj.horizon() {
            for t in 0..=(traj.horizon() - phi.horizon()) {
                let v = char_function(&phi, &traj, t).unwrap();
                prop_assert!(v == 1 || v == -1);
            }
        }
    }

    #[test]
    fn de_morgan_semantically(
        a in arb_formula(2),
        b in arb_formula(2),
        traj in arb_trajectory(16),
    ) {
        let lhs = Formula::not(Formula::and(vec![a.clone(), b.clone()]).unwrap());
        let rhs = Formula::or(vec![Formula::not(a), Formula::not(b)]).unwrap();
        if lhs.horizon() <= traj.horizon() {
            for t in 0..=(traj.horizon() - lhs.horizon()) {
                prop_assert_eq!(
                    char_function(&lhs, &traj, t).unwrap(),
                    char_function(&rhs, &traj, t).unwrap()
                );
                for side in [Side::Right, Side::Left] {
                    prop_assert_eq!(
                        time_robustness(&lhs, &traj, t, side).unwrap(),
                        time_robustness(&rhs, &traj, t, side).unwrap()
                    );
                }
            }
        }
    }

    /// F and G evaluate exactly like their until-based definitions: for the
    /// characteristic function always, and for the right time robustness,
    /// where the clipped robustness of the `true` predicate
    /// (`H - t''` over the inner window) never undercuts the other operand.
    /// On the left side that guard value is `t''` itself, which caps the
    /// expansion near the start of the trace, so the direct window min/max
    /// is the semantics of record there and no identity is asserted.
    #[test]
    fn derived_operators_match_until_expansion(
        iv in arb_interval(4),
        inner in arb_formula(2),
        traj in arb_trajectory(20),
    ) {
        let ev = Formula::eventually(iv, inner.clone());
        let ev_until = Formula::until(top(), iv, inner.clone());
        let al = Formula::always(iv, inner.clone());
        let al_until = Formula::not(Formula::until(top(), iv, Formula::not(inner)));
        if ev.horizon() <= traj.horizon() {
            for t in 0..=(traj.horizon() - ev.horizon()) {
                prop_assert_eq!(
                    char_function(&ev, &traj, t).unwrap(),
                    char_function(&ev_until, &traj, t).unwrap()
                );
                prop_assert_eq!(
                    char_function(&al, &traj, t).unwrap(),
                    char_function(&al_until, &traj, t).unwrap()
                );
                prop_assert_eq!(
                    time_robustness(&ev, &traj, t, Side::Right).unwrap(),
                    time_robustness(&ev_until, &traj, t, Side::Right).unwrap()
                );
                prop_assert_eq!(
                    time_robustness(&al, &traj, t, Side::Right).unwrap(),
                    time_robustness(&al_until, &traj, t, Side::Right).unwrap()
                );
            }
        }
    }

    #[test]
    fn double_negation_is_identity(phi in arb_formula(2), traj in arb_trajectory(16)) {
        let nn = Formula::not(Formula::not(phi.clone()));
        if phi.horizon() <= traj.horizon() {
            for side in [Side::Right, Side::Left] {
                let a = robustness_profile(&phi, &traj, side).unwrap();
                let b = robustness_profile(&nn, &traj, side).unwrap();
                prop_assert_eq!(a.values, b.values);
            }
        }
    }

    /// Strict signs of the robustness decide satisfaction; zero decides
    /// nothing.
    #[test]
    fn robustness_sign_soundness(phi in arb_formula(3), traj in arb_trajectory(16)) {
        if phi.horizon() <= traj.horizon() {
            for t in 0..=(traj.horizon() - phi.horizon()) {
                let chi = char_function(&phi, &traj, t).unwrap();
                for side in [Side::Right, Side::Left] {
                    let theta = time_robustness(&phi, &traj, t, side).unwrap();
                    if theta > 0 {
                        prop_assert_eq!(chi, 1);
                    }
                    if theta < 0 {
                        prop_assert_eq!(chi, -1);
                    }
                    if chi == 1 {
                        prop_assert!(theta >= 0);
                    }
                    if chi == -1 {
                        prop_assert!(theta <= 0);
                    }
                    prop_assert!(theta.abs() <= traj.horizon() as i64 + 1);
                }
            }
        }
    }
}
