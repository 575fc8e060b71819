//! Big-M constraint constructors.
//!
//! Each gadget is exact on its feasible set: the enumeration tests check
//! that the projection of the feasible assignments equals the intended
//! relation, not just that intended points are feasible.

use super::{LinExpr, MilpError, MilpModel, Sense, VarId};
use num::rational::BigRational;
use num::{One, Signed};

/// Links a binary `z` to the sign of the bounded affine expression `mu`:
///
/// ```text
/// mu <= (M + eps) z - eps        mu >= m (1 - z)
/// ```
///
/// so `z = 1` forces `mu >= 0` and `z = 0` forces `mu <= -eps`. `M` must
/// over-estimate and `m` under-estimate `mu` over its domain. Values of `mu`
/// inside `(-eps, 0)` are infeasible by construction; the band keeps the
/// solver away from the sign boundary.
pub fn add_indicator(
    model: &mut MilpModel,
    mu: &LinExpr,
    z: VarId,
    m_upper: &BigRational,
    m_lower: &BigRational,
    eps: &BigRational,
) -> Result<(), MilpError> {
    if !eps.is_positive() {
        return Err(MilpError::NonPositiveEps(eps.to_string()));
    }
    if m_upper < m_lower {
        return Err(MilpError::InvertedBigM {
            m_upper: m_upper.to_string(),
            m_lower: m_lower.to_string(),
        });
    }
    // mu - (M + eps) z + eps <= 0
    let hi = mu
        .clone()
        .add_term(-(m_upper + eps), z)
        .add_constant(eps.clone());
    model.constrain(&hi, Sense::Le)?;
    // mu + m z - m >= 0
    let lo = mu
        .clone()
        .add_term(m_lower.clone(), z)
        .add_constant(-m_lower.clone());
    model.constrain(&lo, Sense::Ge)?;
    Ok(())
}

/// Exact linearization of `y = b * x` for binary `b` and integer `x` with
/// known bounds `x_l <= x <= x_u`:
///
/// ```text
/// x_l b <= y <= x_u b
/// x - x_u (1 - b) <= y <= x - x_l (1 - b)
/// ```
pub fn add_bool_int_product(
    model: &mut MilpModel,
    y: VarId,
    b: VarId,
    x: VarId,
    x_l: &BigRational,
    x_u: &BigRational,
) -> Result<(), MilpError> {
    add_bool_affine_product(model, y, &LinExpr::var(b), &LinExpr::var(x), x_l, x_u)
}

/// Same construct with `b` and `x` given as affine expressions; the four
/// inequalities stay linear. `b` must evaluate to 0 or 1 at every feasible
/// point (e.g. a binary variable or the complement `1 - z`).
pub fn add_bool_affine_product(
    model: &mut MilpModel,
    y: VarId,
    b: &LinExpr,
    x: &LinExpr,
    x_l: &BigRational,
    x_u: &BigRational,
) -> Result<(), MilpError> {
    if x_l > x_u {
        return Err(MilpError::InvertedProductBounds);
    }
    let yv = LinExpr::var(y);
    let neg = -BigRational::one();
    // y - x_l b >= 0
    model.constrain(&yv.clone().plus(&b.clone().scaled(&-x_l.clone())), Sense::Ge)?;
    // y - x_u b <= 0
    model.constrain(&yv.clone().plus(&b.clone().scaled(&-x_u.clone())), Sense::Le)?;
    // y >= x - x_u (1 - b):  y - x - x_u b + x_u >= 0
    let lower = yv
        .clone()
        .plus(&x.clone().scaled(&neg))
        .plus(&b.clone().scaled(&-x_u.clone()))
        .add_constant(x_u.clone());
    model.constrain(&lower, Sense::Ge)?;
    // y <= x - x_l (1 - b):  y - x - x_l b + x_l <= 0
    let upper = yv
        .plus(&x.clone().scaled(&neg))
        .plus(&b.clone().scaled(&-x_l.clone()))
        .add_constant(x_l.clone());
    model.constrain(&upper, Sense::Le)?;
    Ok(())
}

/// Forces `r = min(rs)` using one selector binary per operand:
///
/// ```text
/// r_i - M (1 - b_i) <= r <= r_i    for all i,    sum b_i = 1
/// ```
///
/// `big_m` must dominate every pairwise spread `|r_i - r_j|` over the
/// feasible ranges. Returns the selector binaries.
pub fn add_min(
    model: &mut MilpModel,
    r: VarId,
    rs: &[VarId],
    big_m: &BigRational,
) -> Result<Vec<VarId>, MilpError> {
    add_extremum(model, r, rs, big_m, true)
}

/// Dual of [`add_min`]: `r_i <= r <= r_i + M (1 - b_i)`, `sum b_i = 1`.
pub fn add_max(
    model: &mut MilpModel,
    r: VarId,
    rs: &[VarId],
    big_m: &BigRational,
) -> Result<Vec<VarId>, MilpError> {
    add_extremum(model, r, rs, big_m, false)
}

fn add_extremum(
    model: &mut MilpModel,
    r: VarId,
    rs: &[VarId],
    big_m: &BigRational,
    is_min: bool,
) -> Result<Vec<VarId>, MilpError> {
    if rs.is_empty() {
        return Err(MilpError::EmptyMinMax);
    }
    let r_name = model.var(r).name.clone();
    let mut selectors = Vec::with_capacity(rs.len());
    let mut sum = LinExpr::default();
    for (i, ri) in rs.iter().enumerate() {
        let b = model.add_binary(format!("{r_name}_s{i}"))?;
        selectors.push(b);
        sum = sum.add_term(BigRational::one(), b);
        let tight = LinExpr::var(r).add_term(-BigRational::one(), *ri);
        if is_min {
            // r <= r_i  and  r >= r_i - M (1 - b_i)
            model.constrain(&tight, Sense::Le)?;
            let slack = tight.add_term(-big_m.clone(), b).add_constant(big_m.clone());
            model.constrain(&slack, Sense::Ge)?;
        } else {
            // r >= r_i  and  r <= r_i + M (1 - b_i)
            model.constrain(&tight, Sense::Ge)?;
            let slack = tight.add_term(big_m.clone(), b).add_constant(-big_m.clone());
            model.constrain(&slack, Sense::Le)?;
        }
    }
    sum = sum.add_constant(-BigRational::one());
    model.constrain(&sum, Sense::Eq)?;
    Ok(selectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::VarKind;
    use crate::rat::parse_decimal;
    use num::Zero;

    fn r(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    fn ri(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    /// Grid of exact rationals `lo..=hi` step 1/2.
    fn half_grid(lo: i64, hi: i64) -> Vec<BigRational> {
        (2 * lo..=2 * hi).map(|n| BigRational::new(n.into(), 2.into())).collect()
    }

    #[test]
    fn indicator_feasible_set() {
        let mut m = MilpModel::new();
        let mu = m.add_continuous("mu", Some(ri(-10)), Some(ri(10))).unwrap();
        let z = m.add_binary("z").unwrap();
        let eps = r("0.01");
        add_indicator(&mut m, &LinExpr::var(mu), z, &ri(10), &ri(-10), &eps).unwrap();
        for mv in half_grid(-10, 10) {
            for zv in [ri(0), ri(1)] {
                let feasible = m.check_assignment(&[mv.clone(), zv.clone()]);
                let intended = if zv.is_zero() { mv <= -eps.clone() } else { !mv.is_negative() };
                assert_eq!(feasible, intended, "mu={mv} z={zv}");
            }
        }
        // the (-eps, 0) band is infeasible for both z values
        let banded = r("-0.005");
        assert!(!m.check_assignment(&[banded.clone(), ri(0)]));
        assert!(!m.check_assignment(&[banded, ri(1)]));
    }

    #[test]
    fn indicator_validation() {
        let mut m = MilpModel::new();
        let mu = m.add_continuous("mu", Some(ri(-1)), Some(ri(1))).unwrap();
        let z = m.add_binary("z").unwrap();
        assert!(matches!(
            add_indicator(&mut m, &LinExpr::var(mu), z, &ri(1), &ri(-1), &ri(0)),
            Err(MilpError::NonPositiveEps(_))
        ));
        assert!(matches!(
            add_indicator(&mut m, &LinExpr::var(mu), z, &ri(-2), &ri(1), &r("0.1")),
            Err(MilpError::InvertedBigM { .. })
        ));
    }

    #[test]
    fn product_feasible_set_is_exactly_b_times_x() {
        // asymmetric bounds on purpose: they distinguish the two halves of
        // the sandwich inequalities
        for (x_l, x_u) in [(-3i64, 3i64), (-1, 3), (0, 4), (-4, 0)] {
            let mut m = MilpModel::new();
            let y = m.add_integer("y", ri(-8), ri(8)).unwrap();
            let b = m.add_binary("b").unwrap();
            let x = m.add_integer("x", ri(x_l), ri(x_u)).unwrap();
            add_bool_int_product(&mut m, y, b, x, &ri(x_l), &ri(x_u)).unwrap();
            for bv in 0..=1i64 {
                for xv in x_l..=x_u {
                    for yv in -8..=8i64 {
                        let feasible = m.check_assignment(&[ri(yv), ri(bv), ri(xv)]);
                        assert_eq!(
                            feasible,
                            yv == bv * xv,
                            "bounds [{x_l},{x_u}] b={bv} x={xv} y={yv}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn product_bound_validation() {
        let mut m = MilpModel::new();
        let y = m.add_integer("y", ri(0), ri(1)).unwrap();
        let b = m.add_binary("b").unwrap();
        let x = m.add_integer("x", ri(0), ri(1)).unwrap();
        assert!(matches!(
            add_bool_int_product(&mut m, y, b, x, &ri(2), &ri(1)),
            Err(MilpError::InvertedProductBounds)
        ));
    }

    /// Projection check: for fixed operand values, the feasible `r` values
    /// (over all selector patterns) are exactly the min / max.
    #[test]
    fn min_max_feasible_projection() {
        for is_min in [true, false] {
            let mut m = MilpModel::new();
            let r_var = m.add_integer("r", ri(-6), ri(6)).unwrap();
            let a = m.add_integer("a", ri(-3), ri(3)).unwrap();
            let b = m.add_integer("b", ri(-3), ri(3)).unwrap();
            let c = m.add_integer("c", ri(-3), ri(3)).unwrap();
            let sels = if is_min {
                add_min(&mut m, r_var, &[a, b, c], &ri(20)).unwrap()
            } else {
                add_max(&mut m, r_var, &[a, b, c], &ri(20)).unwrap()
            };
            assert_eq!(sels.len(), 3);
            for av in -3..=3i64 {
                for bv in -3..=3i64 {
                    for cv in -2..=2i64 {
                        let want = if is_min {
                            av.min(bv).min(cv)
                        } else {
                            av.max(bv).max(cv)
                        };
                        for rv in -6..=6i64 {
                            let mut feasible = false;
                            for pattern in 0..8u8 {
                                let s: Vec<BigRational> =
                                    (0..3).map(|i| ri(((pattern >> i) & 1) as i64)).collect();
                                let vals = vec![
                                    ri(rv), ri(av), ri(bv), ri(cv),
                                    s[0].clone(), s[1].clone(), s[2].clone(),
                                ];
                                if m.check_assignment(&vals) {
                                    feasible = true;
                                }
                            }
                            assert_eq!(feasible, rv == want, "min={is_min} a={av} b={bv} c={cv} r={rv}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn singleton_min_is_identity() {
        let mut m = MilpModel::new();
        let r_var = m.add_integer("r", ri(-5), ri(5)).unwrap();
        let a = m.add_integer("a", ri(-5), ri(5)).unwrap();
        add_min(&mut m, r_var, &[a], &ri(20)).unwrap();
        for av in -5..=5i64 {
            for rv in -5..=5i64 {
                let feasible = m.check_assignment(&[ri(rv), ri(av), ri(1)]);
                assert_eq!(feasible, rv == av);
            }
        }
    }

    #[test]
    fn empty_min_rejected() {
        let mut m = MilpModel::new();
        let r_var = m.add_integer("r", ri(0), ri(1)).unwrap();
        assert!(matches!(add_min(&mut m, r_var, &[], &ri(1)), Err(MilpError::EmptyMinMax)));
    }

    #[test]
    fn selector_vars_are_binary() {
        let mut m = MilpModel::new();
        let r_var = m.add_integer("r", ri(-5), ri(5)).unwrap();
        let a = m.add_integer("a", ri(-5), ri(5)).unwrap();
        let b = m.add_integer("b", ri(-5), ri(5)).unwrap();
        let sels = add_max(&mut m, r_var, &[a, b], &ri(20)).unwrap();
        for s in sels {
            assert_eq!(m.var(s).kind, VarKind::Binary);
        }
    }
}
