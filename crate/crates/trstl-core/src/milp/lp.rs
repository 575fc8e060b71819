//! LP file rendering.
//!
//! Output follows the widely supported CPLEX LP dialect: objective section,
//! `Subject To`, `Bounds`, `Generals`, `Binaries`, `End`. Variables and
//! constraints appear in declaration order and all numbers are exact
//! decimals, so equal models render byte-identically.

use super::{decimal, sign_prefixed, MilpError, MilpModel, Objective, VarKind};
use num::{One, Zero};
use std::fmt::Write;

pub fn write_lp(model: &MilpModel) -> Result<String, MilpError> {
    let mut out = String::new();
    let (header, expr) = match model.objective() {
        Objective::Maximize(e) => ("Maximize", Some(e)),
        Objective::Minimize(e) => ("Minimize", Some(e)),
        Objective::Feasibility => ("Minimize", None),
    };
    out.push_str(header);
    out.push_str("\n obj:");
    match expr {
        Some(e) => {
            let terms = e.coalesced();
            if terms.is_empty() {
                out.push_str(" 0");
            } else {
                for (c, v) in &terms {
                    let _ = write!(out, " {} {}", sign_prefixed(c)?, model.var(*v).name);
                }
            }
            if !e.constant.is_zero() {
                let _ = write!(out, " {}", sign_prefixed(&e.constant)?);
            }
        }
        None => out.push_str(" 0"),
    }
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", c.name);
        for (k, v) in &c.terms {
            let _ = write!(out, " {} {}", sign_prefixed(k)?, model.var(*v).name);
        }
        let _ = writeln!(out, " {} {}", c.sense, decimal(&c.rhs)?);
    }
    out.push_str("Bounds\n");
    for def in model.vars() {
        if def.kind == VarKind::Binary {
            // implied [0,1] stays implicit; pinned binaries need their line
            let tightened = def.lower.as_ref().is_some_and(|l| !l.is_zero())
                || def.upper.as_ref().is_some_and(|u| !u.is_one());
            if tightened {
                let l = def.lower.as_ref().expect("binary bounds are always set");
                let u = def.upper.as_ref().expect("binary bounds are always set");
                let _ = writeln!(out, " {} <= {} <= {}", decimal(l)?, def.name, decimal(u)?);
            }
            continue;
        }
        match (&def.lower, &def.upper) {
            (None, None) => {
                let _ = writeln!(out, " {} free", def.name);
            }
            (Some(l), None) => {
                let _ = writeln!(out, " {} >= {}", def.name, decimal(l)?);
            }
            (None, Some(u)) => {
                let _ = writeln!(out, " {} <= {}", def.name, decimal(u)?);
            }
            (Some(l), Some(u)) => {
                let _ = writeln!(out, " {} <= {} <= {}", decimal(l)?, def.name, decimal(u)?);
            }
        }
    }
    let generals: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Integer)
        .map(|v| v.name.as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for name in generals {
            let _ = writeln!(out, " {name}");
        }
    }
    let binaries: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{LinExpr, Sense};
    use crate::rat::parse_decimal;
    use num::rational::BigRational;

    fn r(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    /// Minimal LP reader used only to cross-check the writer: counts
    /// sections and recovers constraint and variable-list sizes.
    fn read_back(text: &str) -> (usize, usize, usize, usize) {
        let mut section = "";
        let (mut constraints, mut bounds, mut generals, mut binaries) = (0, 0, 0, 0);
        for line in text.lines() {
            let trimmed = line.trim();
            match trimmed {
                "Maximize" | "Minimize" => section = "obj",
                "Subject To" => section = "st",
                "Bounds" => section = "bounds",
                "Generals" => section = "gen",
                "Binaries" => section = "bin",
                "End" => section = "end",
                "" => {}
                _ => match section {
                    "st" => {
                        assert!(trimmed.contains(':'), "constraint without label: {trimmed}");
                        constraints += 1;
                    }
                    "bounds" => bounds += 1,
                    "gen" => generals += 1,
                    "bin" => binaries += 1,
                    _ => {}
                },
            }
        }
        assert_eq!(section, "end", "missing End marker");
        (constraints, bounds, generals, binaries)
    }

    #[test]
    fn empty_feasibility_model() {
        let m = MilpModel::new();
        let text = write_lp(&m).unwrap();
        assert!(text.contains("obj: 0"));
        assert!(text.trim_end().ends_with("End"));
    }

    #[test]
    fn binaries_section() {
        let mut m = MilpModel::new();
        let b = m.add_binary("b").unwrap();
        m.add_constraint("c0", &LinExpr::var(b).add_constant(r("-1")), Sense::Ge)
            .unwrap();
        let text = write_lp(&m).unwrap();
        assert!(text.contains("Binaries\n b\n"));
        assert!(text.contains(" c0: + 1 b >= 1"));
    }

    #[test]
    fn writer_reader_round_trip_counts() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", Some(r("-1.5")), Some(r("2"))).unwrap();
        let y = m.add_integer("y", r("-3"), r("3")).unwrap();
        let b = m.add_binary("flag").unwrap();
        let free = m.add_continuous("slack", None, None).unwrap();
        m.add_constraint("c0", &LinExpr::var(x).add_term(r("2"), y).add_constant(r("-1")), Sense::Le).unwrap();
        m.add_constraint("c1", &LinExpr::var(b).add_term(r("-0.25"), free), Sense::Eq).unwrap();
        let text = write_lp(&m).unwrap();
        let (constraints, bounds, generals, binaries) = read_back(&text);
        assert_eq!(constraints, m.num_constraints());
        assert_eq!(bounds, 3); // x, y, slack (binary omitted)
        assert_eq!(generals, 1);
        assert_eq!(binaries, 1);
    }

    #[test]
    fn deterministic_output() {
        let build = || {
            let mut m = MilpModel::new();
            let x = m.add_continuous("x", Some(r("0.1")), Some(r("0.9"))).unwrap();
            let y = m.add_integer("y", r("0"), r("7")).unwrap();
            m.add_constraint("c0", &LinExpr::var(x).add_term(r("-0.125"), y), Sense::Ge).unwrap();
            m.set_objective(crate::milp::Objective::Maximize(LinExpr::var(y)));
            write_lp(&m).unwrap()
        };
        assert_eq!(build(), build());
    }

    #[test]
    fn negative_rhs_and_coefficients() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", None, Some(r("10"))).unwrap();
        m.add_constraint(
            "c0",
            &LinExpr::var(x).scaled(&r("-2.5")).add_constant(r("3")),
            Sense::Ge,
        )
        .unwrap();
        let text = write_lp(&m).unwrap();
        assert!(text.contains(" c0: - 2.5 x >= -3"), "{text}");
        assert!(text.contains(" x <= 10"));
    }
}
