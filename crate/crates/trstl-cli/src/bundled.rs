//! Scenarios shipped with the binary.
//!
//! The five generic formulas run on the scalar relay `x_{t+1} = u_t` with 50
//! trajectory samples; `uav` is a double-integrator altitude mission with
//! velocity kept as a hard constraint; the `surveillance` family is a
//! two-agent patrol-and-recharge mission on per-axis double integrators
//! (the goal and charging rectangles are illustrative geometry, so its
//! optimal robustness depends on them). `table1` is a monitor-mode demo
//! paired with `table1_trace.csv`.

use crate::scenario::{Scenario, ScenarioError};

macro_rules! bundle {
    ($name:literal) => {
        BundledScenario {
            name: $name,
            toml: include_str!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/../../scenarios/",
                $name,
                ".toml"
            )),
        }
    };
}

#[derive(Debug, Clone, Copy)]
pub struct BundledScenario {
    pub name: &'static str,
    pub toml: &'static str,
}

impl BundledScenario {
    pub fn parse(&self) -> Result<Scenario, ScenarioError> {
        Scenario::from_toml_str(self.toml)
    }
}

/// Reference trace for the `table1` scenario in monitor mode.
pub const TABLE1_TRACE: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/table1_trace.csv"));

pub fn bundled_scenarios() -> Vec<BundledScenario> {
    vec![
        bundle!("phi1"),
        bundle!("phi2"),
        bundle!("phi3"),
        bundle!("phi4"),
        bundle!("phi5"),
        bundle!("uav"),
        bundle!("surveillance"),
        bundle!("surveillance_velocity"),
        bundle!("surveillance_feas1"),
        bundle!("surveillance_feas5"),
        bundle!("table1"),
    ]
}

pub fn bundled(name: &str) -> Option<BundledScenario> {
    bundled_scenarios().into_iter().find(|b| b.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_scenario_parses_and_round_trips() {
        for b in bundled_scenarios() {
            let scenario = b.parse().unwrap_or_else(|e| panic!("{}: {e}", b.name));
            let back = Scenario::from_toml_str(&scenario.to_toml_string())
                .unwrap_or_else(|e| panic!("{} reparse: {e}", b.name));
            assert_eq!(scenario, back, "{}", b.name);
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(bundled("uav").is_some());
        assert!(bundled("missing").is_none());
    }
}
