//! Scenario-file front end for time-robust STL synthesis and monitoring.

pub mod bundled;
pub mod run;
pub mod scenario;

pub use bundled::{bundled, bundled_scenarios, BundledScenario};
pub use run::{run_scenario, RunOptions, RunOutcome};
pub use scenario::{Scenario, ScenarioError, SolverSettings};
