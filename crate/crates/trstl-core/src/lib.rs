//! Time-robust signal temporal logic (STL) over discrete-time linear systems.
//!
//! The crate has three layers:
//!
//! * **Logic and monitoring** — [`Formula`] is an STL formula over linear
//!   predicates with integer-bounded temporal intervals. [`monitor`] computes
//!   the exact right/left time robustness of a formula on a finite
//!   [`Trajectory`]: the signed number of time steps the signal can be shifted
//!   while the satisfaction status at the evaluation instant is preserved.
//! * **MILP core** — [`milp`] is a small solver-agnostic model builder with
//!   big-M gadgets (indicator, boolean-integer product, min, max), an LP-file
//!   writer, and a subprocess adapter for external MILP solvers.
//! * **Synthesis** — [`encoder`] translates time robustness over a symbolic
//!   trajectory into MILP constraints via backward (or forward) run-length
//!   counters, and [`synthesis`] assembles dynamics, bounds and the robustness
//!   objective into a single program whose solution is re-simulated and
//!   re-checked by the exact monitor before it is reported.
//!
//! All logic types are immutable after construction and all monitor
//! operations are pure, so they can be shared freely across threads. Model
//! building is single-threaded per [`milp::MilpModel`]; independent models
//! may be built and solved concurrently.

pub mod encoder;
pub mod formula;
pub mod milp;
pub mod monitor;
pub mod parser;
pub mod rat;
pub mod semantics;
pub mod synthesis;
pub mod trajectory;

pub use formula::{Formula, FormulaError, Interval, LinearPredicate};
pub use monitor::{RobustnessTable, Side};
pub use parser::{parse_formula, ParseError};
pub use semantics::{char_function, EvalError};
pub use synthesis::{LtiSystem, Mode, SynthesisProblem, SynthesisResult};
pub use trajectory::Trajectory;
