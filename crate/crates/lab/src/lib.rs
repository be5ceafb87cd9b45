//! Scenario ingestion, command dispatch and report emission for the exact
//! operator laboratory and the space calculus.
//!
//! Scenario files are JSON with a top-level `kind` of `"space"` or
//! `"operator"`; rationals are strings like `"p/q"` so nothing is lost to
//! floating point. Reports are deterministic: running the same scenario with
//! the same flags twice produces byte-identical output.

pub mod gen;
pub mod describe;
pub mod report;
pub mod run;
pub mod scenario;

pub use report::Report;
pub use run::{run_operator_scenario, run_space_scenario, RunError, RunOptions};
pub use scenario::{ScenarioFile, SchemaError};
