//! Scenario files for the Courant algebroid checker: parsing, resolution and execution.

pub mod resolve;
pub mod run;
pub mod scenario;

pub use run::{run, CheckOutcome, Outcome, RunReport};
pub use scenario::{Scenario, ScenarioError, CHECK_KINDS};
